#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facies_qc/error.hpp"
#include "facies_qc/grid.hpp"
#include "facies_qc/metrics.hpp"
#include "facies_qc/random.hpp"

namespace facies_qc {

/// Generator input noise. Values are finite.
class LatentVector {
 public:
  LatentVector() = default;
  explicit LatentVector(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
      if (!std::isfinite(v)) throw invalid_argument("latent vector contains a non-finite value");
    }
  }

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const LatentVector&, const LatentVector&) = default;

 private:
  std::vector<double> values_;
};

struct GeneratorInfo {
  std::size_t latent_dim = 0;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  bool supports_discriminator = false;
  std::string name;

  GridShape shape() const { return {n_rows, n_cols}; }
};

/// G: latent vector to a [0, 1] raster. Must be deterministic in z.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual GeneratorInfo info() const = 0;
  virtual RealGrid generate(const LatentVector& z) = 0;
  /// True when generate() may be called concurrently on one instance.
  virtual bool thread_safe() const { return false; }
};

/// D: plausibility of a raster, strictly inside (0, 1).
class Discriminator {
 public:
  virtual ~Discriminator() = default;
  virtual double score(const RealGrid& g) = 0;
  virtual std::string name() const = 0;
  virtual bool thread_safe() const { return false; }
};

/// i.i.d. standard normal entries, deterministic per seed.
inline LatentVector sample_latent(std::uint64_t seed, std::size_t latent_dim) {
  if (latent_dim < 1) throw invalid_argument("latent_dim must be >= 1");
  Rng rng(seed);
  std::vector<double> z(latent_dim);
  for (double& v : z) v = standard_normal(rng);
  return LatentVector(std::move(z));
}

// ---------------------------------------------------------------------------
// Procedural sinusoidal-channel generator

namespace procedural {

inline constexpr std::size_t params_per_channel = 5;
inline constexpr std::size_t default_channels = 3;
inline constexpr std::size_t default_rows = 64;
inline constexpr std::size_t default_cols = 64;
/// Slope of the soft channel edge.
inline constexpr double edge_slope = 4.0;
/// Amplitude ceiling as a fraction of the row count.
inline constexpr double max_amplitude_frac = 0.15;
/// Wavelength range as fractions of the column count.
inline constexpr double min_wavelength_frac = 0.5;
inline constexpr double max_wavelength_frac = 1.5;
/// Half-thickness range in cells at 64 rows; scales linearly with the row count.
inline constexpr double mid_half_thickness = 3.0;
inline constexpr double half_thickness_spread = 1.5;
inline constexpr double min_half_thickness = 0.5;

}  // namespace procedural

struct ChannelParams {
  double amplitude = 0.0;
  double wavelength = 1.0;
  double phase = 0.0;
  double vertical_offset = 0.0;
  double half_thickness = 1.0;

  double centerline(double col) const {
    return vertical_offset + amplitude * std::sin(2.0 * std::numbers::pi * col / wavelength + phase);
  }
};

inline GeneratorInfo procedural_info(std::size_t n_channels = procedural::default_channels,
                                     std::size_t n_rows = procedural::default_rows,
                                     std::size_t n_cols = procedural::default_cols) {
  return {n_channels * procedural::params_per_channel, n_rows, n_cols, false, "procedural-channels"};
}

/// Decodes z in groups of five: (amplitude, wavelength, phase, offset, half-thickness),
/// each squashed by tanh into its range. At z = 0 the channels are evenly stacked
/// mid-range sinusoids. The offset range keeps every centerline inside the grid.
inline std::vector<ChannelParams> decode_channels(const LatentVector& z, const GeneratorInfo& info) {
  using namespace procedural;
  if (info.n_rows < 1 || info.n_cols < 1) throw invalid_argument("generator dimensions must be positive");
  if (z.size() != info.latent_dim || z.size() == 0 || z.size() % params_per_channel != 0) {
    throw invalid_argument("procedural generator expects a latent of dimension 5*C matching " +
                           std::to_string(info.latent_dim) + ", got " + std::to_string(z.size()));
  }
  const std::size_t n_channels = z.size() / params_per_channel;
  const double rows = static_cast<double>(info.n_rows);
  const double cols = static_cast<double>(info.n_cols);
  const double max_amp = max_amplitude_frac * rows;
  const double margin = std::min(max_amp, (rows - 1.0) / 2.0);
  auto squash01 = [](double v) { return 0.5 * (1.0 + std::tanh(v)); };

  std::vector<ChannelParams> out(n_channels);
  for (std::size_t c = 0; c < n_channels; ++c) {
    const double* p = z.values().data() + c * params_per_channel;
    const double slot = 2.0 * (static_cast<double>(c) + 0.5) / static_cast<double>(n_channels) - 1.0;
    auto& ch = out[c];
    ch.amplitude = max_amp * squash01(p[0]);
    ch.wavelength = cols * (min_wavelength_frac + (max_wavelength_frac - min_wavelength_frac) * squash01(p[1]));
    ch.phase = std::numbers::pi * std::tanh(p[2]);
    ch.vertical_offset = margin + (rows - 1.0 - 2.0 * margin) * squash01(p[3] + std::atanh(slot));
    ch.half_thickness =
        std::max(min_half_thickness, rows / 64.0 * (mid_half_thickness + half_thickness_spread * std::tanh(p[4])));
  }
  return out;
}

/// Soft membership of one cell in one channel: sigmoid(slope * (half_thickness - distance)).
inline double channel_membership(const ChannelParams& ch, std::size_t row, std::size_t col) {
  const double d = std::fabs(static_cast<double>(row) - ch.centerline(static_cast<double>(col)));
  return 1.0 / (1.0 + std::exp(-procedural::edge_slope * (ch.half_thickness - d)));
}

/// Each cell is the maximum channel membership; values lie in (0, 1).
inline RealGrid procedural_generate(const LatentVector& z, const GeneratorInfo& info) {
  const auto channels = decode_channels(z, info);
  const std::size_t rows = info.n_rows, cols = info.n_cols;
  // Sigmoid is monotone, so the max membership is the sigmoid of the max argument.
  std::vector<double> centers(channels.size() * cols);
  for (std::size_t k = 0; k < channels.size(); ++k) {
    for (std::size_t c = 0; c < cols; ++c) centers[k * cols + c] = channels[k].centerline(static_cast<double>(c));
  }
  std::vector<double> out(rows * cols, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = out.data() + r * cols;
    const double rr = static_cast<double>(r);
    for (std::size_t k = 0; k < channels.size(); ++k) {
      const double* center = centers.data() + k * cols;
      const double ht = channels[k].half_thickness;
      for (std::size_t c = 0; c < cols; ++c) {
        row[c] = std::max(row[c], procedural::edge_slope * (ht - std::fabs(rr - center[c])));
      }
    }
  }
  for (double& v : out) v = 1.0 / (1.0 + std::exp(-v));
  return RealGrid({rows, cols}, std::move(out));
}

class ProceduralGenerator final : public Generator {
 public:
  explicit ProceduralGenerator(GeneratorInfo info = procedural_info()) : info_(std::move(info)) {
    if (info_.latent_dim == 0 || info_.latent_dim % procedural::params_per_channel != 0) {
      throw invalid_argument("procedural latent_dim must be a positive multiple of 5");
    }
    if (info_.n_rows < 1 || info_.n_cols < 1) throw invalid_argument("generator dimensions must be positive");
  }
  GeneratorInfo info() const override { return info_; }
  RealGrid generate(const LatentVector& z) override { return procedural_generate(z, info_); }
  bool thread_safe() const override { return true; }

 private:
  GeneratorInfo info_;
};

// ---------------------------------------------------------------------------
// Statistics-based plausibility score

inline constexpr std::size_t default_stat_lags = 10;
inline constexpr double default_plausibility_weight = 10.0;

struct TIStats {
  GridShape shape;
  double target_proportion = 0.0;
  std::vector<double> target_gamma_major;
  std::vector<double> target_gamma_minor;
};

namespace detail {

inline std::vector<double> first_gammas(std::span<const double> z, GridShape shape, Direction dir, std::size_t k) {
  std::vector<double> out;
  if (k == 0) return out;
  for (const auto& lag : semivariogram_of_values(z, shape, dir, k).lags) out.push_back(lag.gamma);
  return out;
}

inline double plausibility_from_values(std::span<const double> z, GridShape shape, const TIStats& stats,
                                       double weight) {
  if (shape != stats.shape) {
    throw invalid_argument("plausibility: grid " + to_string(shape) + " does not match TI " + to_string(stats.shape));
  }
  const double prop = mean(z);
  double gamma_dev = 0.0;
  std::size_t n_terms = 0;
  auto accumulate = [&](Direction dir, const std::vector<double>& target) {
    auto g = first_gammas(z, shape, dir, target.size());
    for (std::size_t i = 0; i < std::min(g.size(), target.size()); ++i) {
      gamma_dev += std::fabs(g[i] - target[i]);
      ++n_terms;
    }
  };
  accumulate(major_direction, stats.target_gamma_major);
  accumulate(minor_direction, stats.target_gamma_minor);
  const double dev = std::fabs(prop - stats.target_proportion) + (n_terms ? gamma_dev / static_cast<double>(n_terms) : 0.0);
  const double s = 1.0 / (1.0 + std::exp(weight * dev));
  // Keep strictly inside (0, 1) even when exp overflows.
  return std::clamp(s, std::numeric_limits<double>::min(), 0.5);
}

}  // namespace detail

inline TIStats compute_ti_stats(const CategoricalGrid& ti, FaciesCode positive = channel,
                                std::size_t lags = default_stat_lags) {
  auto z = indicator(ti, positive);
  TIStats s;
  s.shape = ti.shape();
  s.target_proportion = mean(z);
  s.target_gamma_major = detail::first_gammas(z, ti.shape(), major_direction, lags);
  s.target_gamma_minor = detail::first_gammas(z, ti.shape(), minor_direction, lags);
  return s;
}

/// sigmoid(-weight * dev), dev = |proportion - target| + mean |gamma - target gamma| over
/// the stored major and minor lags. Exactly 0.5 when the statistics match.
inline double plausibility_score(const CategoricalGrid& g, const TIStats& stats, FaciesCode positive = channel,
                                 double weight = default_plausibility_weight) {
  auto z = indicator(g, positive);
  return detail::plausibility_from_values(z, g.shape(), stats, weight);
}

/// Real-valued grids are scored on their raw [0, 1] values, treated as soft indicators.
inline double plausibility_score(const RealGrid& g, const TIStats& stats, double weight = default_plausibility_weight) {
  return detail::plausibility_from_values(g.cells(), g.shape(), stats, weight);
}

class PlausibilityDiscriminator final : public Discriminator {
 public:
  explicit PlausibilityDiscriminator(TIStats stats, double weight = default_plausibility_weight)
      : stats_(std::move(stats)), weight_(weight) {}
  double score(const RealGrid& g) override { return plausibility_score(g, stats_, weight_); }
  std::string name() const override { return "plausibility"; }
  bool thread_safe() const override { return true; }
  const TIStats& stats() const { return stats_; }

 private:
  TIStats stats_;
  double weight_;
};

}  // namespace facies_qc
