#pragma once

// Minimum-acceptance checks for categorical realization ensembles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "facies_qc/error.hpp"
#include "facies_qc/grid.hpp"
#include "facies_qc/parallel.hpp"

namespace facies_qc {

// ---------------------------------------------------------------------------
// Percentiles

/// Linear interpolation between closest ranks: r = p/100 * (n - 1) on the sorted values.
inline double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw invalid_argument("percentile of an empty list");
  if (!(p >= 0.0 && p <= 100.0)) throw invalid_argument("percentile must be in [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double mean(std::span<const double> values) {
  if (values.empty()) throw invalid_argument("mean of an empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

struct PercentilePair {
  double lo = 10.0;
  double hi = 90.0;
};

inline void check_percentiles(const PercentilePair& p) {
  if (!(p.lo >= 0.0 && p.lo < p.hi && p.hi <= 100.0)) {
    throw invalid_argument("percentile pair must satisfy 0 <= lo < hi <= 100");
  }
}

// ---------------------------------------------------------------------------
// Local accuracy at conditioning data

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Cells equal to `positive` count as positive, every other code as negative.
inline ConfusionCounts confusion_at_points(const CategoricalGrid& realization, const ConditioningSet& data,
                                           FaciesCode positive = channel) {
  if (data.empty()) throw invalid_argument("confusion needs at least one conditioning point");
  ConfusionCounts c;
  for (const auto& p : data.points()) {
    if (!realization.shape().contains(static_cast<std::ptrdiff_t>(p.row), static_cast<std::ptrdiff_t>(p.col))) {
      throw invalid_argument("conditioning point outside realization");
    }
    const bool truth = p.value == positive;
    const bool pred = realization.at(p.row, p.col) == positive;
    if (truth && pred) ++c.tp;
    else if (!truth && pred) ++c.fp;
    else if (truth && !pred) ++c.fn;
    else ++c.tn;
  }
  return c;
}

/// Standard F1 = 2pr / (p + r).
///
/// No true positives with some error gives 0. All points true negative gives 1
/// (vacuous agreement); accuracy() disambiguates that case.
inline double f1_score(const ConfusionCounts& c) {
  if (c.total() == 0) throw invalid_argument("f1 of empty confusion counts");
  if (c.tp == 0) return (c.fp + c.fn == 0) ? 1.0 : 0.0;
  const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return 2.0 * precision * recall / (precision + recall);
}

inline double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw invalid_argument("accuracy of empty confusion counts");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

// ---------------------------------------------------------------------------
// Pixel-wise ensemble statistics

/// Fraction of members whose cell equals `positive`.
inline RealGrid pixel_average_map(const Ensemble& e, FaciesCode positive = channel) {
  std::vector<std::uint32_t> counts(e.shape().size(), 0);
  for (const auto& m : e.members()) {
    auto cells = m.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) counts[i] += cells[i] == positive;
  }
  std::vector<double> out(counts.size());
  const double n = static_cast<double>(e.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(counts[i]) / n;
  return RealGrid(e.shape(), std::move(out));
}

/// Population variance of the indicator: mean(i^2) - mean(i)^2.
inline RealGrid pixel_dispersion_map(const Ensemble& e, FaciesCode positive = channel) {
  std::vector<double> sum(e.shape().size(), 0.0);
  std::vector<double> sum_sq(e.shape().size(), 0.0);
  for (const auto& m : e.members()) {
    auto cells = m.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double v = cells[i] == positive ? 1.0 : 0.0;
      sum[i] += v;
      sum_sq[i] += v * v;
    }
  }
  const double n = static_cast<double>(e.size());
  std::vector<double> out(sum.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = sum[i] / n;
    out[i] = std::max(0.0, sum_sq[i] / n - m * m);
  }
  return RealGrid(e.shape(), std::move(out));
}

/// Binary Shannon entropy in bits, with 0 log 0 = 0.
inline double binary_entropy(double p) {
  auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
  return term(p) + term(1.0 - p);
}

/// Per-pixel binary Shannon entropy (base 2) of the positive indicator across members.
inline RealGrid entropy_map(const Ensemble& e, FaciesCode positive = channel) {
  auto avg = pixel_average_map(e, positive);
  std::vector<double> out(avg.size());
  auto p = avg.cells();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = binary_entropy(p[i]);
  return RealGrid(e.shape(), std::move(out));
}

inline std::vector<double> entropy_at_points(const RealGrid& h, const ConditioningSet& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& p : data.points()) {
    if (p.row >= h.n_rows() || p.col >= h.n_cols()) throw invalid_argument("point outside entropy map");
    out.push_back(h.at(p.row, p.col));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Proportions and histograms

inline double facies_proportion(const CategoricalGrid& g, FaciesCode code = channel) {
  auto cells = g.cells();
  const auto n = std::count(cells.begin(), cells.end(), code);
  return static_cast<double>(n) / static_cast<double>(cells.size());
}

/// Fixed-width histogram over [0, 1]. Bins are [lo, hi) except the last, which is closed.
struct Histogram {
  double bin_width = 0.0;
  std::vector<double> edges;  // size = counts.size() + 1
  std::vector<std::size_t> counts;

  std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
};

inline Histogram unit_histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw invalid_argument("bin width must be positive");
  // Slack absorbs representation error so 0.3 / 0.1 lands in bin 3, not 2.
  constexpr double slack = 1e-9;
  const auto n_bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(1.0 / bin_width - slack)));
  Histogram h;
  h.bin_width = bin_width;
  h.counts.assign(n_bins, 0);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges.push_back(std::min(1.0, static_cast<double>(i) * bin_width));
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) throw invalid_argument("histogram value outside [0, 1]");
    auto bin = static_cast<std::size_t>(std::floor(v / bin_width + slack));
    h.counts[std::min(bin, n_bins - 1)]++;
  }
  return h;
}

inline std::vector<double> proportions(const Ensemble& e, FaciesCode code = channel) {
  std::vector<double> out;
  out.reserve(e.size());
  for (const auto& m : e.members()) out.push_back(facies_proportion(m, code));
  return out;
}

inline Histogram proportion_histogram(const Ensemble& e, FaciesCode code, double bin_width) {
  return unit_histogram(proportions(e, code), bin_width);
}

// ---------------------------------------------------------------------------
// Moving-window proportions

/// Proportion of `code` in each fully-inside window, scanned with the given stride.
inline RealGrid moving_window_proportions(const CategoricalGrid& g, FaciesCode code, std::size_t window,
                                          std::size_t stride = 1) {
  if (window < 1 || window > std::min(g.n_rows(), g.n_cols())) {
    throw invalid_argument("window " + std::to_string(window) + " does not fit grid " + to_string(g.shape()));
  }
  if (stride < 1) throw invalid_argument("stride must be >= 1");
  const std::size_t rows = g.n_rows(), cols = g.n_cols();
  // Summed-area table with a zero border.
  std::vector<std::uint32_t> sat((rows + 1) * (cols + 1), 0);
  auto at = [&](std::size_t r, std::size_t c) -> std::uint32_t& { return sat[r * (cols + 1) + c]; };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      at(r + 1, c + 1) = (g.at(r, c) == code) + at(r, c + 1) + at(r + 1, c) - at(r, c);
    }
  }
  const GridShape out_shape{(rows - window) / stride + 1, (cols - window) / stride + 1};
  std::vector<double> out(out_shape.size());
  const double area = static_cast<double>(window * window);
  for (std::size_t i = 0; i < out_shape.n_rows; ++i) {
    const std::size_t r0 = i * stride, r1 = r0 + window;
    for (std::size_t j = 0; j < out_shape.n_cols; ++j) {
      const std::size_t c0 = j * stride, c1 = c0 + window;
      const auto n = at(r1, c1) - at(r0, c1) - at(r1, c0) + at(r0, c0);
      out[out_shape.index(i, j)] = static_cast<double>(n) / area;
    }
  }
  return RealGrid(out_shape, std::move(out));
}

struct WindowPair {
  double ti = 0.0;
  double realization = 0.0;
  friend bool operator==(const WindowPair&, const WindowPair&) = default;
};

inline std::vector<WindowPair> window_scatter(const CategoricalGrid& ti, const CategoricalGrid& realization,
                                              FaciesCode code, std::size_t window, std::size_t stride = 1) {
  if (ti.shape() != realization.shape()) {
    throw invalid_argument("window scatter shape mismatch: " + to_string(ti.shape()) + " vs " +
                           to_string(realization.shape()));
  }
  auto a = moving_window_proportions(ti, code, window, stride);
  auto b = moving_window_proportions(realization, code, window, stride);
  std::vector<WindowPair> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {a.cells()[i], b.cells()[i]};
  return out;
}

/// Percentile band of realization window proportions, binned by the TI proportion at the same window.
struct WindowEnvelope {
  PercentilePair percentiles{25.0, 75.0};
  double bin_width = 0.1;
  struct Bin {
    double ti_lo = 0.0;
    double ti_hi = 0.0;
    std::size_t n = 0;
    double lower = 0.0;
    double upper = 0.0;
  };
  std::vector<Bin> bins;  // empty bins omitted
};

inline WindowEnvelope window_envelope(const CategoricalGrid& ti, const Ensemble& e, FaciesCode code,
                                      std::size_t window, std::size_t stride, PercentilePair pct = {25.0, 75.0},
                                      double bin_width = 0.1) {
  check_percentiles(pct);
  if (!(bin_width > 0.0)) throw invalid_argument("bin width must be positive");
  auto ti_props = moving_window_proportions(ti, code, window, stride);
  constexpr double slack = 1e-9;
  const auto n_bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(1.0 / bin_width - slack)));
  std::vector<std::size_t> bin_of(ti_props.size());
  for (std::size_t i = 0; i < bin_of.size(); ++i) {
    bin_of[i] = std::min(n_bins - 1, static_cast<std::size_t>(std::floor(ti_props.cells()[i] / bin_width + slack)));
  }
  std::vector<std::vector<double>> per_bin(n_bins);
  for (const auto& m : e.members()) {
    if (m.shape() != ti.shape()) throw invalid_argument("window envelope: ensemble and TI shapes differ");
    auto props = moving_window_proportions(m, code, window, stride);
    for (std::size_t i = 0; i < bin_of.size(); ++i) per_bin[bin_of[i]].push_back(props.cells()[i]);
  }
  WindowEnvelope env;
  env.percentiles = pct;
  env.bin_width = bin_width;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (per_bin[b].empty()) continue;
    env.bins.push_back({static_cast<double>(b) * bin_width, std::min(1.0, static_cast<double>(b + 1) * bin_width),
                        per_bin[b].size(), percentile(per_bin[b], pct.lo), percentile(per_bin[b], pct.hi)});
  }
  return env;
}

// ---------------------------------------------------------------------------
// Directional semivariograms

/// Integer lag step in cells.
struct Direction {
  std::ptrdiff_t d_row = 0;
  std::ptrdiff_t d_col = 1;
  friend bool operator==(const Direction&, const Direction&) = default;
};

/// Along-channel (column) direction.
inline constexpr Direction major_direction{0, 1};
/// Across-channel (row) direction.
inline constexpr Direction minor_direction{1, 0};

struct SemivariogramLag {
  std::size_t h = 0;
  double gamma = 0.0;
  std::size_t n_pairs = 0;
  friend bool operator==(const SemivariogramLag&, const SemivariogramLag&) = default;
};

struct Semivariogram {
  Direction direction;
  std::vector<SemivariogramLag> lags;  // lags with no pairs are omitted
};

/// gamma(h) = sum over in-bounds pairs (u, u + h*dir) of [z(u) - z(u + h*dir)]^2 / (2 N(h)).
inline Semivariogram semivariogram_of_values(std::span<const double> z, GridShape shape, Direction dir,
                                             std::size_t max_lag) {
  if (dir.d_row == 0 && dir.d_col == 0) throw invalid_argument("semivariogram direction must be nonzero");
  if (max_lag < 1) throw invalid_argument("max_lag must be >= 1");
  if (z.size() != shape.size()) throw invalid_argument("semivariogram: value count does not match shape");
  const auto rows = static_cast<std::ptrdiff_t>(shape.n_rows);
  const auto cols = static_cast<std::ptrdiff_t>(shape.n_cols);
  Semivariogram sv{dir, {}};
  for (std::size_t h = 1; h <= max_lag; ++h) {
    const std::ptrdiff_t dr = dir.d_row * static_cast<std::ptrdiff_t>(h);
    const std::ptrdiff_t dc = dir.d_col * static_cast<std::ptrdiff_t>(h);
    // Tail rows/cols whose heads stay in bounds.
    const std::ptrdiff_t r_begin = std::max<std::ptrdiff_t>(0, -dr), r_end = std::min(rows, rows - dr);
    const std::ptrdiff_t c_begin = std::max<std::ptrdiff_t>(0, -dc), c_end = std::min(cols, cols - dc);
    if (r_begin >= r_end || c_begin >= c_end) continue;
    // Four partial sums let the inner loop pipeline; row order is fixed, so results are reproducible.
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::ptrdiff_t r = r_begin; r < r_end; ++r) {
      const double* tail = z.data() + r * cols;
      const double* head = z.data() + (r + dr) * cols + dc;
      std::ptrdiff_t c = c_begin;
      for (; c + 4 <= c_end; c += 4) {
        for (int k = 0; k < 4; ++k) {
          const double d = tail[c + k] - head[c + k];
          acc[k] += d * d;
        }
      }
      for (; c < c_end; ++c) {
        const double d = tail[c] - head[c];
        acc[0] += d * d;
      }
    }
    const double sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    const auto n = static_cast<std::size_t>((r_end - r_begin) * (c_end - c_begin));
    sv.lags.push_back({h, sum / (2.0 * static_cast<double>(n)), n});
  }
  return sv;
}

inline std::vector<double> indicator(const CategoricalGrid& g, FaciesCode positive = channel) {
  std::vector<double> z(g.size());
  auto cells = g.cells();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = cells[i] == positive ? 1.0 : 0.0;
  return z;
}

/// Indicator semivariogram of `positive` along an integer direction.
inline Semivariogram directional_semivariogram(const CategoricalGrid& g, FaciesCode positive, Direction dir,
                                               std::size_t max_lag) {
  auto z = indicator(g, positive);
  return semivariogram_of_values(z, g.shape(), dir, max_lag);
}

struct Envelope {
  PercentilePair percentiles;
  std::vector<std::size_t> lags;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Per-lag percentile band of member semivariograms. Members run concurrently, aggregated in order.
inline Envelope ensemble_semivariogram_envelope(const Ensemble& e, FaciesCode positive, Direction dir,
                                                std::size_t max_lag, PercentilePair pct) {
  check_percentiles(pct);
  auto svs = parallel_map(e.size(), [&](std::size_t i) {
    return directional_semivariogram(e[i], positive, dir, max_lag);
  });
  Envelope env;
  env.percentiles = pct;
  // Members share shape, so they share the set of reported lags.
  const auto& first = svs.front().lags;
  std::vector<double> gammas(svs.size());
  for (std::size_t k = 0; k < first.size(); ++k) {
    for (std::size_t i = 0; i < svs.size(); ++i) gammas[i] = svs[i].lags[k].gamma;
    env.lags.push_back(first[k].h);
    env.lower.push_back(percentile(gammas, pct.lo));
    env.upper.push_back(percentile(gammas, pct.hi));
  }
  return env;
}

// ---------------------------------------------------------------------------
// Geobodies

enum class Connectivity { four = 4, eight = 8 };

struct GeobodyLabeling {
  GridShape shape;
  std::vector<std::uint32_t> labels;  // 0 = background, 1..count = component id in raster-scan order
  std::size_t count = 0;
  Connectivity connectivity = Connectivity::eight;

  std::uint32_t at(std::size_t row, std::size_t col) const { return labels[shape.index(row, col)]; }
};

/// Connected components of cells equal to `code`, via two-pass union-find labeling.
inline GeobodyLabeling count_geobodies(const CategoricalGrid& g, FaciesCode code = channel,
                                       Connectivity conn = Connectivity::eight) {
  const std::size_t rows = g.n_rows(), cols = g.n_cols();
  std::vector<std::uint32_t> provisional(g.size(), 0);
  std::vector<std::uint32_t> parent{0};
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (g.at(r, c) != code) continue;
      std::uint32_t label = 0;
      auto visit = [&](std::ptrdiff_t nr, std::ptrdiff_t nc) {
        if (!g.shape().contains(nr, nc)) return;
        const auto other = provisional[g.shape().index(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc))];
        if (other == 0) return;
        if (label == 0) label = other;
        else unite(label, other);
      };
      const auto ri = static_cast<std::ptrdiff_t>(r), ci = static_cast<std::ptrdiff_t>(c);
      visit(ri, ci - 1);
      visit(ri - 1, ci);
      if (conn == Connectivity::eight) {
        visit(ri - 1, ci - 1);
        visit(ri - 1, ci + 1);
      }
      if (label == 0) {
        label = static_cast<std::uint32_t>(parent.size());
        parent.push_back(label);
      }
      provisional[g.shape().index(r, c)] = label;
    }
  }

  GeobodyLabeling out{g.shape(), std::vector<std::uint32_t>(g.size(), 0), 0, conn};
  std::vector<std::uint32_t> final_id(parent.size(), 0);
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    if (provisional[i] == 0) continue;
    const auto root = find(provisional[i]);
    if (final_id[root] == 0) final_id[root] = static_cast<std::uint32_t>(++out.count);
    out.labels[i] = final_id[root];
  }
  return out;
}

}  // namespace facies_qc
