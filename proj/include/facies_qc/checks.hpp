#pragma once

// Bundles every acceptance check for one ensemble against a TI and optional well data.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "facies_qc/grid.hpp"
#include "facies_qc/metrics.hpp"
#include "facies_qc/parallel.hpp"

namespace facies_qc {

struct CheckConfig {
  FaciesCode positive = channel;
  /// Zero selects min(n_rows, n_cols) / 2.
  std::size_t max_lag = 0;
  /// Zero selects min(n_rows, n_cols) / 2.
  std::size_t window = 0;
  std::size_t stride = 1;
  Connectivity connectivity = Connectivity::eight;
  PercentilePair f1_percentiles{25.0, 75.0};
  PercentilePair window_percentiles{25.0, 75.0};
  PercentilePair semivariogram_percentiles{10.0, 90.0};
  double proportion_bin_width = 0.01;
  double entropy_bin_width = 0.1;
  double window_bin_width = 0.1;
  /// Window scatter pairs kept from the first member.
  std::size_t scatter_sample = 2000;

  std::size_t resolved_max_lag(GridShape s) const {
    return max_lag ? max_lag : std::max<std::size_t>(1, std::min(s.n_rows, s.n_cols) / 2);
  }
  std::size_t resolved_window(GridShape s) const {
    return window ? window : std::max<std::size_t>(1, std::min(s.n_rows, s.n_cols) / 2);
  }
};

struct DistributionSummary {
  std::vector<double> values;
  double mean = 0.0;
  double p_lo = 0.0;
  double p_hi = 0.0;
  PercentilePair percentiles;
};

inline DistributionSummary summarize(std::vector<double> values, PercentilePair pct) {
  DistributionSummary s;
  s.percentiles = pct;
  s.mean = mean(values);
  s.p_lo = percentile(values, pct.lo);
  s.p_hi = percentile(values, pct.hi);
  s.values = std::move(values);
  return s;
}

struct F1Check {
  DistributionSummary f1;
  std::vector<double> accuracy;
};

struct SemivariogramCheck {
  Direction direction;
  std::vector<std::size_t> lags;
  std::vector<std::vector<double>> member_gammas;  // [member][lag index]
  Envelope envelope;
};

struct EnsembleCheck {
  std::size_t members = 0;
  std::optional<F1Check> f1;
  RealGrid entropy_map;
  std::optional<std::vector<double>> entropy_at_data;
  std::optional<Histogram> entropy_histogram;
  SemivariogramCheck major;
  SemivariogramCheck minor;
  std::vector<double> proportions;
  double proportion_mean = 0.0;
  Histogram proportion_histogram;
  RealGrid pixel_average;
  RealGrid pixel_dispersion;
  std::size_t window = 0;
  std::size_t stride = 1;
  WindowEnvelope window_envelope;
  std::vector<WindowPair> window_scatter_sample;
  std::vector<double> geobody_counts;
  double geobody_mean = 0.0;
};

struct TIReference {
  double proportion = 0.0;
  std::size_t geobody_count = 0;
  Semivariogram major;
  Semivariogram minor;
};

inline TIReference compute_ti_reference(const CategoricalGrid& ti, const CheckConfig& cfg) {
  const auto lag = cfg.resolved_max_lag(ti.shape());
  return {facies_proportion(ti, cfg.positive), count_geobodies(ti, cfg.positive, cfg.connectivity).count,
          directional_semivariogram(ti, cfg.positive, major_direction, lag),
          directional_semivariogram(ti, cfg.positive, minor_direction, lag)};
}

inline F1Check f1_check(const Ensemble& e, const ConditioningSet& data, const CheckConfig& cfg) {
  std::vector<double> f1, acc;
  for (const auto& m : e.members()) {
    auto c = confusion_at_points(m, data, cfg.positive);
    f1.push_back(f1_score(c));
    acc.push_back(accuracy(c));
  }
  return {summarize(std::move(f1), cfg.f1_percentiles), std::move(acc)};
}

namespace detail {

struct MemberStats {
  Semivariogram major;
  Semivariogram minor;
  double geobodies = 0.0;
};

inline SemivariogramCheck collect_semivariograms(const std::vector<MemberStats>& stats, bool major,
                                                 PercentilePair pct) {
  SemivariogramCheck out;
  const auto& first = major ? stats.front().major : stats.front().minor;
  out.direction = first.direction;
  out.envelope.percentiles = pct;
  for (const auto& l : first.lags) out.lags.push_back(l.h);
  for (const auto& s : stats) {
    const auto& sv = major ? s.major : s.minor;
    std::vector<double> g;
    for (const auto& l : sv.lags) g.push_back(l.gamma);
    out.member_gammas.push_back(std::move(g));
  }
  std::vector<double> column(stats.size());
  for (std::size_t k = 0; k < out.lags.size(); ++k) {
    for (std::size_t i = 0; i < stats.size(); ++i) column[i] = out.member_gammas[i][k];
    out.envelope.lags.push_back(out.lags[k]);
    out.envelope.lower.push_back(percentile(column, pct.lo));
    out.envelope.upper.push_back(percentile(column, pct.hi));
  }
  return out;
}

}  // namespace detail

/// Full check suite for one ensemble. `data` enables the F1 and at-data entropy sections.
inline EnsembleCheck check_ensemble(const Ensemble& e, const CategoricalGrid& ti, const ConditioningSet* data,
                                    const CheckConfig& cfg) {
  if (e.shape() != ti.shape()) {
    throw invalid_argument("ensemble shape " + to_string(e.shape()) + " does not match TI " + to_string(ti.shape()));
  }
  const auto lag = cfg.resolved_max_lag(ti.shape());
  const auto window = cfg.resolved_window(ti.shape());

  EnsembleCheck out;
  out.members = e.size();
  if (data && !data->empty()) {
    out.f1 = f1_check(e, *data, cfg);
  }
  out.entropy_map = entropy_map(e, cfg.positive);
  if (data && !data->empty()) {
    out.entropy_at_data = entropy_at_points(out.entropy_map, *data);
    out.entropy_histogram = unit_histogram(*out.entropy_at_data, cfg.entropy_bin_width);
  }

  auto stats = parallel_map(e.size(), [&](std::size_t i) {
    return detail::MemberStats{directional_semivariogram(e[i], cfg.positive, major_direction, lag),
                               directional_semivariogram(e[i], cfg.positive, minor_direction, lag),
                               static_cast<double>(count_geobodies(e[i], cfg.positive, cfg.connectivity).count)};
  });
  out.major = detail::collect_semivariograms(stats, true, cfg.semivariogram_percentiles);
  out.minor = detail::collect_semivariograms(stats, false, cfg.semivariogram_percentiles);

  out.proportions = proportions(e, cfg.positive);
  out.proportion_mean = mean(out.proportions);
  out.proportion_histogram = unit_histogram(out.proportions, cfg.proportion_bin_width);

  out.pixel_average = pixel_average_map(e, cfg.positive);
  out.pixel_dispersion = pixel_dispersion_map(e, cfg.positive);

  out.window = window;
  out.stride = cfg.stride;
  out.window_envelope = window_envelope(ti, e, cfg.positive, window, cfg.stride, cfg.window_percentiles, cfg.window_bin_width);
  auto scatter = window_scatter(ti, e[0], cfg.positive, window, cfg.stride);
  if (scatter.size() > cfg.scatter_sample) scatter.resize(cfg.scatter_sample);
  out.window_scatter_sample = std::move(scatter);

  for (const auto& s : stats) out.geobody_counts.push_back(s.geobodies);
  out.geobody_mean = mean(out.geobody_counts);
  return out;
}

}  // namespace facies_qc
