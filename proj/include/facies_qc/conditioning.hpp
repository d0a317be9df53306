#pragma once

// Well-data conditioning by latent optimization:
//
//   loss(z) = lambda * mean_{conditioned cells} |y - G(z)| + log(1 - clamp(D(G(z)(1 - M) + yM), eps, 1 - eps))
//
// M is a binary mask over the well cells, y the observed facies indicator there.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "facies_qc/checks.hpp"
#include "facies_qc/error.hpp"
#include "facies_qc/generator.hpp"
#include "facies_qc/grid.hpp"
#include "facies_qc/metrics.hpp"
#include "facies_qc/optimizer.hpp"
#include "facies_qc/parallel.hpp"
#include "facies_qc/random.hpp"

namespace facies_qc {

struct Mask {
  GridShape shape;
  std::vector<std::uint8_t> cells;
  double weight = 5.0;
  std::size_t conditioned_count = 0;
  /// Row-major indices of the ones, in conditioning-point order.
  std::vector<std::size_t> support;
};

/// Observed indicator on the mask support; NaN everywhere else.
struct DataImage {
  GridShape shape;
  std::vector<double> values;

  bool defined(std::size_t i) const { return !std::isnan(values[i]); }
};

inline std::pair<Mask, DataImage> build_mask(const ConditioningSet& data, GridShape shape, double lambda = 5.0,
                                             FaciesCode positive = channel) {
  if (data.empty()) throw invalid_argument("conditioning requires at least one data point");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw invalid_argument("lambda must be finite and >= 0");
  Mask mask{shape, std::vector<std::uint8_t>(shape.size(), 0), lambda, data.size(), {}};
  DataImage image{shape, std::vector<double>(shape.size(), std::numeric_limits<double>::quiet_NaN())};
  for (const auto& p : data.points()) {
    if (p.row >= shape.n_rows || p.col >= shape.n_cols) throw invalid_argument("conditioning point outside grid");
    const auto i = shape.index(p.row, p.col);
    mask.cells[i] = 1;
    mask.support.push_back(i);
    image.values[i] = p.value == positive ? 1.0 : 0.0;
  }
  return {std::move(mask), std::move(image)};
}

/// generated * (1 - M) + y * M.
inline RealGrid composite(const RealGrid& generated, const DataImage& data, const Mask& mask) {
  if (generated.shape() != mask.shape || data.shape != mask.shape) {
    throw invalid_argument("composite: generated grid, data image and mask must share a shape");
  }
  std::vector<double> out(generated.cells().begin(), generated.cells().end());
  for (std::size_t i : mask.support) out[i] = data.values[i];
  return RealGrid(mask.shape, std::move(out));
}

enum class DiscriminatorMode { plausibility, external };

inline const char* to_string(DiscriminatorMode m) {
  return m == DiscriminatorMode::plausibility ? "plausibility" : "external";
}

struct ConditioningConfig {
  double lambda = 5.0;
  double epsilon_clamp = 1e-6;
  OptOptions optimizer{};
  double threshold = 0.5;
  DiscriminatorMode discriminator_mode = DiscriminatorMode::plausibility;
  FaciesCode positive = channel;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw invalid_argument("lambda must be finite and >= 0");
    if (!(epsilon_clamp > 0.0 && epsilon_clamp < 0.5)) throw invalid_argument("epsilon_clamp must be in (0, 0.5)");
    if (!std::isfinite(threshold)) throw invalid_argument("threshold must be finite");
  }
};

/// Content term alone: weight * mean absolute misfit on the mask support.
inline double content_loss(const RealGrid& generated, const DataImage& data, const Mask& mask) {
  double sum = 0.0;
  for (std::size_t i : mask.support) sum += std::fabs(data.values[i] - generated.cells()[i]);
  return mask.weight * sum / static_cast<double>(mask.conditioned_count);
}

inline double adversarial_loss(double d_score, double epsilon) {
  return std::log(1.0 - std::clamp(d_score, epsilon, 1.0 - epsilon));
}

inline double conditioning_loss(const LatentVector& z, Generator& gen, Discriminator& disc, const DataImage& data,
                                const Mask& mask, const ConditioningConfig& cfg) {
  auto g = gen.generate(z);
  const double content = content_loss(g, data, mask);
  const double d = disc.score(composite(g, data, mask));
  return content + adversarial_loss(d, cfg.epsilon_clamp);
}

struct ConditionalRealization {
  CategoricalGrid grid;
  RealGrid raw;
  LatentVector z_opt;
  double loss_initial = 0.0;
  double loss_final = 0.0;
  double f1_at_data = 0.0;
  std::uint64_t seed = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::size_t restart_index = 0;
};

/// Starts from sample_latent(seed) and minimizes the conditioning loss over z.
inline ConditionalRealization condition(Generator& gen, Discriminator& disc, const ConditioningSet& data,
                                        GridShape shape, const ConditioningConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto info = gen.info();
  if (info.shape() != shape) {
    throw invalid_argument("generator produces " + to_string(info.shape()) + " grids, conditioning expects " +
                           to_string(shape));
  }
  auto [mask, image] = build_mask(data, shape, cfg.lambda, cfg.positive);

  const auto z0 = sample_latent(seed, info.latent_dim);
  std::optional<double> first;
  ObjectiveFunction objective{info.latent_dim, [&](std::span<const double> x) {
                                const double v = conditioning_loss(LatentVector({x.begin(), x.end()}), gen, disc,
                                                                   image, mask, cfg);
                                if (!first) first = v;
                                return v;
                              }};
  auto opts = cfg.optimizer;
  opts.seed = seed;
  auto res = minimize(objective, z0.values(), opts);

  ConditionalRealization out;
  out.z_opt = LatentVector(res.x_opt);
  out.raw = gen.generate(out.z_opt);
  out.grid = threshold_grid(out.raw, cfg.threshold);
  out.loss_initial = first.value_or(res.f_opt);
  out.loss_final = res.f_opt;
  out.f1_at_data = f1_score(confusion_at_points(out.grid, data, cfg.positive));
  out.seed = seed;
  out.evaluations = res.evaluations;
  out.converged = res.converged;
  out.restart_index = res.restart_index;
  return out;
}

/// N distinct cells drawn uniformly without replacement; values read from `truth`.
inline ConditioningSet sample_well_locations(const CategoricalGrid& truth, std::size_t n, std::uint64_t seed) {
  if (n < 1 || n > truth.size()) {
    throw invalid_argument("cannot sample " + std::to_string(n) + " wells from " + std::to_string(truth.size()) +
                           " cells");
  }
  Rng rng(seed);
  std::vector<std::size_t> idx(truth.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<ConditioningPoint> points;
  for (std::size_t k = 0; k < n; ++k) {
    const auto j = k + static_cast<std::size_t>(uniform_index(rng, idx.size() - k));
    std::swap(idx[k], idx[j]);
    const auto row = idx[k] / truth.n_cols(), col = idx[k] % truth.n_cols();
    points.push_back({row, col, truth.at(row, col)});
  }
  return ConditioningSet(std::move(points), truth.shape());
}

/// Thresholded G(sample_latent(seed_i)) for each seed.
inline std::vector<CategoricalGrid> unconditional_realizations(Generator& gen, const std::vector<std::uint64_t>& seeds,
                                                               double threshold = 0.5) {
  const auto dim = gen.info().latent_dim;
  auto one = [&](std::size_t i) { return threshold_grid(gen.generate(sample_latent(seeds[i], dim)), threshold); };
  if (gen.thread_safe()) return parallel_map(seeds.size(), one);
  std::vector<CategoricalGrid> out;
  for (std::size_t i = 0; i < seeds.size(); ++i) out.push_back(one(i));
  return out;
}

// ---------------------------------------------------------------------------
// Sweep over the number of conditioning wells

struct ExperimentConfig {
  std::vector<std::size_t> n_values{10, 20, 30, 40, 50, 60, 70, 80};
  std::size_t realizations_per_n = 20;
  std::size_t unconditional_count = 20;
  CategoricalGrid ti;
  CategoricalGrid truth;
  std::uint64_t master_seed = 0;
  ConditioningConfig conditioning{};
  CheckConfig checks{};

  void validate() const {
    if (n_values.empty()) throw invalid_argument("experiment needs at least one N value");
    for (std::size_t i = 0; i < n_values.size(); ++i) {
      if (n_values[i] < 1 || n_values[i] > truth.size()) throw invalid_argument("N value out of range");
      if (i > 0 && n_values[i] <= n_values[i - 1]) throw invalid_argument("N values must be strictly increasing");
    }
    if (realizations_per_n < 1) throw invalid_argument("realizations per N must be >= 1");
    if (unconditional_count < 1) throw invalid_argument("unconditional count must be >= 1");
    if (ti.shape() != truth.shape()) throw invalid_argument("TI and truth must share a shape");
    conditioning.validate();
  }
};

/// Seed layout; every seed used by an experiment derives from the master seed through these.
struct ExperimentSeeds {
  static std::uint64_t unconditional(std::uint64_t master, std::size_t i) {
    return derive_seed(master, stream_id("unconditional"), i);
  }
  static std::uint64_t wells(std::uint64_t master, std::size_t n) { return derive_seed(master, stream_id("wells"), n); }
  static std::uint64_t realization(std::uint64_t master, std::size_t n, std::size_t i) {
    return derive_seed(derive_seed(master, stream_id("conditional"), n), 0, i);
  }
};

struct ConditionalCase {
  std::size_t n = 0;
  std::uint64_t wells_seed = 0;
  ConditioningSet data;
  std::vector<ConditionalRealization> realizations;
  EnsembleCheck conditional;
  /// Unconditional ensemble scored at this case's wells.
  F1Check baseline_f1;
  std::vector<double> baseline_entropy_at_data;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string discriminator;
  std::string generator;
  TIReference ti_reference;
  std::vector<std::uint64_t> unconditional_seeds;
  EnsembleCheck unconditional;
  std::vector<ConditionalCase> cases;
};

/// Runs every (N, realization) conditioning job, then the check suite per N and once for
/// the unconditional baseline. Jobs run concurrently only when G and D are thread safe;
/// aggregation is always in (N, realization index) order.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, Generator& gen, Discriminator& disc) {
  cfg.validate();
  const auto shape = cfg.truth.shape();
  if (gen.info().shape() != shape) throw invalid_argument("generator shape does not match truth grid");

  ExperimentReport rep;
  rep.config = cfg;
  rep.generator = gen.info().name;
  rep.discriminator = disc.name();
  rep.ti_reference = compute_ti_reference(cfg.ti, cfg.checks);

  for (std::size_t i = 0; i < cfg.unconditional_count; ++i) {
    rep.unconditional_seeds.push_back(ExperimentSeeds::unconditional(cfg.master_seed, i));
  }
  Ensemble uncond(unconditional_realizations(gen, rep.unconditional_seeds, cfg.conditioning.threshold), "unconditional");
  rep.unconditional = check_ensemble(uncond, cfg.ti, nullptr, cfg.checks);

  for (std::size_t n : cfg.n_values) {
    ConditionalCase c;
    c.n = n;
    c.wells_seed = ExperimentSeeds::wells(cfg.master_seed, n);
    c.data = sample_well_locations(cfg.truth, n, c.wells_seed);
    rep.cases.push_back(std::move(c));
  }

  struct Job {
    std::size_t case_index;
    std::size_t realization;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < rep.cases.size(); ++k) {
    for (std::size_t i = 0; i < cfg.realizations_per_n; ++i) jobs.push_back({k, i});
  }
  auto run_job = [&](std::size_t j) {
    const auto& c = rep.cases[jobs[j].case_index];
    return condition(gen, disc, c.data, shape, cfg.conditioning,
                     ExperimentSeeds::realization(cfg.master_seed, c.n, jobs[j].realization));
  };
  std::vector<ConditionalRealization> results;
  if (gen.thread_safe() && disc.thread_safe()) {
    results = parallel_map(jobs.size(), run_job);
  } else {
    for (std::size_t j = 0; j < jobs.size(); ++j) results.push_back(run_job(j));
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    rep.cases[jobs[j].case_index].realizations.push_back(std::move(results[j]));
  }

  for (auto& c : rep.cases) {
    std::vector<CategoricalGrid> members;
    for (const auto& r : c.realizations) members.push_back(r.grid);
    Ensemble cond(std::move(members), "conditional(" + std::to_string(c.n) + ")");
    c.conditional = check_ensemble(cond, cfg.ti, &c.data, cfg.checks);
    c.baseline_f1 = f1_check(uncond, c.data, cfg.checks);
    c.baseline_entropy_at_data = entropy_at_points(rep.unconditional.entropy_map, c.data);
  }
  return rep;
}

}  // namespace facies_qc
