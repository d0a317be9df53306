#pragma once

// Derivative-free local minimization: Nelder-Mead with dimension-adaptive coefficients
// (Gao & Han, 2012), box bounds by projection, and seeded multi-start.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facies_qc/error.hpp"
#include "facies_qc/random.hpp"

namespace facies_qc {

struct ObjectiveFunction {
  std::size_t dimension = 0;
  std::function<double(std::span<const double>)> fn;
};

struct Bounds {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct OptOptions {
  /// Per restart. Zero selects 500 * dimension.
  std::size_t max_evaluations = 0;
  double initial_step = 0.5;
  /// Stop once every simplex vertex lies within this infinity-norm distance of the best one.
  double tolerance = 1e-6;
  std::optional<Bounds> bounds;
  std::uint64_t seed = 0;
  std::size_t restarts = 3;
  bool record_trace = false;
};

struct OptResult {
  std::vector<double> x_opt;
  double f_opt = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  bool converged = false;
  std::size_t restart_index = 0;
  /// Every objective value in evaluation order (only with record_trace).
  std::vector<double> trace;
};

namespace detail {

struct BudgetExhausted {};

class NelderMeadRun {
 public:
  NelderMeadRun(const ObjectiveFunction& f, const OptOptions& opts, std::size_t budget, OptResult& sink)
      : f_(f), opts_(opts), budget_(budget), sink_(sink), n_(f.dimension) {}

  struct Outcome {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    bool converged = false;
  };

  Outcome run(std::vector<double> start) {
    const std::size_t n = n_;
    const double dn = static_cast<double>(n);
    const double alpha = 1.0;
    const double beta = 1.0 + 2.0 / dn;
    const double gamma = 0.75 - 1.0 / (2.0 * dn);
    const double delta = 1.0 - 1.0 / dn;
    // n == 1 degenerates to gamma = 0.25, delta = 0: use the classic values there.
    const double contract = n > 1 ? gamma : 0.5;
    const double shrink = n > 1 ? delta : 0.5;

    project(start);
    std::vector<std::vector<double>> simplex{start};
    for (std::size_t i = 0; i < n; ++i) {
      auto v = start;
      v[i] += opts_.initial_step;
      if (opts_.bounds && v[i] > opts_.bounds->hi[i]) v[i] = start[i] - opts_.initial_step;
      project(v);
      simplex.push_back(std::move(v));
    }
    std::vector<double> fv;
    try {
      for (const auto& v : simplex) fv.push_back(eval(v));

      std::vector<std::size_t> order(n + 1);
      std::vector<double> centroid(n), xr(n), xe(n), xc(n);
      while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double size = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
          for (std::size_t i = 0; i < n; ++i) {
            size = std::max(size, std::fabs(simplex[order[k]][i] - simplex[best][i]));
          }
        }
        if (size <= opts_.tolerance) {
          best_.converged = true;
          break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
          for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[order[k]][i];
        }
        for (double& c : centroid) c /= dn;

        const auto& xw = simplex[worst];
        for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + alpha * (centroid[i] - xw[i]);
        project(xr);
        const double fr = eval(xr);

        if (fr < fv[best]) {
          for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + beta * (xr[i] - centroid[i]);
          project(xe);
          const double fe = eval(xe);
          if (fe < fr) replace(simplex, fv, worst, xe, fe);
          else replace(simplex, fv, worst, xr, fr);
          continue;
        }
        if (fr < fv[second]) {
          replace(simplex, fv, worst, xr, fr);
          continue;
        }
        bool accepted = false;
        if (fr < fv[worst]) {
          for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + contract * (xr[i] - centroid[i]);
          project(xc);
          const double fc = eval(xc);
          if (fc <= fr) {
            replace(simplex, fv, worst, xc, fc);
            accepted = true;
          }
        } else {
          for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] - contract * (centroid[i] - xw[i]);
          project(xc);
          const double fc = eval(xc);
          if (fc < fv[worst]) {
            replace(simplex, fv, worst, xc, fc);
            accepted = true;
          }
        }
        if (!accepted) {
          const auto xb = simplex[best];
          for (std::size_t k = 1; k <= n; ++k) {
            auto& v = simplex[order[k]];
            for (std::size_t i = 0; i < n; ++i) v[i] = xb[i] + shrink * (v[i] - xb[i]);
            project(v);
            fv[order[k]] = eval(v);
          }
        }
      }
    } catch (const BudgetExhausted&) {
    }
    return best_;
  }

 private:
  void project(std::vector<double>& x) const {
    if (!opts_.bounds) return;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], opts_.bounds->lo[i], opts_.bounds->hi[i]);
  }

  double eval(const std::vector<double>& x) {
    if (used_ >= budget_) throw BudgetExhausted{};
    ++used_;
    ++sink_.evaluations;
    const double v = f_.fn(x);
    if (!std::isfinite(v)) {
      throw optimizer_error("objective returned a non-finite value at evaluation " +
                            std::to_string(sink_.evaluations));
    }
    if (opts_.record_trace) sink_.trace.push_back(v);
    if (v < best_.f) {
      best_.f = v;
      best_.x = x;
    }
    return v;
  }

  static void replace(std::vector<std::vector<double>>& simplex, std::vector<double>& fv, std::size_t k,
                      const std::vector<double>& x, double f) {
    simplex[k] = x;
    fv[k] = f;
  }

  const ObjectiveFunction& f_;
  const OptOptions& opts_;
  std::size_t budget_;
  OptResult& sink_;
  std::size_t n_;
  std::size_t used_ = 0;
  Outcome best_;
};

}  // namespace detail

inline std::size_t effective_max_evaluations(const OptOptions& opts, std::size_t dimension) {
  return opts.max_evaluations == 0 ? 500 * dimension : opts.max_evaluations;
}

/// Minimizes f from x0. Restart 0 starts at x0; restart r > 0 starts at x0 plus seeded
/// N(0, initial_step^2) noise. The lowest f_opt wins, ties going to the earliest restart.
inline OptResult minimize(const ObjectiveFunction& f, std::span<const double> x0, const OptOptions& opts) {
  const std::size_t d = f.dimension;
  if (d == 0 || !f.fn) throw invalid_argument("objective needs a positive dimension and a callable");
  if (x0.size() != d) {
    throw invalid_argument("start vector has dimension " + std::to_string(x0.size()) + ", objective expects " +
                           std::to_string(d));
  }
  const std::size_t budget = effective_max_evaluations(opts, d);
  if (budget < d + 2) throw invalid_argument("max_evaluations must be at least dimension + 2");
  if (!(opts.tolerance > 0.0)) throw invalid_argument("tolerance must be positive");
  if (!(opts.initial_step > 0.0)) throw invalid_argument("initial_step must be positive");
  if (opts.restarts < 1) throw invalid_argument("restarts must be >= 1");
  if (opts.bounds) {
    const auto& b = *opts.bounds;
    if (b.lo.size() != d || b.hi.size() != d) throw invalid_argument("bounds dimension mismatch");
    for (std::size_t i = 0; i < d; ++i) {
      if (!(b.lo[i] <= b.hi[i])) throw invalid_argument("bounds require lo <= hi");
    }
  }

  OptResult result;
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    std::vector<double> start(x0.begin(), x0.end());
    if (r > 0) {
      Rng rng(derive_seed(opts.seed, stream_id("restart"), r));
      for (double& v : start) v += opts.initial_step * standard_normal(rng);
    }
    detail::NelderMeadRun run(f, opts, budget, result);
    auto outcome = run.run(std::move(start));
    if (outcome.f < result.f_opt) {
      result.f_opt = outcome.f;
      result.x_opt = std::move(outcome.x);
      result.converged = outcome.converged;
      result.restart_index = r;
    }
  }
  return result;
}

}  // namespace facies_qc
