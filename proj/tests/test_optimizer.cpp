#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "facies_qc/optimizer.hpp"

using namespace facies_qc;

namespace {

ObjectiveFunction quadratic{1, [](std::span<const double> x) { return (x[0] - 3) * (x[0] - 3); }};
ObjectiveFunction absolute{1, [](std::span<const double> x) { return std::fabs(x[0] - 2); }};
ObjectiveFunction rosenbrock{2, [](std::span<const double> x) {
                               return (1 - x[0]) * (1 - x[0]) + 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]);
                             }};
ObjectiveFunction sphere5{5, [](std::span<const double> x) {
                            double s = 0;
                            for (double v : x) s += v * v;
                            return s;
                          }};

}  // namespace

TEST(Minimize, Quadratic) {
  OptOptions o;
  auto r = minimize(quadratic, std::vector<double>{0.0}, o);
  EXPECT_NEAR(r.x_opt[0], 3.0, 1e-4);
  EXPECT_TRUE(r.converged);
}

TEST(Minimize, NonSmoothAbsolute) {
  auto r = minimize(absolute, std::vector<double>{0.0}, {});
  EXPECT_NEAR(r.x_opt[0], 2.0, 1e-3);
}

TEST(Minimize, Rosenbrock) {
  OptOptions o;
  o.max_evaluations = 2000;
  auto r = minimize(rosenbrock, std::vector<double>{-1.2, 1.0}, o);
  EXPECT_NEAR(r.x_opt[0], 1.0, 1e-3);
  EXPECT_NEAR(r.x_opt[1], 1.0, 1e-3);
}

TEST(Minimize, SphereFromSeededStarts) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<double> x0(5);
    for (auto& v : x0) v = u(rng);
    OptOptions o;
    o.seed = seed;
    o.max_evaluations = 2000;
    auto r = minimize(sphere5, x0, o);
    for (double v : r.x_opt) EXPECT_NEAR(v, 0.0, 1e-3) << "seed " << seed;
  }
}

TEST(Minimize, TraceIsReproducibleAndBestSoFarMonotone) {
  OptOptions o;
  o.record_trace = true;
  o.seed = 42;
  o.max_evaluations = 400;
  auto a = minimize(rosenbrock, std::vector<double>{-1.2, 1.0}, o);
  auto b = minimize(rosenbrock, std::vector<double>{-1.2, 1.0}, o);
  ASSERT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.x_opt, b.x_opt);
  EXPECT_EQ(a.trace.size(), a.evaluations);
  double best = INFINITY;
  std::vector<double> running;
  for (double v : a.trace) running.push_back(best = std::min(best, v));
  EXPECT_TRUE(std::is_sorted(running.rbegin(), running.rend()));
  EXPECT_EQ(best, a.f_opt);
}

TEST(Minimize, RespectsBudgetPerRestart) {
  OptOptions o;
  o.max_evaluations = 50;
  o.restarts = 3;
  o.tolerance = 1e-300;
  auto r = minimize(rosenbrock, std::vector<double>{-1.2, 1.0}, o);
  EXPECT_LE(r.evaluations, 150u);
  EXPECT_FALSE(r.converged);
}

TEST(Minimize, DefaultBudgetScalesWithDimension) {
  EXPECT_EQ(effective_max_evaluations({}, 15), 7500u);
  OptOptions o;
  o.max_evaluations = 10;
  EXPECT_EQ(effective_max_evaluations(o, 15), 10u);
}

TEST(Minimize, StaysInsideBounds) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 20; ++t) {
    ObjectiveFunction f{3, [&](std::span<const double> x) {
                          double s = 0;
                          for (double v : x) s += (v - 10) * (v - 10);
                          return s;
                        }};
    OptOptions o;
    o.bounds = Bounds{{-1, -2, -3}, {1, 2, 3}};
    o.seed = static_cast<std::uint64_t>(t);
    std::vector<double> seen_lo(3, INFINITY), seen_hi(3, -INFINITY);
    ObjectiveFunction spy{3, [&](std::span<const double> x) {
                            for (int i = 0; i < 3; ++i) {
                              seen_lo[i] = std::min(seen_lo[i], x[i]);
                              seen_hi[i] = std::max(seen_hi[i], x[i]);
                            }
                            return f.fn(x);
                          }};
    auto r = minimize(spy, std::vector<double>{u(rng), u(rng), u(rng)}, o);
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(r.x_opt[i], o.bounds->lo[i]);
      EXPECT_LE(r.x_opt[i], o.bounds->hi[i]);
      EXPECT_GE(seen_lo[i], o.bounds->lo[i]);
      EXPECT_LE(seen_hi[i], o.bounds->hi[i]);
      EXPECT_NEAR(r.x_opt[i], o.bounds->hi[i], 1e-4);
    }
  }
}

TEST(Minimize, RestartsCanOnlyImprove) {
  // Two wells; restart noise may find the deeper one, never a worse answer.
  ObjectiveFunction f{1, [](std::span<const double> x) { return std::min((x[0] + 1) * (x[0] + 1), (x[0] - 2) * (x[0] - 2) - 0.5); }};
  OptOptions one;
  one.restarts = 1;
  auto a = minimize(f, std::vector<double>{-1.0}, one);
  OptOptions many;
  many.restarts = 8;
  many.initial_step = 3.0;
  auto b = minimize(f, std::vector<double>{-1.0}, many);
  EXPECT_LE(b.f_opt, a.f_opt);
  EXPECT_EQ(a.restart_index, 0u);
}

TEST(Minimize, RejectsBadArguments) {
  OptOptions o;
  EXPECT_THROW(minimize(quadratic, std::vector<double>{0.0, 1.0}, o), invalid_argument);
  o.max_evaluations = 2;
  EXPECT_THROW(minimize(quadratic, std::vector<double>{0.0}, o), invalid_argument);
  OptOptions r;
  r.restarts = 0;
  EXPECT_THROW(minimize(quadratic, std::vector<double>{0.0}, r), invalid_argument);
  OptOptions b;
  b.bounds = Bounds{{1}, {0}};
  EXPECT_THROW(minimize(quadratic, std::vector<double>{0.0}, b), invalid_argument);
}

TEST(Minimize, NonFiniteObjectiveFails) {
  ObjectiveFunction f{1, [](std::span<const double> x) { return x[0] > 0.2 ? NAN : x[0] * x[0]; }};
  EXPECT_THROW(minimize(f, std::vector<double>{0.0}, {}), optimizer_error);
}
