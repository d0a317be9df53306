#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "facies_qc/metrics.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace facies_qc;
using testutil::cat;
using testutil::points;

// ---------------------------------------------------------------------------
// percentile

TEST(Percentile, Examples) {
  std::vector<double> v{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(percentile(v, 0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(v, 100), 4.0);
  EXPECT_DOUBLE_EQ(percentile(v, 25), 1.75);
  std::vector<double> one{0.37};
  for (double p : {0.0, 13.0, 50.0, 100.0}) EXPECT_EQ(percentile(one, p), 0.37);
  EXPECT_THROW(percentile(std::vector<double>{}, 50), invalid_argument);
  EXPECT_THROW(percentile(v, 101), invalid_argument);
}

TEST(Percentile, TwoValueEnvelopeHandCase) {
  std::vector<double> g{0.2, 0.4};
  EXPECT_NEAR(percentile(g, 10), 0.22, 1e-15);
  EXPECT_NEAR(percentile(g, 90), 0.38, 1e-15);
}

// ---------------------------------------------------------------------------
// confusion and F1

TEST(Confusion, PerfectAgreement) {
  auto d = points({{0, 0, 1}, {0, 1, 1}, {1, 0, 0}, {1, 1, 0}}, {2, 2});
  auto c = confusion_at_points(cat({{1, 1}, {0, 0}}), d);
  EXPECT_EQ(c, (ConfusionCounts{2, 0, 0, 2}));
}

TEST(Confusion, HandEnumerated) {
  auto d = points({{0, 0, 1}, {0, 1, 1}, {1, 0, 0}, {1, 1, 0}}, {2, 2});
  auto c = confusion_at_points(cat({{1, 0}, {1, 0}}), d);
  EXPECT_EQ(c, (ConfusionCounts{1, 1, 1, 1}));
}

TEST(Confusion, AllMud) {
  auto d = points({{0, 0, 0}, {0, 1, 0}, {1, 1, 0}}, {2, 2});
  EXPECT_EQ(confusion_at_points(CategoricalGrid::filled({2, 2}, mud), d), (ConfusionCounts{0, 0, 0, 3}));
}

TEST(F1, Examples) {
  EXPECT_EQ(f1_score({2, 0, 0, 2}), 1.0);
  EXPECT_EQ(f1_score({2, 1, 1, 0}), 2.0 / 3.0);
  EXPECT_EQ(f1_score({0, 0, 0, 3}), 1.0);
  EXPECT_EQ(accuracy({0, 0, 0, 3}), 1.0);
  EXPECT_EQ(f1_score({0, 2, 1, 0}), 0.0);
  EXPECT_THROW(f1_score({0, 0, 0, 0}), invalid_argument);
}

TEST(F1, PropertiesOverAllSmallCounts) {
  for (std::size_t tp = 0; tp <= 6; ++tp)
    for (std::size_t fp = 0; fp <= 6; ++fp)
      for (std::size_t fn = 0; fn <= 6; ++fn)
        for (std::size_t tn = 0; tn <= 2; ++tn) {
          ConfusionCounts c{tp, fp, fn, tn};
          if (c.total() == 0) continue;
          const double f = f1_score(c);
          EXPECT_GE(f, 0.0);
          EXPECT_LE(f, 1.0);
          EXPECT_EQ(f == 1.0, fp + fn == 0);
          if (tp == 0 && fp + fn > 0) EXPECT_EQ(f, 0.0);
          if (tp > 0) EXPECT_NEAR(f, 2.0 * tp / (2.0 * tp + fp + fn), 1e-15);
        }
}

// ---------------------------------------------------------------------------
// entropy, pixel maps

TEST(Entropy, Examples) {
  auto a = cat({{1, 0}, {0, 1}});
  EXPECT_EQ(entropy_map(Ensemble({a, a, a})), RealGrid::filled({2, 2}, 0.0));

  auto z = CategoricalGrid::filled({1, 1}, 0), o = CategoricalGrid::filled({1, 1}, 1);
  EXPECT_EQ(entropy_map(Ensemble({z, o})).at(0, 0), 1.0);
  const double expect = -0.25 * std::log2(0.25) - 0.75 * std::log2(0.75);
  EXPECT_NEAR(entropy_map(Ensemble({o, z, z, z})).at(0, 0), expect, 1e-12);
  EXPECT_NEAR(expect, 0.8113, 1e-4);
}

TEST(Entropy, AtPoints) {
  auto zero = RealGrid::filled({4, 5}, 0.0);
  auto d = points({{0, 0, 1}, {3, 4, 0}}, {4, 5});
  EXPECT_EQ(entropy_at_points(zero, d), (std::vector<double>{0.0, 0.0}));
  std::vector<double> v(20, 0.0);
  v[2 * 5 + 3] = 0.5;
  EXPECT_EQ(entropy_at_points(RealGrid({4, 5}, v), points({{2, 3, 1}}, {4, 5})), std::vector<double>{0.5});
}

TEST(Entropy, RangeZeroIffUnanimousAndPermutationInvariant) {
  std::mt19937 rng(21);
  for (int t = 0; t < 30; ++t) {
    std::vector<CategoricalGrid> members;
    const int n = 2 + t % 5;
    for (int i = 0; i < n; ++i) members.push_back(testutil::random_grid(rng, 5, 6, 0.3));
    auto h = entropy_map(Ensemble(members));
    auto avg = pixel_average_map(Ensemble(members));
    for (std::size_t i = 0; i < h.size(); ++i) {
      EXPECT_GE(h.cells()[i], 0.0);
      EXPECT_LE(h.cells()[i], 1.0);
      const bool unanimous = avg.cells()[i] == 0.0 || avg.cells()[i] == 1.0;
      EXPECT_EQ(h.cells()[i] == 0.0, unanimous);
    }
    std::shuffle(members.begin(), members.end(), rng);
    EXPECT_EQ(entropy_map(Ensemble(members)), h);
  }
}

TEST(PixelMaps, Examples) {
  auto a = cat({{1, 0, 1}});
  EXPECT_EQ(pixel_dispersion_map(Ensemble({a, a})), RealGrid::filled({1, 3}, 0.0));
  auto z = CategoricalGrid::filled({2, 2}, 0), o = CategoricalGrid::filled({2, 2}, 1);
  EXPECT_EQ(pixel_average_map(Ensemble({z, o})), RealGrid::filled({2, 2}, 0.5));
  EXPECT_EQ(pixel_dispersion_map(Ensemble({z, o})), RealGrid::filled({2, 2}, 0.25));
}

TEST(PixelMaps, DispersionIsBernoulliVariance) {
  std::mt19937 rng(4);
  for (int t = 0; t < 20; ++t) {
    std::vector<CategoricalGrid> members;
    for (int i = 0; i < 7; ++i) members.push_back(testutil::random_grid(rng, 6, 6, 0.4));
    Ensemble e(members);
    auto m = pixel_average_map(e), d = pixel_dispersion_map(e);
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(d.cells()[i], m.cells()[i] * (1 - m.cells()[i]), 1e-12);
  }
}

// ---------------------------------------------------------------------------
// proportions

TEST(Proportion, Examples) {
  EXPECT_EQ(facies_proportion(CategoricalGrid::filled({3, 3}, channel)), 1.0);
  std::vector<FaciesCode> cells(100, 0);
  for (int i = 0; i < 28; ++i) cells[i * 3] = 1;
  EXPECT_DOUBLE_EQ(facies_proportion(CategoricalGrid({10, 10}, cells)), 0.28);
}

TEST(ProportionHistogram, SingleMemberOneBar) {
  std::mt19937 rng(1);
  auto g = testutil::random_grid(rng, 8, 8, 0.3);
  for (double w : {0.01, 0.05, 0.1, 0.25}) {
    auto h = proportion_histogram(Ensemble({g}), channel, w);
    EXPECT_EQ(h.total(), 1u);
    EXPECT_EQ(std::count_if(h.counts.begin(), h.counts.end(), [](auto c) { return c > 0; }), 1);
  }
}

TEST(ProportionHistogram, HandBinning) {
  // Proportions 0.1, 0.1, 0.3 on 10-cell grids.
  auto mk = [](int ones) {
    std::vector<FaciesCode> c(10, 0);
    for (int i = 0; i < ones; ++i) c[i] = 1;
    return CategoricalGrid({1, 10}, c);
  };
  auto h = proportion_histogram(Ensemble({mk(1), mk(1), mk(3)}), channel, 0.1);
  ASSERT_EQ(h.counts.size(), 10u);
  EXPECT_EQ(h.counts[1], 2u);
  EXPECT_EQ(h.counts[3], 1u);
  EXPECT_EQ(h.total(), 3u);
  EXPECT_DOUBLE_EQ(h.edges[1], 0.1);
  EXPECT_DOUBLE_EQ(h.edges[4], 0.4);
  // Closed last bin.
  auto full = proportion_histogram(Ensemble({mk(10)}), channel, 0.1);
  EXPECT_EQ(full.counts.back(), 1u);
}

// ---------------------------------------------------------------------------
// moving windows

TEST(MovingWindow, Examples) {
  auto all = CategoricalGrid::filled({5, 5}, channel);
  for (std::size_t w : {1u, 2u, 5u}) {
    auto p = moving_window_proportions(all, channel, w, 1);
    for (double v : p.cells()) EXPECT_EQ(v, 1.0);
  }
  auto g = cat({{1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}});
  EXPECT_EQ(moving_window_proportions(g, channel, 2, 2), RealGrid({2, 2}, {1.0, 0.0, 0.0, 0.0}));
  EXPECT_THROW(moving_window_proportions(g, channel, 5, 1), invalid_argument);
  EXPECT_THROW(moving_window_proportions(g, channel, 2, 0), invalid_argument);
}

TEST(MovingWindow, MatchesRecountOracle) {
  std::mt19937 rng(77);
  for (int t = 0; t < 40; ++t) {
    const std::size_t rows = 3 + t % 6, cols = 3 + (t * 7) % 6;
    auto cells = oracle::random_cells(rng, rows, cols, 0.4, 3);
    auto g = testutil::from_cells(cells, 3);
    for (int code = 0; code < 3; ++code)
      for (std::size_t w = 1; w <= std::min(rows, cols); ++w)
        for (std::size_t s = 1; s <= 3; ++s) {
          auto got = moving_window_proportions(g, static_cast<FaciesCode>(code), w, s);
          auto want = oracle::window_proportions(cells, code, w, s);
          ASSERT_EQ(got.n_rows(), want.size());
          ASSERT_EQ(got.n_cols(), want[0].size());
          for (std::size_t i = 0; i < want.size(); ++i)
            for (std::size_t j = 0; j < want[0].size(); ++j) EXPECT_EQ(got.at(i, j), want[i][j]);
        }
  }
}

TEST(WindowScatter, IdenticalGridsOnDiagonal) {
  std::mt19937 rng(8);
  auto g = testutil::random_grid(rng, 12, 12);
  for (const auto& p : window_scatter(g, g, channel, 4, 1)) EXPECT_EQ(p.ti, p.realization);
}

TEST(WindowEnvelope, BinsByTiProportion) {
  auto ti = cat({{1, 1, 0, 0}, {1, 1, 0, 0}});
  auto r = cat({{1, 0, 0, 0}, {1, 0, 0, 1}});
  auto env = window_envelope(ti, Ensemble({r}), channel, 2, 2, {0, 100}, 0.5);
  ASSERT_EQ(env.bins.size(), 2u);
  EXPECT_EQ(env.bins[0].ti_lo, 0.0);   // TI window 0.0 holds realization 0.25
  EXPECT_EQ(env.bins[0].lower, 0.25);
  EXPECT_EQ(env.bins[1].ti_hi, 1.0);   // TI window 1.0 holds realization 0.5
  EXPECT_EQ(env.bins[1].upper, 0.5);
}

// ---------------------------------------------------------------------------
// semivariograms

TEST(Semivariogram, Examples) {
  auto constant = CategoricalGrid::filled({6, 6}, channel);
  for (const auto& l : directional_semivariogram(constant, channel, major_direction, 4).lags) EXPECT_EQ(l.gamma, 0.0);

  auto stripes = cat({{0, 1, 0, 1}, {0, 1, 0, 1}, {0, 1, 0, 1}, {0, 1, 0, 1}});
  auto major = directional_semivariogram(stripes, channel, major_direction, 2);
  ASSERT_EQ(major.lags.size(), 2u);
  EXPECT_EQ(major.lags[0].gamma, 0.5);
  EXPECT_EQ(major.lags[1].gamma, 0.0);
  for (const auto& l : directional_semivariogram(stripes, channel, minor_direction, 3).lags) EXPECT_EQ(l.gamma, 0.0);
}

TEST(Semivariogram, LagsWithoutPairsOmitted) {
  auto g = cat({{0, 1, 0}});
  auto sv = directional_semivariogram(g, channel, major_direction, 5);
  ASSERT_EQ(sv.lags.size(), 2u);
  EXPECT_TRUE(directional_semivariogram(g, channel, minor_direction, 5).lags.empty());
}

TEST(Semivariogram, MatchesPairOracleIncludingDiagonals) {
  std::mt19937 rng(31);
  const std::vector<Direction> dirs{{0, 1}, {1, 0}, {1, 1}, {1, -1}, {2, 1}};
  for (int t = 0; t < 30; ++t) {
    const std::size_t rows = 2 + t % 7, cols = 2 + (t * 5) % 7;
    auto cells = oracle::random_cells(rng, rows, cols, 0.35, 3);
    auto g = testutil::from_cells(cells, 3);
    for (auto d : dirs) {
      for (int code : {0, 1, 2}) {
        auto got = directional_semivariogram(g, static_cast<FaciesCode>(code), d, 8);
        auto want = oracle::semivariogram(cells, code, static_cast<int>(d.d_row), static_cast<int>(d.d_col), 8);
        ASSERT_EQ(got.lags.size(), want.size());
        for (std::size_t k = 0; k < want.size(); ++k) {
          EXPECT_EQ(got.lags[k].h, want[k].h);
          EXPECT_EQ(got.lags[k].n_pairs, want[k].pairs);
          EXPECT_NEAR(got.lags[k].gamma, want[k].gamma, 1e-12);
        }
      }
    }
  }
}

TEST(Semivariogram, BoundedAndSymmetricUnderFaciesSwap) {
  std::mt19937 rng(2);
  for (int t = 0; t < 30; ++t) {
    auto cells = oracle::random_cells(rng, 10, 12, 0.3);
    auto swapped = cells;
    for (auto& row : swapped)
      for (auto& v : row) v = 1 - v;
    for (auto d : {major_direction, minor_direction}) {
      auto a = directional_semivariogram(testutil::from_cells(cells), channel, d, 6);
      auto b = directional_semivariogram(testutil::from_cells(swapped), channel, d, 6);
      ASSERT_EQ(a.lags.size(), b.lags.size());
      for (std::size_t k = 0; k < a.lags.size(); ++k) {
        EXPECT_GE(a.lags[k].gamma, 0.0);
        EXPECT_LE(a.lags[k].gamma, 0.5);
        EXPECT_EQ(a.lags[k].gamma, b.lags[k].gamma);
      }
    }
  }
}

TEST(SemivariogramEnvelope, IdenticalMembersCollapse) {
  std::mt19937 rng(6);
  auto g = testutil::random_grid(rng, 9, 9);
  auto env = ensemble_semivariogram_envelope(Ensemble({g, g, g}), channel, major_direction, 4, {10, 90});
  auto sv = directional_semivariogram(g, channel, major_direction, 4);
  for (std::size_t k = 0; k < sv.lags.size(); ++k) {
    EXPECT_EQ(env.lower[k], sv.lags[k].gamma);
    EXPECT_EQ(env.upper[k], sv.lags[k].gamma);
  }
}

TEST(SemivariogramEnvelope, OrderInvariant) {
  std::mt19937 rng(12);
  std::vector<CategoricalGrid> m;
  for (int i = 0; i < 6; ++i) m.push_back(testutil::random_grid(rng, 10, 10, 0.3));
  auto a = ensemble_semivariogram_envelope(Ensemble(m), channel, minor_direction, 5, {10, 90});
  std::reverse(m.begin(), m.end());
  auto b = ensemble_semivariogram_envelope(Ensemble(m), channel, minor_direction, 5, {10, 90});
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.upper, b.upper);
}

// ---------------------------------------------------------------------------
// geobodies

TEST(Geobodies, Examples) {
  EXPECT_EQ(count_geobodies(CategoricalGrid::filled({4, 4}, mud)).count, 0u);
  auto diag = cat({{1, 0}, {0, 1}});
  EXPECT_EQ(count_geobodies(diag, channel, Connectivity::eight).count, 1u);
  EXPECT_EQ(count_geobodies(diag, channel, Connectivity::four).count, 2u);
}

TEST(Geobodies, LabelsAreConsistent) {
  auto g = cat({{1, 1, 0, 1}, {0, 0, 0, 1}, {1, 0, 1, 1}});
  auto l = count_geobodies(g, channel, Connectivity::four);
  EXPECT_EQ(l.count, 3u);
  EXPECT_EQ(l.at(0, 0), 1u);
  EXPECT_EQ(l.at(0, 1), 1u);
  EXPECT_EQ(l.at(0, 3), 2u);
  EXPECT_EQ(l.at(2, 2), 2u);
  EXPECT_EQ(l.at(2, 0), 3u);
  EXPECT_EQ(l.at(1, 0), 0u);
}

TEST(Geobodies, MatchesFloodFillOracle) {
  std::mt19937 rng(404);
  for (int t = 0; t < 200; ++t) {
    const std::size_t rows = 1 + t % 8, cols = 1 + (t * 3) % 8;
    auto cells = oracle::random_cells(rng, rows, cols, 0.2 + 0.1 * (t % 6), 3);
    auto g = testutil::from_cells(cells, 3);
    for (int code : {0, 1, 2}) {
      for (auto conn : {Connectivity::four, Connectivity::eight}) {
        EXPECT_EQ(count_geobodies(g, static_cast<FaciesCode>(code), conn).count,
                  oracle::geobodies(cells, code, static_cast<int>(conn)));
      }
    }
  }
}

TEST(Geobodies, SnakeNeedsLabelMerging) {
  // A U shape whose arms meet only at the bottom row exercises union-find merging.
  auto g = cat({{1, 0, 1, 0, 1}, {1, 0, 1, 0, 1}, {1, 1, 1, 1, 1}});
  EXPECT_EQ(count_geobodies(g, channel, Connectivity::four).count, 1u);
  auto v = cat({{1, 0, 0, 0, 1}, {0, 1, 0, 1, 0}, {0, 0, 1, 0, 0}});
  EXPECT_EQ(count_geobodies(v, channel, Connectivity::eight).count, 1u);
  EXPECT_EQ(count_geobodies(v, channel, Connectivity::four).count, 5u);
}
