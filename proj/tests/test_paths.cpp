#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "stratint/paths.hpp"
#include "stratint/stats.hpp"

namespace {

using stratint::DiscreteBrownianPath;
using stratint::PiecewiseLinearPath;
using stratint::RngSeed;

TEST(PiecewiseLinearPath, ConstructionInvariants) {
  EXPECT_THROW(PiecewiseLinearPath::from_knots_values({0.0}, {0.0}),
               std::invalid_argument);
  EXPECT_THROW(PiecewiseLinearPath::from_knots_values({0.1, 1.0}, {0.0, 1.0}),
               std::invalid_argument);
  EXPECT_THROW(PiecewiseLinearPath::from_knots_values({0.0, 0.5, 0.5}, {0.0, 1.0, 2.0}),
               std::invalid_argument);
  EXPECT_THROW(PiecewiseLinearPath::from_knots_values({0.0, 1.0}, {0.0, 1.0, 2.0}),
               std::invalid_argument);
}

TEST(PiecewiseLinearPath, EvalPathExamples) {
  const auto chord =
      PiecewiseLinearPath::from_knots_values({0.0, 1.0}, {0.0, 3.0});
  EXPECT_NEAR(chord.value(1.0 / 3.0), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(chord.value(0.0), 0.0);
  EXPECT_DOUBLE_EQ(chord.value(1.0), 3.0);

  const auto zig = PiecewiseLinearPath::from_knots_values({0.0, 0.4, 1.0},
                                                          {0.0, 2.0, -1.0});
  EXPECT_DOUBLE_EQ(zig.value(0.4), 2.0);  // exact at knots
  EXPECT_NEAR(zig.value(0.2), 1.0, 1e-15);  // midpoint = average of endpoints
  EXPECT_NEAR(zig.value(0.7), 0.5, 1e-15);
  EXPECT_THROW(zig.value(-0.1), std::domain_error);
  EXPECT_THROW(zig.value(1.1), std::domain_error);
  EXPECT_DOUBLE_EQ(zig.total_variation(), 5.0);
}

TEST(PiecewiseLinearPath, FromSlopesStoresExactSlopes) {
  const auto path = PiecewiseLinearPath::from_knots_slopes(
      {0.0, 0.5, 1.0}, 0.0, {-1.0, 1.0});
  // A=1, single Poisson event at t=0.5, m=1: W(t) = -t then t-1
  EXPECT_NEAR(path.value(0.25), -0.25, 1e-15);
  EXPECT_DOUBLE_EQ(path.value(0.5), -0.5);
  EXPECT_NEAR(path.value(0.75), -0.25, 1e-15);
  EXPECT_DOUBLE_EQ(path.value(1.0), 0.0);
  EXPECT_DOUBLE_EQ(path.slopes()[0], -1.0);
  EXPECT_DOUBLE_EQ(path.slopes()[1], 1.0);
}

TEST(GenBrownian, BasicContract) {
  EXPECT_THROW(stratint::gen_brownian(0, 1.0, {1, 0}), std::invalid_argument);
  EXPECT_THROW(stratint::gen_brownian(16, 0.0, {1, 0}), std::invalid_argument);

  const auto path = stratint::gen_brownian(256, 2.0, {11, 5});
  EXPECT_EQ(path.grid_size(), 256u);
  EXPECT_DOUBLE_EQ(path.values().front(), 0.0);
  EXPECT_DOUBLE_EQ(path.times().front(), 0.0);
  EXPECT_DOUBLE_EQ(path.times().back(), 2.0);
  EXPECT_DOUBLE_EQ(path.dt(), 2.0 / 256.0);

  const auto again = stratint::gen_brownian(256, 2.0, {11, 5});
  EXPECT_EQ(path.values(), again.values());  // bitwise determinism
}

TEST(GenBrownian, TerminalVarianceMatchesHorizon) {
  const std::size_t n = 1 << 14;
  const int seeds = 10000;
  std::vector<double> w(seeds);
  for (int s = 0; s < seeds; ++s)
    w[s] = stratint::gen_brownian(n, 1.0, {777, static_cast<std::uint64_t>(s)})
               .values()
               .back();
  const double v = stratint::sample_variance(w);
  EXPECT_GT(v, 0.97);
  EXPECT_LT(v, 1.03);
}

TEST(GenBrownian, IncrementsHaveGridVariance) {
  // pooled increments across seeds: variance ~ dt, negligible lag-1 correlation
  const std::size_t n = 128;
  const double dt = 1.0 / static_cast<double>(n);
  std::vector<double> incs;
  for (int s = 0; s < 200; ++s) {
    const auto path = stratint::gen_brownian(n, 1.0, {31337, static_cast<std::uint64_t>(s)});
    for (std::size_t j = 1; j <= n; ++j)
      incs.push_back(path.values()[j] - path.values()[j - 1]);
  }
  const double v = stratint::sample_variance(incs);
  const double se = std::sqrt(2.0 / (incs.size() - 1.0)) * dt;
  EXPECT_NEAR(v, dt, 4.0 * se);

  double lag1 = 0.0;
  for (std::size_t i = 1; i < incs.size(); ++i) lag1 += incs[i - 1] * incs[i];
  lag1 /= (static_cast<double>(incs.size() - 1) * dt);
  EXPECT_NEAR(lag1, 0.0, 4.0 / std::sqrt(static_cast<double>(incs.size())));
}

TEST(RestrictGrid, KeepsEveryStrideSample) {
  const auto path = stratint::gen_brownian(64, 1.0, {5, 0});
  const auto coarse = stratint::restrict_grid(path, 16);
  EXPECT_EQ(coarse.grid_size(), 16u);
  for (std::size_t j = 0; j <= 16; ++j)
    EXPECT_EQ(coarse.values()[j], path.values()[j * 4]);
  EXPECT_THROW(stratint::restrict_grid(path, 13), std::invalid_argument);
}

TEST(Polygonal, FullResolutionIsIdentity) {
  const auto path = stratint::gen_brownian(64, 1.0, {9, 2});
  const auto poly = stratint::polygonal(path, 64);
  EXPECT_EQ(poly.knot_count(), 65u);
  EXPECT_EQ(poly.knots(), path.times());
  EXPECT_EQ(poly.knot_values(), path.values());
}

TEST(Polygonal, SingleSegmentChord) {
  const auto path = stratint::gen_brownian(64, 1.0, {9, 3});
  const auto poly = stratint::polygonal(path, 1);
  EXPECT_EQ(poly.knot_count(), 2u);
  EXPECT_DOUBLE_EQ(poly.knots()[1], 1.0);
  EXPECT_EQ(poly.knot_values()[1], path.values().back());
  EXPECT_THROW(stratint::polygonal(path, 3), std::invalid_argument);
  EXPECT_THROW(stratint::polygonal(path, 0), std::invalid_argument);
}

TEST(Polygonal, AgreesWithBrownianAtItsKnots) {
  const auto path = stratint::gen_brownian(1 << 10, 1.0, {12, 4});
  const auto poly = stratint::polygonal(path, 32);
  const std::size_t stride = (1 << 10) / 32;
  for (std::size_t j = 0; j <= 32; ++j)
    EXPECT_EQ(poly.value(path.times()[j * stride]), path.values()[j * stride]);
}

TEST(Polygonal, SupDistanceNonIncreasingInM) {
  const std::size_t n = 1 << 13;
  const int seeds = 50;
  std::vector<double> prev_median(1, 1e300);
  std::vector<std::size_t> ms;
  for (std::size_t m = 1 << 4; m <= (1 << 10); m <<= 1) ms.push_back(m);
  std::vector<double> medians;
  for (std::size_t m : ms) {
    std::vector<double> sups(seeds);
    for (int s = 0; s < seeds; ++s) {
      const auto path =
          stratint::gen_brownian(n, 1.0, {2024, static_cast<std::uint64_t>(s)});
      const auto poly = stratint::polygonal(path, m);
      const std::vector<double> at = stratint::values_at(poly, path.times());
      double sup = 0.0;
      for (std::size_t j = 0; j <= n; ++j)
        sup = std::max(sup, std::abs(at[j] - path.values()[j]));
      sups[s] = sup;
    }
    medians.push_back(stratint::median(sups));
  }
  for (std::size_t i = 1; i < medians.size(); ++i)
    EXPECT_LE(medians[i], medians[i - 1]) << "m index " << i;
}

TEST(GenTransport, SlopesAlternateWithExactMagnitude) {
  for (double m : {1.0, 8.0, 100.0}) {
    const auto path = stratint::gen_transport(m, 1.0, {99, 17});
    const double root_m = std::sqrt(m);
    ASSERT_GE(path.knot_count(), 2u);
    EXPECT_DOUBLE_EQ(path.knots().front(), 0.0);
    EXPECT_DOUBLE_EQ(path.knots().back(), 1.0);
    EXPECT_DOUBLE_EQ(path.knot_values().front(), 0.0);
    for (std::size_t i = 0; i < path.slopes().size(); ++i) {
      EXPECT_EQ(std::abs(path.slopes()[i]), root_m);
      if (i > 0) {
        EXPECT_EQ(path.slopes()[i], -path.slopes()[i - 1]);
      }
    }
  }
}

TEST(GenTransport, LipschitzBound) {
  const double m = 64.0;
  const auto path = stratint::gen_transport(m, 1.0, {123, 5});
  const double root_m = std::sqrt(m);
  for (double s = 0.0; s <= 1.0; s += 0.01) {
    for (double t = s; t <= 1.0; t += 0.13) {
      EXPECT_LE(std::abs(path.value(t) - path.value(s)),
                root_m * (t - s) + 1e-12);
    }
  }
}

TEST(GenTransport, ArgumentErrors) {
  EXPECT_THROW(stratint::gen_transport(0.0, 1.0, {1, 0}), std::invalid_argument);
  EXPECT_THROW(stratint::gen_transport(1.0, 0.0, {1, 0}), std::invalid_argument);
}

TEST(GenTransport, MeanNearZero) {
  const int paths = 10000;
  std::vector<double> w(paths);
  for (int p = 0; p < paths; ++p)
    w[p] = stratint::gen_transport(100.0, 1.0, {555, static_cast<std::uint64_t>(p)})
               .value(1.0);
  const double m = stratint::mean(w);
  const double se = std::sqrt(stratint::sample_variance(w) / paths);
  EXPECT_NEAR(m, 0.0, 3.0 * se);
}

TEST(RefineGrid, Examples) {
  const auto trivial = PiecewiseLinearPath::from_knots_values({0.0, 1.0}, {0.0, 1.0});
  const std::vector<double> just_ends = stratint::refine_grid(trivial, 1.0);
  EXPECT_EQ(just_ends, (std::vector<double>{0.0, 1.0}));

  const auto path = PiecewiseLinearPath::from_knots_values({0.0, 0.3, 1.0},
                                                           {0.0, 1.0, 0.5});
  const std::vector<double> refined = stratint::refine_grid(path, 0.5);
  ASSERT_EQ(refined.size(), 4u);
  EXPECT_DOUBLE_EQ(refined[0], 0.0);
  EXPECT_DOUBLE_EQ(refined[1], 0.3);
  EXPECT_DOUBLE_EQ(refined[2], 0.5);
  EXPECT_DOUBLE_EQ(refined[3], 1.0);

  EXPECT_THROW(stratint::refine_grid(path, 0.0), std::invalid_argument);
}

TEST(RefineGrid, GapsBoundedAndKnotsPreserved) {
  const auto path = stratint::gen_transport(32.0, 1.0, {321, 0});
  const double delta = 1.0 / 512.0;
  const std::vector<double> refined = stratint::refine_grid(path, delta);
  EXPECT_DOUBLE_EQ(refined.front(), 0.0);
  EXPECT_DOUBLE_EQ(refined.back(), 1.0);
  for (std::size_t i = 1; i < refined.size(); ++i) {
    EXPECT_GT(refined[i], refined[i - 1]);
    EXPECT_LE(refined[i] - refined[i - 1], delta + 2e-12);
  }
  // every knot appears exactly once
  for (double knot : path.knots()) {
    int count = 0;
    for (double t : refined)
      if (t == knot) ++count;
    EXPECT_EQ(count, 1) << "knot " << knot;
  }
}

TEST(IntervalSlopes, MatchesSegments) {
  const auto path = PiecewiseLinearPath::from_knots_values({0.0, 0.5, 1.0},
                                                           {0.0, 1.0, 0.0});
  const std::vector<double> times{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> slopes = stratint::interval_slopes(path, times);
  EXPECT_DOUBLE_EQ(slopes[1], 2.0);
  EXPECT_DOUBLE_EQ(slopes[2], 2.0);
  EXPECT_DOUBLE_EQ(slopes[3], -2.0);
  EXPECT_DOUBLE_EQ(slopes[4], -2.0);
}

TEST(ValuesAt, MatchesPointEvaluation) {
  const auto path = stratint::gen_transport(16.0, 1.0, {44, 9});
  std::vector<double> times;
  for (int i = 0; i <= 100; ++i) times.push_back(i / 100.0);
  const std::vector<double> bulk = stratint::values_at(path, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    EXPECT_NEAR(bulk[i], path.value(times[i]), 1e-14);
  EXPECT_EQ(bulk.back(), path.knot_values().back());
}

TEST(WritePathCsv, RoundTripsAtFullPrecision) {
  const auto path = stratint::gen_transport(8.0, 1.0, {7, 3});
  std::ostringstream os;
  stratint::write_path_csv(os, path);
  std::istringstream is(os.str());
  std::string line;
  ASSERT_TRUE(std::getline(is, line));
  EXPECT_EQ(line, "t,w");
  std::size_t i = 0;
  while (std::getline(is, line)) {
    const std::size_t comma = line.find(',');
    ASSERT_NE(comma, std::string::npos);
    const double t = std::strtod(line.substr(0, comma).c_str(), nullptr);
    const double w = std::strtod(line.substr(comma + 1).c_str(), nullptr);
    ASSERT_LT(i, path.knot_count());
    EXPECT_EQ(t, path.knots()[i]);
    EXPECT_EQ(w, path.knot_values()[i]);
    ++i;
  }
  EXPECT_EQ(i, path.knot_count());
}

}  // namespace
