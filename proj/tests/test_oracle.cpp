#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <gtest/gtest.h>

#include "stratint/harness.hpp"
#include "stratint/oracle.hpp"
#include "stratint/ordinary.hpp"
#include "stratint/paths.hpp"
#include "stratint/strat.hpp"

namespace {

using stratint::FunctionTuple;
using stratint::GridFunction;
using stratint::PiecewiseLinearPath;
using stratint::SimplexQuadSpec;

constexpr std::uint64_t kSeed = 1729;

TEST(BruteForceJ, OrderOneRecoversTerminalValue) {
  const PiecewiseLinearPath path = stratint::gen_transport(8.0, 1.0, {kSeed, 0});
  const double j1 =
      stratint::brute_force_J(stratint::unit_tuple(1, 1.0), path,
                              SimplexQuadSpec{1, 1 << 10});
  EXPECT_NEAR(j1, path.knot_values().back(), 1e-10);
}

TEST(BruteForceJ, ChordTriangle) {
  // unit slopes over {0 <= s1 <= s2 <= 1}: area 1/2
  const auto path = PiecewiseLinearPath::from_knots_values({0.0, 1.0}, {0.0, 1.0});
  const double j2 = stratint::brute_force_J(stratint::unit_tuple(2, 1.0), path,
                                            SimplexQuadSpec{2, 256});
  EXPECT_NEAR(j2, 0.5, 1e-12);
}

TEST(BruteForceJ, MatchesRecursiveEvaluator) {
  // Oracle mesh 2^12 vs recursion at delta 2^-14: distinct grids, so the gap
  // is an honest two-sided quadrature error, not a replay of one computation.
  const PiecewiseLinearPath path = stratint::gen_transport(8.0, 1.0, {kSeed, 1});
  for (int n = 2; n <= 3; ++n) {
    const FunctionTuple tuple = stratint::mixed_tuple(static_cast<std::size_t>(n), 1.0);
    const double brute =
        stratint::brute_force_J(tuple, path, SimplexQuadSpec{n, 1 << 12});
    const double rec = stratint::ordinary_multiple(tuple, path, 1.0 / (1 << 14))
                           .back()
                           .values.back();
    EXPECT_NEAR(brute, rec, 1e-4) << "n=" << n;
    EXPECT_GT(std::abs(brute - rec), 0.0) << "n=" << n;
  }
}

TEST(BruteForceJ, ArgumentErrors) {
  const auto path = PiecewiseLinearPath::from_knots_values({0.0, 1.0}, {0.0, 1.0});
  EXPECT_THROW(stratint::brute_force_J(stratint::unit_tuple(4, 1.0), path,
                                       SimplexQuadSpec{4, 64}),
               std::invalid_argument);
  EXPECT_THROW(stratint::brute_force_J(stratint::unit_tuple(2, 1.0), path,
                                       SimplexQuadSpec{2, 1}),
               std::invalid_argument);
  EXPECT_THROW(stratint::brute_force_J(stratint::unit_tuple(3, 1.0), path,
                                       SimplexQuadSpec{2, 64}),
               std::invalid_argument);
}

TEST(HermiteClosedForm, SmallOrders) {
  EXPECT_DOUBLE_EQ(stratint::hermite_ito_closed_form(0, 1.7, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(stratint::hermite_ito_closed_form(1, 1.7, 0.3), 1.7);
  for (double w : {-1.5, 0.0, 0.8, 2.0}) {
    for (double t : {0.25, 1.0}) {
      EXPECT_DOUBLE_EQ(stratint::hermite_ito_closed_form(2, w, t),
                       0.5 * (w * w - t));
      // recursion groups the cubic differently; allow a few ulps
      EXPECT_NEAR(stratint::hermite_ito_closed_form(3, w, t),
                  (w * w * w - 3.0 * t * w) / 6.0, 1e-15);
    }
  }
  EXPECT_DOUBLE_EQ(stratint::hermite_ito_closed_form(3, 2.0, 1.0), 1.0 / 3.0);
  EXPECT_THROW(stratint::hermite_ito_closed_form(-1, 0.0, 1.0),
               std::invalid_argument);
}

TEST(MidpointStrat, OrderOneRecoversPath) {
  const auto path = stratint::gen_brownian(1 << 10, 1.0, {kSeed, 2});
  const GridFunction out =
      stratint::midpoint_strat(stratint::unit_tuple(1, 1.0), path);
  for (std::size_t j = 0; j < out.values.size(); ++j)
    EXPECT_NEAR(out.values[j], path.values()[j], 1e-12);
}

TEST(MidpointStrat, OrderTwoUnitTelescopes) {
  // sum (W_{j-1} + W_j)/2 dW_j = W_N^2 / 2 exactly
  const auto path = stratint::gen_brownian(1 << 12, 1.0, {kSeed, 3});
  const GridFunction out =
      stratint::midpoint_strat(stratint::unit_tuple(2, 1.0), path);
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    const double w = path.values()[j];
    EXPECT_NEAR(out.values[j], 0.5 * w * w, 1e-12);
  }
}

TEST(MidpointStrat, TracksProductionMethods) {
  const auto path = stratint::gen_brownian(1 << 12, 1.0, {kSeed, 4});
  for (std::size_t n = 1; n <= 3; ++n) {
    const FunctionTuple tuple = stratint::mixed_tuple(n, 1.0);
    const GridFunction mid = stratint::midpoint_strat(tuple, path);
    const GridFunction gn =
        stratint::strat_integral(tuple, path, stratint::StratMethod::GnSum);
    EXPECT_LE(stratint::max_grid_gap(mid, gn), 0.05) << "n=" << n;
  }
}

TEST(TransportVariance, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(stratint::transport_variance(5.0, 0.0), 0.0);
  EXPECT_NEAR(stratint::transport_variance(1e6, 1.0), 1.0, 1e-6);
  // 1 - (1 - e^{-2})/2
  EXPECT_NEAR(stratint::transport_variance(1.0, 1.0), 0.5676676, 1e-6);
  EXPECT_THROW(stratint::transport_variance(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(stratint::transport_variance(1.0, -0.5), std::invalid_argument);
}

}  // namespace
