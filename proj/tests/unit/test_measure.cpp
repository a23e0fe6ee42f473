#include <jumplab/measure.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace jumplab;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const RectifiableSet> circle() {
  return std::make_shared<const RectifiableSet>(make_circle(make_vec({0, 0}), 1.0));
}

std::shared_ptr<const RectifiableSet> line() {
  return std::make_shared<const RectifiableSet>(make_segment(make_vec({-10, 0}), make_vec({10, 0})));
}

}  // namespace

TEST(Measure, DensityRegistry) {
  EXPECT_EQ(Density::constant(2.5)(make_param({0.3})), 2.5);
  const Density t = Density::trig(0, 1.0, {0.0, 2.0}, {3.0});
  EXPECT_NEAR(t(make_param({0.4})), 1.0 + 2.0 * std::cos(0.8) + 3.0 * std::sin(0.4), 1e-15);
  const Density p = Density::poly(1, {1.0, 0.0, -2.0});
  EXPECT_NEAR(p(make_param({9.0, 0.5})), 0.5, 1e-15);
  EXPECT_TRUE(Density::zero().is_zero());
  EXPECT_NEAR(t.scaled(2).plus(p)(make_param({0.4, 0.5})), 2 * t(make_param({0.4})) + 0.5, 1e-14);
}

TEST(Measure, DensityAtExamples) {
  const RadonMeasure unit(circle(), Density::constant(1.0));
  EXPECT_EQ(density_at(unit, make_vec({0, 1})), 1.0);
  const RadonMeasure cosine(circle(), Density::trig(0, 0.0, {1.0}, {}));
  EXPECT_NEAR(density_at(cosine, make_vec({1, 0})), 1.0, 1e-12);
  const RadonMeasure atoms_only(circle(), Density::zero(), {{make_vec({0.2, 0.1}), 4.0}});
  EXPECT_EQ(density_at(atoms_only, make_vec({0, -1})), 0.0);
}

TEST(Measure, DensityAtOffCarrier) {
  const RadonMeasure unit(circle(), Density::constant(1.0));
  EXPECT_THROW(density_at(unit, make_vec({0.5, 0.5})), DomainError);
}

TEST(Measure, DensityUnaffectedByAtoms) {
  const Density d = Density::trig(0, 0.5, {0.3}, {0.2});
  const RadonMeasure plain(circle(), d);
  const RadonMeasure with_atoms(circle(), d, {{make_vec({0.1, 0}), 7.0}, {make_vec({3, 3}), -2.0}});
  for (double t : {0.1, 1.0, 2.5, 4.0}) {
    const Vec x = make_vec({std::cos(t), std::sin(t)});
    EXPECT_EQ(density_at(plain, x), density_at(with_atoms, x));
  }
}

TEST(Measure, BallMassExamples) {
  const RadonMeasure l(line(), Density::constant(1.0));
  EXPECT_NEAR(ball_mass(l, make_vec({0.3, 0}), 1.0), 2.0, 1e-10);
  const RadonMeasure atom(line(), Density::zero(), {{make_vec({0.0, 0.5}), 3.0}});
  EXPECT_NEAR(ball_mass(atom, make_vec({0, 0}), 1.0), 3.0, 1e-14);
  const RadonMeasure both(line(), Density::constant(1.0), {{make_vec({0.0, 0.5}), -3.0}});
  EXPECT_NEAR(ball_mass(both, make_vec({0, 0}), 1.0), 5.0, 1e-10);
  const RadonMeasure c(circle(), Density::constant(1.0));
  EXPECT_NEAR(ball_mass(c, make_vec({0, 0}), 2.0), 2 * kPi, 1e-10);
}

TEST(Measure, BallMassUsesAbsoluteDensity) {
  const RadonMeasure c(circle(), Density::trig(0, 0.0, {1.0}, {}));
  // int |cos t| dt over the circle = 4
  EXPECT_NEAR(ball_mass(c, make_vec({0, 0}), 2.0), 4.0, 1e-8);
}

TEST(Measure, BallMassMonotone) {
  const RadonMeasure c(circle(), Density::trig(0, 1.0, {0.5}, {0.3}), {{make_vec({1.2, 0.1}), 0.5}});
  const Vec x = make_vec({1, 0});
  double prev = 0.0;
  for (double r = 0.01; r < 3.0; r *= 1.3) {
    const double m = ball_mass(c, x, r);
    EXPECT_GE(m, prev - 1e-12);
    prev = m;
  }
}

TEST(Measure, MaximalDensityExamples) {
  const RadonMeasure l(line(), Density::constant(1.0));
  const MaximalDensity md = maximal_density(l, make_vec({0, 0}), {0.01, 0.1, 1.0, 5.0});
  EXPECT_FALSE(md.infinite);
  EXPECT_NEAR(md.value, 2.0, 1e-9);

  const RadonMeasure far_atom(line(), Density::zero(), {{make_vec({0, 1}), 1.0}});
  EXPECT_NEAR(maximal_density(far_atom, make_vec({0, 0}), {0.5, 1.0, 2.0, 4.0}).value, 1.0, 1e-14);

  const RadonMeasure at_x(line(), Density::constant(1.0), {{make_vec({0, 0}), 1.0}});
  EXPECT_TRUE(maximal_density(at_x, make_vec({0, 0}), {0.1, 1.0}).infinite);
}

TEST(Measure, MaximalDensityGridRefinement) {
  const RadonMeasure c(circle(), Density::constant(1.0), {{make_vec({1.3, 0}), 0.2}});
  const Vec x = make_vec({1, 0});
  const std::vector<double> coarse = {0.05, 0.2, 0.8};
  std::vector<double> fine = coarse;
  for (double r : {0.1, 0.3, 0.35, 1.5}) fine.push_back(r);
  EXPECT_GE(maximal_density(c, x, fine).value, maximal_density(c, x, coarse).value);
}

TEST(Measure, DefaultRadii) {
  const auto r = default_radii(2.0);
  ASSERT_EQ(r.size(), 40u);
  EXPECT_NEAR(r.front(), 2e-4, 1e-18);
  EXPECT_NEAR(r.back(), 8.0, 1e-12);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GT(r[i], r[i - 1]);
}

TEST(Measure, Combine) {
  const auto c = circle();
  const RadonMeasure a(c, Density::constant(1.0), {{make_vec({0, 0}), 1.0}});
  const RadonMeasure b(c, Density::trig(0, 0.0, {1.0}, {}));
  const RadonMeasure m = RadonMeasure::combine(2.0, a, -1.0, b);
  EXPECT_NEAR(density_at(m, make_vec({1, 0})), 1.0, 1e-12);
  ASSERT_EQ(m.atoms().size(), 1u);
  EXPECT_EQ(m.atoms()[0].weight, 2.0);
  const RadonMeasure other(line(), Density::constant(1.0));
  EXPECT_THROW(RadonMeasure::combine(1.0, a, 1.0, other), DomainError);
}
