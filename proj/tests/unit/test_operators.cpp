#include <jumplab/operators.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace jumplab;

namespace {

constexpr double kPi = std::numbers::pi;

using SetPtr = std::shared_ptr<const RectifiableSet>;

SetPtr shared(RectifiableSet s) { return std::make_shared<const RectifiableSet>(std::move(s)); }

SetPtr unit_circle() { return shared(make_circle(make_vec({0, 0}), 1.0)); }

// Zero-density carrier far from everything, to host atoms.
SetPtr far_segment() { return shared(make_segment(make_vec({100, 100}), make_vec({101, 100}))); }

ExtrapolationConfig limit_cfg(double eps0 = 0.2) {
  ExtrapolationConfig c;
  c.eps0 = eps0;
  return c;
}

Vec random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  return v / v.norm();
}

}  // namespace

TEST(Operators, SingleAtom) {
  const Transform op(make_riesz(1));
  const Vec p = make_vec({2, 0});
  const RadonMeasure m(far_segment(), Density::zero(), {{p, 1.0}});
  const Vec x = make_vec({0, 0});
  const Vec t = truncated_transform(op, m, x, 0.5);
  EXPECT_LT((t - op.kernel().evaluate(x - p)).norm(), 1e-15);
  EXPECT_EQ(truncated_transform(op, m, x, 2.0).norm(), 0.0);
  EXPECT_EQ(truncated_transform(op, m, x, 3.0).norm(), 0.0);
}

TEST(Operators, SymmetricAtomPairCancelsExactly) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (const Kernel& k : {make_riesz(1), make_cauchy_power(1), make_cauchy_power(3)}) {
    const Transform op(k);
    for (int i = 0; i < 20; ++i) {
      const Vec x = make_vec({u(rng), u(rng)});
      const Vec p = make_vec({u(rng), u(rng)});
      const RadonMeasure m(far_segment(), Density::zero(), {{p, 1.5}, {2.0 * x - p, 1.5}});
      const double d = (x - p).norm();
      for (double eps : {1e-3 * d, 0.5 * d, 0.99 * d}) {
        EXPECT_LT(truncated_transform(op, m, x, eps).norm(), 1e-12);
      }
    }
  }
}

TEST(Operators, MaximalTransformExamples) {
  const Transform op(make_riesz(1));
  const std::vector<double> grid = {1e-3, 0.01, 0.1, 0.5, 2.0};
  const RadonMeasure single(far_segment(), Density::zero(), {{make_vec({0, 1}), 1.0}});
  EXPECT_NEAR(maximal_transform(op, single, make_vec({0, 0}), grid), 1.0, 1e-15);
  const RadonMeasure pair(far_segment(), Density::zero(), {{make_vec({0, 1}), 1.0}, {make_vec({0, -1}), 1.0}});
  EXPECT_LT(maximal_transform(op, pair, make_vec({0, 0}), grid), 1e-15);
  const RadonMeasure circle(unit_circle(), Density::constant(1.0));
  const double tstar = maximal_transform(op, circle, make_vec({1, 0}), grid);
  // |T_eps| = pi - 2 asin(eps / 2) on the unit circle, so the grid sup sits just below pi.
  EXPECT_NEAR(tstar, kPi - 2 * std::asin(5e-4), 1e-9);
  EXPECT_THROW(maximal_transform(op, circle, make_vec({1, 0}), {}), DomainError);
}

TEST(Operators, SegmentMidpointPrincipalValue) {
  const SetPtr seg = shared(make_segment(make_vec({-1, 0}), make_vec({1, 0})));
  const RadonMeasure m(seg, Density::constant(1.0));
  const SurfacePoint x = seg->surface_point(0, make_param({0.5}));
  for (const Kernel& k : {make_riesz(1), make_cauchy_power(1)}) {
    const LimitResult r = principal_value(Transform(k), m, x, limit_cfg());
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.value.norm(), 1e-10) << k.name();
  }
}

TEST(Operators, CirclePrincipalValueMatchesRiemannOracle) {
  const SetPtr c = unit_circle();
  const RadonMeasure m(c, Density::constant(1.0));
  const Transform op(make_riesz(1));
  const double t0 = 0.9;
  const SurfacePoint x = c->surface_point(0, make_param({t0}));
  // Brute force: 10^6 midpoint nodes, the ball excluded symmetrically about t0.
  const double eps = 1e-3;
  const int nodes = 1'000'000;
  const double h = 2 * kPi / nodes;
  Vec ref = Vec::Zero(2);
  for (int i = 0; i < nodes; ++i) {
    const double t = t0 + (i + 0.5) * h;
    const Vec y = make_vec({std::cos(t), std::sin(t)});
    if ((x.x - y).norm() > eps) ref += op.kernel().evaluate(x.x - y) * h;
  }
  const Vec te = truncated_transform(op, m, x.x, eps);
  EXPECT_LT((te - ref).norm(), 1e-6);
  const LimitResult pv = principal_value(op, m, x, limit_cfg());
  EXPECT_LT((pv.value - kPi * x.x).norm(), 1e-5);
}

TEST(Operators, LineNontangentialClosedForm) {
  const double L = 1e4;
  const SetPtr seg = shared(make_segment(make_vec({-L, 0}), make_vec({L, 0})));
  const RadonMeasure m(seg, Density::constant(1.0));
  const Transform op(make_riesz(1));
  for (double t : {1.0, 0.1, 1e-3}) {
    const Vec v = truncated_transform(op, m, make_vec({0, t}), 0.25 * t);
    EXPECT_NEAR(v[0], 0.0, 1e-10);
    EXPECT_NEAR(v[1], 2 * std::atan(L / t), 1e-9) << t;
  }
  const SurfacePoint x = seg->surface_point(0, make_param({0.5}));
  const LimitResult plus = nontangential_limit(op, m, x, Side::Plus, 0.5, 0.25, limit_cfg());
  const LimitResult minus = nontangential_limit(op, m, x, Side::Minus, 0.5, 0.25, limit_cfg());
  EXPECT_LT((plus.value - make_vec({0, kPi})).norm(), 1e-5);
  EXPECT_LT((minus.value - make_vec({0, -kPi})).norm(), 1e-5);
}

TEST(Operators, CircleJumpResiduals) {
  const SetPtr c = unit_circle();
  const RadonMeasure m(c, Density::constant(1.0));
  const Transform op(make_riesz(1));
  const SurfacePoint x = c->surface_point(0, make_param({0.0}));
  const JumpRecord r = jump_residuals(op, m, x, 0.5, 0.25, limit_cfg());
  EXPECT_LT((r.pv.value - make_vec({kPi, 0})).norm(), 1e-5);
  EXPECT_LT((r.plus.value - make_vec({2 * kPi, 0})).norm(), 1e-5);
  EXPECT_LT(r.minus.value.norm(), 1e-5);
  EXPECT_LT(r.residual_avg, 1e-5);
  EXPECT_LT(r.residual_jump, 1e-5);
  EXPECT_FALSE(r.trace.empty());
  EXPECT_GE(r.trace.front().residual_jump, r.trace.back().residual_jump);
}

TEST(Operators, OffSetAtomsHaveNoJump) {
  const SetPtr c = unit_circle();
  const RadonMeasure m(c, Density::zero(), {{make_vec({0.3, 0.2}), 1.0}, {make_vec({-2, 1}), -0.5}});
  const SurfacePoint x = c->surface_point(0, make_param({1.0}));
  const JumpRecord r = jump_residuals(Transform(make_cauchy_power(3)), m, x, 0.5, 0.25, limit_cfg());
  EXPECT_EQ(r.jump_rhs.norm(), 0.0);
  EXPECT_LT(r.residual_jump, 1e-6);
  EXPECT_LT(r.residual_avg, 1e-6);
}

TEST(Operators, PrincipalValueAtAtomRejected) {
  const SetPtr c = unit_circle();
  const Vec p = make_vec({1, 0});
  const RadonMeasure m(c, Density::constant(1.0), {{p, 1.0}});
  EXPECT_THROW(principal_value(Transform(make_riesz(1)), m, c->surface_point(0, make_param({0.0})), limit_cfg()),
               DomainError);
}

TEST(Operators, ConfigValidation) {
  const SetPtr c = unit_circle();
  const RadonMeasure m(c, Density::constant(1.0));
  const SurfacePoint x = c->surface_point(0, make_param({1.0}));
  const Transform op(make_riesz(1));
  EXPECT_THROW(nontangential_limit(op, m, x, Side::Plus, 0.5, 0.6, limit_cfg()), DomainError);
  EXPECT_THROW(nontangential_limit(op, m, x, Side::Plus, 1.0, 0.25, limit_cfg()), DomainError);
  ExtrapolationConfig bad = limit_cfg();
  bad.ratio = 1.0;
  EXPECT_THROW(principal_value(op, m, x, bad), DomainError);
  EXPECT_THROW(truncated_transform(op, m, x.x, 0.0), DomainError);
}

TEST(Operators, JumpConstantNumericExamples) {
  const JumpConstantEstimate r1 = jump_constant_numeric(make_riesz(1), make_vec({0, 1}));
  EXPECT_NEAR(r1.value[0], 0.0, 1e-12);
  EXPECT_NEAR(r1.value[1], kPi, 1e-8);
  const JumpConstantEstimate r2 = jump_constant_numeric(make_riesz(2), make_vec({0, 0, 1}));
  EXPECT_LT((r2.value - make_vec({0, 0, 2 * kPi})).norm(), 1e-6);
  EXPECT_GT(r1.tail_bound, 0.0);
}

TEST(Operators, JumpConstantOddInNormal) {
  std::mt19937_64 rng(21);
  for (const Kernel& k : {make_riesz(1), make_riesz(2), make_cauchy_power(3)}) {
    const Vec N = random_unit(rng, k.ambient_dim());
    const Vec a = jump_constant_numeric(k, N).value;
    const Vec b = jump_constant_numeric(k, -N).value;
    EXPECT_LT((a + b).norm(), 1e-10) << k.name();
  }
}

TEST(Operators, JumpConstantTailTruncation) {
  JumpConstantOptions o;
  o.include_tail = false;
  o.radius = 100.0;
  o.tol = 1.0;
  const JumpConstantEstimate e = jump_constant_numeric(make_riesz(1), make_vec({0, 1}), o);
  // The dropped tail is 2 (pi/2 - atan R).
  EXPECT_NEAR(e.value[1], 2 * std::atan(100.0), 1e-8);
  // The bound is empirical: sup of the integrand on |y| = R times the r^{-2} tail mass.
  EXPECT_NEAR(e.tail_bound, kPi - e.value[1], 1e-3 * e.tail_bound);
}

TEST(Operators, JumpConstantArgumentErrors) {
  EXPECT_THROW(jump_constant_numeric(make_riesz(1), make_vec({0, 2})), DomainError);
  EXPECT_THROW(jump_constant_numeric(make_riesz(1), make_vec({0, 0, 1})), DomainError);
}

TEST(Operators, Linearity) {
  const SetPtr c = unit_circle();
  const RadonMeasure m1(c, Density::constant(1.0), {{make_vec({0.2, 0.1}), 0.7}});
  const RadonMeasure m2(c, Density::trig(0, 0.0, {0.5}, {1.0}));
  const RadonMeasure mix = RadonMeasure::combine(2.0, m1, -3.0, m2);
  const Transform op(make_cauchy_power(3));
  for (double t : {0.3, 2.0}) {
    const Vec x = make_vec({std::cos(t), std::sin(t)});
    for (double eps : {0.5, 0.01}) {
      const Vec lhs = truncated_transform(op, mix, x, eps);
      const Vec rhs = 2.0 * truncated_transform(op, m1, x, eps) - 3.0 * truncated_transform(op, m2, x, eps);
      EXPECT_LT((lhs - rhs).norm(), 1e-10);
    }
  }
}

TEST(Operators, PlaneTranslationInvariance) {
  const Transform op(make_riesz(2));
  TangentFrame f;
  f.x = make_vec({0, 0, 0});
  f.basis = Jacobian::Zero(3, 2);
  f.basis(0, 0) = 1;
  f.basis(1, 1) = 1;
  f.normal = make_vec({0, 0, 1});
  TangentFrame g = f;
  const Vec shift = make_vec({0.7, -1.3, 0});
  g.x = f.x + shift;
  const RadonMeasure a(shared(make_flat_piece(f, 2.0)), Density::constant(1.0));
  const RadonMeasure b(shared(make_flat_piece(g, 2.0)), Density::constant(1.0));
  const Vec y = make_vec({0.2, 0.1, 0.3});
  const Vec ta = truncated_transform(op, a, y, 0.1);
  const Vec tb = truncated_transform(op, b, y + shift, 0.1);
  EXPECT_LT((ta - tb).norm(), 1e-9);
}

TEST(Operators, PlaneTransformHomogeneity) {
  // T(H^n restricted to L and B(0, A t))(t N) does not depend on t.
  for (int dim : {2, 3}) {
    const Transform op(make_riesz(dim - 1));
    TangentFrame f;
    f.x = Vec::Zero(dim);
    f.basis = Jacobian::Identity(dim, dim - 1);
    f.normal = Vec::Zero(dim);
    f.normal[dim - 1] = 1.0;
    std::vector<Vec> values;
    for (double t : {1.0, 0.01}) {
      const RadonMeasure m(shared(make_flat_piece(f, 3.0 * t)), Density::constant(1.0));
      values.push_back(full_transform(op, m, t * f.normal));
    }
    EXPECT_LT((values[0] - values[1]).norm(), 1e-8) << dim;
  }
}

TEST(Operators, FlatPlaneReflectionExamples) {
  TangentFrame f;
  f.x = make_vec({0, 0});
  f.basis = Jacobian::Zero(2, 1);
  f.basis(0, 0) = 1;
  f.normal = make_vec({0, 1});
  EXPECT_LT(flat_plane_reflection_check(make_riesz(1), f, make_vec({0, 1}), 5.0), 1e-12);
  EXPECT_LT(flat_plane_reflection_check(make_cauchy_power(3), f, make_vec({0, 1}), 5.0), 1e-12);
  EXPECT_THROW(flat_plane_reflection_check(make_riesz(1), f, make_vec({1, 0}), 5.0), DomainError);
}

TEST(Operators, FlatPlaneReflectionRandom) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RectifiableSet circle = make_circle(make_vec({0, 0}), 1.0);
  const RectifiableSet sphere = make_sphere(make_vec({0, 0, 0}), 1.0);
  for (int i = 0; i < 10; ++i) {
    const bool surf = i % 2 == 1;
    const TangentFrame f = surf ? sphere.tangent_frame(0, make_param({0.2 + 2.7 * u(rng), 6.2 * u(rng)}))
                                : circle.tangent_frame(0, make_param({6.2 * u(rng)}));
    const Kernel k = surf ? make_riesz(2) : (i % 4 == 0 ? make_riesz(1) : make_cauchy_power(3));
    const Vec dir = f.normal + 0.5 * (u(rng) - 0.5) * Vec(f.basis.col(0));
    const Vec y = f.x + (0.05 + u(rng)) * dir / dir.norm();
    EXPECT_LT(flat_plane_reflection_check(k, f, y, 1.0 + 4 * u(rng)), 1e-9);
  }
}

TEST(Operators, SymmetricDiagnosticsFlatLine) {
  const double L = 1e4;
  const SetPtr seg = shared(make_segment(make_vec({-L, 0}), make_vec({L, 0})));
  const RadonMeasure m(seg, Density::constant(1.0));
  const SurfacePoint x = seg->surface_point(0, make_param({0.5}));
  ConeSampling s;
  s.r_min = 1e-2;
  const SymmetricDiagnostics d =
      symmetric_diagnostics(Transform(make_riesz(1)), m, x, Vec::Zero(2), 0.1, 0.5, 0.25, s);
  EXPECT_GT(d.samples, 0);
  EXPECT_LT(d.sum, 1e-10);
  EXPECT_LT(d.difference, 1e-4);
}

TEST(Operators, SymmetricDiagnosticsNestedAndDecaying) {
  const SetPtr c = unit_circle();
  const RadonMeasure m(c, Density::constant(1.0));
  const SurfacePoint x = c->surface_point(0, make_param({0.5}));
  const Transform op(make_riesz(1));
  const Vec pv = kPi * x.x;
  ConeSampling s;
  s.r_min = 1e-2;
  double prev_sum = INFINITY, prev_diff = INFINITY;
  for (double delta : {0.4, 0.2, 0.1, 0.05}) {
    const SymmetricDiagnostics d = symmetric_diagnostics(op, m, x, pv, delta, 0.5, 0.25, s);
    EXPECT_LE(d.sum, prev_sum);
    EXPECT_LE(d.difference, prev_diff);
    prev_sum = d.sum;
    prev_diff = d.difference;
  }
  // Both decay like pi * delta here.
  EXPECT_LT(prev_sum, kPi * 0.05);
  EXPECT_LT(prev_diff, kPi * 0.05);
  EXPECT_EQ(symmetric_sum_diagnostic(op, m, x, pv, 0.05, 0.5, 0.25, s), prev_sum);
  EXPECT_EQ(symmetric_difference_diagnostic(op, m, x, pv, 0.05, 0.5, 0.25, s), prev_diff);
}

TEST(Operators, ConeSamplesNestAndLieInCone) {
  const RectifiableSet c = make_circle(make_vec({0, 0}), 1.0);
  const TangentFrame f = c.tangent_frame(0, make_param({1.0}));
  ConeSampling s;
  const auto big = cone_samples(f, 0.5, 0.2, s);
  const auto small = cone_samples(f, 0.5, 0.1, s);
  EXPECT_GT(big.size(), small.size());
  const Cone cone(f.x, f.normal, 0.5);
  for (const Vec& y : small) {
    EXPECT_TRUE(cone.contains(y));
    EXPECT_NE(std::find_if(big.begin(), big.end(), [&](const Vec& z) { return (z - y).norm() == 0.0; }), big.end());
  }
}

TEST(Operators, DoubleLayerCircle) {
  const SetPtr c = unit_circle();
  const Transform op = Transform::double_layer(1);
  EXPECT_NEAR(op.jump_coefficient(make_vec({0.6, 0.8}))[0], 0.5, 1e-14);
  for (const Density& d : {Density::constant(1.0), Density::trig(0, 0.0, {1.0}, {})}) {
    const RadonMeasure m(c, d);
    for (double t : {0.0, 2.0}) {
      const SurfacePoint x = c->surface_point(0, make_param({t}));
      const JumpRecord r = jump_residuals(op, m, x, 0.5, 0.25, limit_cfg());
      EXPECT_NEAR(0.5 * (r.plus.value[0] - r.minus.value[0]), 0.5 * r.density, 1e-4);
      EXPECT_LT(r.residual_avg, 1e-4);
    }
  }
  const RadonMeasure with_atom(c, Density::constant(1.0), {{make_vec({0.1, 0}), 1.0}});
  EXPECT_THROW(truncated_transform(op, with_atom, make_vec({1, 0}), 0.1), DomainError);
}
