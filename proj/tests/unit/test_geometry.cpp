#include <jumplab/geometry.hpp>
#include <jumplab/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace jumplab;

namespace {

constexpr double kPi = std::numbers::pi;

// s -> (s^3, s^3): Jacobian vanishes at s = 0.
class CuspPatch final : public Patch {
 public:
  int param_dim() const override { return 1; }
  Param lower() const override { return make_param({-1.0}); }
  Param upper() const override { return make_param({1.0}); }
  Vec point(const Param& t) const override { return make_vec({t[0] * t[0] * t[0], t[0] * t[0] * t[0]}); }
  Jacobian jacobian(const Param& t) const override {
    Jacobian j(2, 1);
    j(0, 0) = 3 * t[0] * t[0];
    j(1, 0) = 3 * t[0] * t[0];
    return j;
  }
};

// The segment a -> b traversed with u in [-1, 2], phi(u) = a + (u + 1)/3 (b - a).
class StretchedSegment final : public Patch {
 public:
  StretchedSegment(Vec a, Vec b) : a_(std::move(a)), b_(std::move(b)) {}
  int param_dim() const override { return 1; }
  Param lower() const override { return make_param({-1.0}); }
  Param upper() const override { return make_param({2.0}); }
  Vec point(const Param& t) const override { return a_ + (t[0] + 1.0) / 3.0 * (b_ - a_); }
  Jacobian jacobian(const Param&) const override {
    Jacobian j(2, 1);
    j.col(0) = (b_ - a_) / 3.0;
    return j;
  }

 private:
  Vec a_, b_;
};

}  // namespace

TEST(Geometry, FlatGraphFrame) {
  const RectifiableSet line = make_segment(make_vec({-1, 0}), make_vec({1, 0}));
  const TangentFrame f = line.tangent_frame(0, make_param({0.5}));
  EXPECT_NEAR(f.x.norm(), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f.basis(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(f.basis(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(f.normal[0], 0.0, 1e-15);
  EXPECT_NEAR(f.normal[1], 1.0, 1e-15);
}

TEST(Geometry, CircleOutwardNormal) {
  const RectifiableSet c = make_circle(make_vec({0, 0}), 1.0);
  const TangentFrame f = c.tangent_frame(0, make_param({0.0}));
  EXPECT_NEAR(f.x[0], 1.0, 1e-15);
  EXPECT_NEAR(f.normal[0], 1.0, 1e-15);
  EXPECT_NEAR(f.normal[1], 0.0, 1e-15);
  for (double t : {0.3, 1.7, 3.0, 5.9}) {
    const Vec N = c.normal(0, make_param({t}));
    EXPECT_LT((N - c.point(0, make_param({t}))).norm(), 1e-14);
  }
}

TEST(Geometry, TiltedGraphNormal) {
  const RectifiableSet s = make_segment(make_vec({-1, -1}), make_vec({1, 1}));
  const Vec N = s.normal(0, make_param({0.5}));
  const Vec expected = make_vec({-1, 1}) / std::sqrt(2.0);
  EXPECT_LT((N - expected).norm(), 1e-15);  // graph-up: positive height component
}

TEST(Geometry, SphereOutwardNormalAndFrame) {
  const RectifiableSet s = make_sphere(make_vec({0.5, -1, 2}), 2.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.05, kPi - 0.05), ph(0.0, 2 * kPi);
  for (int i = 0; i < 100; ++i) {
    const Param t = make_param({th(rng), ph(rng)});
    const TangentFrame f = s.tangent_frame(0, t);
    EXPECT_LT((f.normal - (f.x - make_vec({0.5, -1, 2})) / 2.0).norm(), 1e-13);
    for (int a = 0; a < 2; ++a) {
      EXPECT_NEAR(f.basis.col(a).norm(), 1.0, 1e-12);
      EXPECT_LT(std::abs(f.basis.col(a).dot(f.normal)), 1e-12);
    }
    EXPECT_LT(std::abs(f.basis.col(0).dot(f.basis.col(1))), 1e-12);
  }
}

TEST(Geometry, GraphSurfaceNormalPointsUp) {
  const RectifiableSet g = make_poly_graph(make_param({-1, -1}), make_param({1, 1}), {{0, 0.5}, {0.3, 0.2}});
  for (double u : {-0.7, 0.0, 0.6}) {
    for (double v : {-0.5, 0.4}) {
      EXPECT_GT(g.normal(0, make_param({u, v}))[2], 0.0);
    }
  }
}

TEST(Geometry, FrameOrthonormalOnFourierGraph) {
  const RectifiableSet g = make_fourier_graph(0, 2 * kPi, {0.3, 0.1}, {0.2});
  for (int i = 1; i < 50; ++i) {
    const TangentFrame f = g.tangent_frame(0, make_param({2 * kPi * i / 50}));
    EXPECT_NEAR(f.basis.col(0).norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.normal.norm(), 1.0, 1e-12);
    EXPECT_LT(std::abs(f.basis.col(0).dot(f.normal)), 1e-12);
    EXPECT_GT(f.normal[1], 0.0);
  }
}

TEST(Geometry, DegenerateParametrization) {
  RectifiableSet s(1, "cusp", Orientation::GraphUp);
  s.add_patch(std::make_shared<CuspPatch>());
  EXPECT_THROW(s.tangent_frame(0, make_param({0.0})), DegenerateParametrization);
  EXPECT_NO_THROW(s.tangent_frame(0, make_param({0.5})));
}

TEST(Geometry, ConeExamples) {
  const Cone c(make_vec({0, 0}), make_vec({0, 1}), 0.5);
  EXPECT_TRUE(cone_contains(c, make_vec({0, 1})));
  EXPECT_FALSE(cone_contains(c, make_vec({1, 0.1})));
  EXPECT_FALSE(cone_contains(c, make_vec({0, 0})));
}

TEST(Geometry, ConeValidation) {
  EXPECT_THROW(Cone(make_vec({0, 0}), make_vec({0, 0}), 0.5), DomainError);
  EXPECT_THROW(Cone(make_vec({0, 0}), make_vec({0, 1}), 1.0), DomainError);
  EXPECT_THROW(Cone(make_vec({0, 0}), make_vec({0, 1}), 0.0), DomainError);
}

TEST(Geometry, ConeReflectionProperty) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> ap(0.05, 0.95);
  for (int i = 0; i < 2000; ++i) {
    const int dim = 2 + i % 2;
    Vec x(dim), u(dim), y(dim);
    for (int k = 0; k < dim; ++k) {
      x[k] = g(rng);
      u[k] = g(rng);
      y[k] = g(rng);
    }
    u /= u.norm();
    const double a = ap(rng);
    EXPECT_EQ(Cone(x, u, a).contains(y), Cone(x, -u, a).contains(2.0 * x - y));
  }
}

TEST(Geometry, ConePointsAreAwayFromTangentPlane) {
  const RectifiableSet c = make_circle(make_vec({0, 0}), 1.0);
  const TangentFrame f = c.tangent_frame(0, make_param({0.7}));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r(-2, 2);
  const double a = 0.4;
  const Cone cone(f.x, f.normal, a);
  int inside = 0;
  for (int i = 0; i < 5000; ++i) {
    const Vec y = f.x + make_vec({r(rng), r(rng)});
    if (!cone.contains(y)) continue;
    ++inside;
    EXPECT_GT(f.distance_to_plane(y), a * (y - f.x).norm());
  }
  EXPECT_GT(inside, 100);
}

TEST(Geometry, OrientationStrings) {
  EXPECT_EQ(orientation_from_string("outward"), Orientation::Outward);
  EXPECT_EQ(orientation_from_string("graph-up"), Orientation::GraphUp);
  EXPECT_EQ(to_string(Orientation::GraphUp), "graph-up");
  EXPECT_THROW(orientation_from_string("inward"), SceneError);
}

TEST(Geometry, PolylineOrientationFromSignedArea) {
  // Clockwise square: outward normals must still point away from the centre.
  const std::vector<Vec> cw = {make_vec({0, 0}), make_vec({0, 1}), make_vec({1, 1}), make_vec({1, 0})};
  const RectifiableSet sq = make_polyline(cw, true, Orientation::Outward);
  ASSERT_EQ(sq.patch_count(), 4u);
  for (int p = 0; p < 4; ++p) {
    const Vec x = sq.point(p, make_param({0.5}));
    const Vec N = sq.normal(p, make_param({0.5}));
    EXPECT_GT(N.dot(x - make_vec({0.5, 0.5})), 0.49);
  }
  EXPECT_THROW(make_polyline(cw, false, Orientation::Outward), SceneError);
  EXPECT_THROW(make_polyline({make_vec({0, 0})}, false), SceneError);
}

TEST(Geometry, DiameterAndLocate) {
  const RectifiableSet c = make_circle(make_vec({1, 1}), 2.0);
  EXPECT_NEAR(c.diameter(), 4.0 * std::sqrt(2.0), 1e-3);
  const auto hit = c.locate(make_vec({1 + 2 * std::cos(1.0), 1 + 2 * std::sin(1.0)}));
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->param[0], 1.0, 1e-9);
  EXPECT_FALSE(c.locate(make_vec({1, 1})).has_value());
}

TEST(Geometry, DefaultEvaluationPoints) {
  const RectifiableSet c = make_circle(make_vec({0, 0}), 1.0);
  const auto pts = default_evaluation_points(c, 4);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_NEAR(pts[0].param[0], 0.01 * 2 * kPi, 1e-12);
  for (const auto& p : pts) {
    EXPECT_GT(p.param[0], 0.0);
    EXPECT_LT(p.param[0], 2 * kPi);
  }
  EXPECT_EQ(default_evaluation_points(make_sphere(make_vec({0, 0, 0}), 1), 9).size(), 9u);
  EXPECT_THROW(default_evaluation_points(c, 0), DomainError);
}

TEST(Geometry, IntegrateMeasureExamples) {
  auto one = [](int, const Param&, const Vec&) { return make_vec({1.0}); };
  const RectifiableSet flat = make_segment(make_vec({0, 0}), make_vec({1, 0}));
  EXPECT_NEAR(integrate_measure(flat, 1, one)[0], 1.0, 1e-14);
  const RectifiableSet slope = make_segment(make_vec({0, 0}), make_vec({1, 1}));
  EXPECT_NEAR(integrate_measure(slope, 1, one)[0], std::sqrt(2.0), 1e-14);
}

TEST(Geometry, ReparametrizationInvariance) {
  const Vec a = make_vec({-0.3, 0.2}), b = make_vec({1.4, 0.9});
  RectifiableSet stretched(1, "segment", Orientation::GraphUp);
  stretched.add_patch(std::make_shared<StretchedSegment>(a, b));
  const RectifiableSet plain = make_segment(a, b);
  auto f = [](int, const Param&, const Vec& y) { return make_vec({std::exp(y[0]) * std::cos(3 * y[1]), y.squaredNorm()}); };
  const Vec c = make_vec({0.5, 0.55});
  for (const Region& r : {Region::everywhere(), Region::outside_ball(c, 0.3), Region::inside_ball(c, 0.3)}) {
    const Vec v1 = integrate_measure(plain, 2, f, r);
    const Vec v2 = integrate_measure(stretched, 2, f, r);
    EXPECT_LT((v1 - v2).norm(), 1e-10);
  }
}
