#include <jumplab/geometry.hpp>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace jumplab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec raw_normal(const Jacobian& jac) {
  if (jac.cols() == 1) {
    Vec nrm = make_vec({-jac(1, 0), jac(0, 0)});
    return nrm;
  }
  const Eigen::Vector3d a = jac.col(0).head<3>();
  const Eigen::Vector3d b = jac.col(1).head<3>();
  const Eigen::Vector3d c = a.cross(b);
  return make_vec({c[0], c[1], c[2]});
}

void check_rank(const Jacobian& jac) {
  double col_product = 1.0;
  for (Eigen::Index i = 0; i < jac.cols(); ++i) col_product *= jac.col(i).norm();
  const double area = area_element(jac);
  if (!(col_product > 0.0) || !(area > 1e-12 * col_product)) {
    throw DegenerateParametrization("patch Jacobian is rank deficient");
  }
}

}  // namespace

std::string to_string(Orientation o) {
  return o == Orientation::Outward ? "outward" : "graph-up";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "outward") return Orientation::Outward;
  if (s == "graph-up") return Orientation::GraphUp;
  throw SceneError("unknown orientation '" + s + "'");
}

double area_element(const Jacobian& jac) {
  if (jac.cols() == 1) return jac.col(0).norm();
  const double g11 = jac.col(0).squaredNorm();
  const double g22 = jac.col(1).squaredNorm();
  const double g12 = jac.col(0).dot(jac.col(1));
  return std::sqrt(std::max(0.0, g11 * g22 - g12 * g12));
}

double TangentFrame::distance_to_plane(const Vec& y) const {
  return std::abs((y - x).dot(normal));
}

// RectifiableSet ------------------------------------------------------------

RectifiableSet::RectifiableSet(int n, std::string shape, Orientation orientation)
    : n_(n), shape_(std::move(shape)), orientation_(orientation) {
  if (n < 1 || n > 2) throw DomainError("rectifiable sets are supported for n = 1, 2");
}

void RectifiableSet::add_patch(PatchPtr patch, double outward_sign) {
  if (!patch || patch->param_dim() != n_) throw DomainError("patch dimension mismatch");
  patches_.push_back(std::move(patch));
  outward_sign_.push_back(outward_sign < 0.0 ? -1.0 : 1.0);
  diameter_ = sampled_diameter();
}

Vec RectifiableSet::point(int patch_index, const Param& t) const {
  return patch(patch_index).point(t);
}

Vec RectifiableSet::normal(int patch_index, const Param& t) const {
  const Patch& p = patch(patch_index);
  const Jacobian jac = p.jacobian(t);
  check_rank(jac);
  Vec nrm = raw_normal(jac);
  nrm /= nrm.norm();
  if (orientation_ == Orientation::GraphUp) {
    const double h = nrm[nrm.size() - 1];
    if (h < 0.0 || (h == 0.0 && nrm[0] < 0.0)) nrm = -nrm;
  } else if (auto ref = p.outward_reference(t)) {
    if (nrm.dot(*ref) < 0.0) nrm = -nrm;
  } else {
    nrm *= outward_sign_.at(static_cast<std::size_t>(patch_index));
  }
  return nrm;
}

TangentFrame RectifiableSet::tangent_frame(int patch_index, const Param& t) const {
  const Jacobian jac = patch(patch_index).jacobian(t);
  check_rank(jac);
  TangentFrame frame;
  frame.x = point(patch_index, t);
  frame.basis = jac;
  // Gram-Schmidt, twice for the second column to keep orthogonality at 1e-16.
  frame.basis.col(0) /= frame.basis.col(0).norm();
  if (n_ == 2) {
    for (int pass = 0; pass < 2; ++pass) {
      frame.basis.col(1) -= frame.basis.col(0).dot(frame.basis.col(1)) * frame.basis.col(0);
    }
    frame.basis.col(1) /= frame.basis.col(1).norm();
  }
  frame.normal = normal(patch_index, t);
  // Re-project the normal so the frame is orthonormal to roundoff.
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < n_; ++i) {
      frame.normal -= frame.basis.col(i).dot(frame.normal) * frame.basis.col(i);
    }
  }
  frame.normal /= frame.normal.norm();
  return frame;
}

TangentFrame tangent_frame(const RectifiableSet& set, int patch, const Param& t) {
  return set.tangent_frame(patch, t);
}

SurfacePoint RectifiableSet::surface_point(int patch_index, const Param& t) const {
  return SurfacePoint{patch_index, t, point(patch_index, t)};
}

double RectifiableSet::sampled_diameter() const {
  if (patches_.empty()) return 0.0;
  Vec lo = Vec::Constant(ambient_dim(), std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  constexpr int kSamples = 64;
  for (const auto& p : patches_) {
    const Param a = p->lower();
    const Param b = p->upper();
    const int m1 = n_ == 2 ? kSamples : 1;
    for (int i = 0; i <= kSamples; ++i) {
      for (int k = 0; k <= (n_ == 2 ? m1 : 0); ++k) {
        Param t(n_);
        t[0] = a[0] + (b[0] - a[0]) * i / kSamples;
        if (n_ == 2) t[1] = a[1] + (b[1] - a[1]) * k / m1;
        const Vec x = p->point(t);
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
      }
    }
  }
  return (hi - lo).norm();
}

std::optional<SurfacePoint> RectifiableSet::locate(const Vec& y, double tol) const {
  if (y.size() != ambient_dim()) throw DomainError("point dimension does not match set");
  std::optional<SurfacePoint> best;
  double best_dist = std::numeric_limits<double>::infinity();
  const int coarse = n_ == 1 ? 256 : 48;
  for (int pi = 0; pi < static_cast<int>(patches_.size()); ++pi) {
    const Patch& p = *patches_[static_cast<std::size_t>(pi)];
    const Param a = p.lower();
    const Param b = p.upper();
    Param t0(n_);
    double d0 = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= coarse; ++i) {
      for (int k = 0; k <= (n_ == 2 ? coarse : 0); ++k) {
        Param t(n_);
        t[0] = a[0] + (b[0] - a[0]) * i / coarse;
        if (n_ == 2) t[1] = a[1] + (b[1] - a[1]) * k / coarse;
        const double d = (p.point(t) - y).squaredNorm();
        if (d < d0) {
          d0 = d;
          t0 = t;
        }
      }
    }
    // Gauss-Newton projection, clamped to the parameter box.
    Param t = t0;
    for (int it = 0; it < 50; ++it) {
      const Vec r = p.point(t) - y;
      const Jacobian jac = p.jacobian(t);
      const Eigen::MatrixXd j = jac;
      const Eigen::MatrixXd g = j.transpose() * j;
      const Eigen::VectorXd rhs = j.transpose() * Eigen::VectorXd(r);
      if (g.determinant() == 0.0) break;
      const Eigen::VectorXd step = g.ldlt().solve(rhs);
      Param next = t;
      for (int i = 0; i < n_; ++i) next[i] = std::clamp(t[i] - step[i], a[i], b[i]);
      const double moved = (next - t).norm();
      t = next;
      if (moved < 1e-15 * (1.0 + t.norm())) break;
    }
    const double d = (p.point(t) - y).norm();
    if (d < best_dist) {
      best_dist = d;
      best = SurfacePoint{pi, t, p.point(t)};
    }
  }
  if (!best || best_dist > tol) return std::nullopt;
  return best;
}

// Cone ----------------------------------------------------------------------

Cone::Cone(Vec apex, Vec axis, double aperture)
    : apex_(std::move(apex)), axis_(std::move(axis)), aperture_(aperture) {
  if (!(aperture > 0.0 && aperture < 1.0)) throw DomainError("cone aperture must lie in (0, 1)");
  const double len = axis_.norm();
  if (!(len > 0.0)) throw DomainError("cone axis must be nonzero");
  if (std::abs(len - 1.0) > 1e-12) axis_ /= len;
  if (apex_.size() != axis_.size()) throw DomainError("cone apex/axis dimension mismatch");
}

bool Cone::contains(const Vec& y) const {
  const Vec d = y - apex_;
  return d.dot(axis_) > aperture_ * d.norm();
}

// Patches -------------------------------------------------------------------

SegmentPatch::SegmentPatch(Vec a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() != 2 || b_.size() != 2) throw DomainError("segments live in R^2");
}

Vec SegmentPatch::point(const Param& t) const { return a_ + t[0] * (b_ - a_); }

Jacobian SegmentPatch::jacobian(const Param&) const {
  Jacobian j(2, 1);
  j.col(0) = b_ - a_;
  return j;
}

ArcPatch::ArcPatch(Vec center, double radius, double theta0, double theta1)
    : center_(std::move(center)), radius_(radius), theta0_(theta0), theta1_(theta1) {
  if (!(radius > 0.0)) throw DomainError("arc radius must be positive");
}

Vec ArcPatch::point(const Param& t) const {
  return center_ + radius_ * make_vec({std::cos(t[0]), std::sin(t[0])});
}

Jacobian ArcPatch::jacobian(const Param& t) const {
  Jacobian j(2, 1);
  j(0, 0) = -radius_ * std::sin(t[0]);
  j(1, 0) = radius_ * std::cos(t[0]);
  return j;
}

std::optional<Vec> ArcPatch::outward_reference(const Param& t) const {
  return make_vec({std::cos(t[0]), std::sin(t[0])});
}

FourierGraphPatch::FourierGraphPatch(double s0, double s1, std::vector<double> sin_coeffs,
                                     std::vector<double> cos_coeffs, double offset)
    : s0_(s0), s1_(s1), sin_(std::move(sin_coeffs)), cos_(std::move(cos_coeffs)), offset_(offset) {
  if (!(s1 > s0)) throw DomainError("graph interval must be nonempty");
}

double FourierGraphPatch::height(double s) const {
  double h = offset_;
  for (std::size_t k = 0; k < sin_.size(); ++k) h += sin_[k] * std::sin(static_cast<double>(k + 1) * s);
  for (std::size_t k = 0; k < cos_.size(); ++k) h += cos_[k] * std::cos(static_cast<double>(k + 1) * s);
  return h;
}

double FourierGraphPatch::slope(double s) const {
  double d = 0.0;
  for (std::size_t k = 0; k < sin_.size(); ++k) {
    const double kk = static_cast<double>(k + 1);
    d += kk * sin_[k] * std::cos(kk * s);
  }
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double kk = static_cast<double>(k + 1);
    d -= kk * cos_[k] * std::sin(kk * s);
  }
  return d;
}

Vec FourierGraphPatch::point(const Param& t) const { return make_vec({t[0], height(t[0])}); }

Jacobian FourierGraphPatch::jacobian(const Param& t) const {
  Jacobian j(2, 1);
  j(0, 0) = 1.0;
  j(1, 0) = slope(t[0]);
  return j;
}

SpherePatch::SpherePatch(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
  if (center_.size() != 3) throw DomainError("spheres live in R^3");
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
}

Param SpherePatch::lower() const { return make_param({0.0, 0.0}); }
Param SpherePatch::upper() const { return make_param({std::numbers::pi, kTwoPi}); }

Vec SpherePatch::point(const Param& t) const {
  const double st = std::sin(t[0]);
  return center_ + radius_ * make_vec({st * std::cos(t[1]), st * std::sin(t[1]), std::cos(t[0])});
}

Jacobian SpherePatch::jacobian(const Param& t) const {
  const double st = std::sin(t[0]), ct = std::cos(t[0]);
  const double sp = std::sin(t[1]), cp = std::cos(t[1]);
  Jacobian j(3, 2);
  j.col(0) = radius_ * make_vec({ct * cp, ct * sp, -st});
  j.col(1) = radius_ * make_vec({-st * sp, st * cp, 0.0});
  return j;
}

std::optional<Vec> SpherePatch::outward_reference(const Param& t) const {
  return point(t) - center_;
}

PolyGraphPatch::PolyGraphPatch(Param lo, Param hi, std::vector<std::vector<double>> coeffs)
    : lo_(std::move(lo)), hi_(std::move(hi)), c_(std::move(coeffs)) {
  if (lo_.size() != 2 || hi_.size() != 2 || !(hi_[0] > lo_[0]) || !(hi_[1] > lo_[1])) {
    throw DomainError("poly-graph needs a nonempty rectangle");
  }
}

Vec PolyGraphPatch::point(const Param& t) const {
  double z = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    for (std::size_t k = 0; k < c_[i].size(); ++k) {
      z += c_[i][k] * std::pow(t[0], static_cast<double>(i)) * std::pow(t[1], static_cast<double>(k));
    }
  }
  return make_vec({t[0], t[1], z});
}

Jacobian PolyGraphPatch::jacobian(const Param& t) const {
  double zx = 0.0, zy = 0.0;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    for (std::size_t k = 0; k < c_[i].size(); ++k) {
      const double di = static_cast<double>(i), dk = static_cast<double>(k);
      if (i > 0) zx += c_[i][k] * di * std::pow(t[0], di - 1.0) * std::pow(t[1], dk);
      if (k > 0) zy += c_[i][k] * dk * std::pow(t[0], di) * std::pow(t[1], dk - 1.0);
    }
  }
  Jacobian j(3, 2);
  j.col(0) = make_vec({1.0, 0.0, zx});
  j.col(1) = make_vec({0.0, 1.0, zy});
  return j;
}

DiskPatch::DiskPatch(Vec center, Vec e1, Vec e2, double radius)
    : center_(std::move(center)), e1_(std::move(e1)), e2_(std::move(e2)), radius_(radius) {
  if (!(radius > 0.0)) throw DomainError("disc radius must be positive");
}

Param DiskPatch::upper() const { return make_param({radius_, kTwoPi}); }

Vec DiskPatch::point(const Param& t) const {
  return center_ + t[0] * (std::cos(t[1]) * e1_ + std::sin(t[1]) * e2_);
}

Jacobian DiskPatch::jacobian(const Param& t) const {
  Jacobian j(3, 2);
  j.col(0) = std::cos(t[1]) * e1_ + std::sin(t[1]) * e2_;
  j.col(1) = t[0] * (-std::sin(t[1]) * e1_ + std::cos(t[1]) * e2_);
  return j;
}

// Builders ------------------------------------------------------------------

RectifiableSet make_segment(const Vec& a, const Vec& b) {
  RectifiableSet set(1, "segment", Orientation::GraphUp);
  set.add_patch(std::make_shared<SegmentPatch>(a, b));
  return set;
}

RectifiableSet make_circle(const Vec& center, double radius) {
  RectifiableSet set(1, "circle", Orientation::Outward);
  set.add_patch(std::make_shared<ArcPatch>(center, radius, 0.0, kTwoPi));
  return set;
}

RectifiableSet make_polyline(const std::vector<Vec>& vertices, bool closed, Orientation orientation) {
  if (vertices.size() < 2) throw SceneError("polyline needs at least two vertices");
  double outward_sign = 1.0;
  if (orientation == Orientation::Outward) {
    if (!closed) throw SceneError("outward orientation needs a closed polyline");
    double area2 = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const Vec& p = vertices[i];
      const Vec& q = vertices[(i + 1) % vertices.size()];
      area2 += p[0] * q[1] - q[0] * p[1];
    }
    if (area2 == 0.0) throw SceneError("closed polyline encloses no area");
    // The raw normal (-t_y, t_x) points left, i.e. inward for counterclockwise loops.
    outward_sign = area2 > 0.0 ? -1.0 : 1.0;
  }
  RectifiableSet set(1, "polyline", orientation);
  const std::size_t edges = closed ? vertices.size() : vertices.size() - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    const Vec& p = vertices[i];
    const Vec& q = vertices[(i + 1) % vertices.size()];
    if ((q - p).norm() == 0.0) throw SceneError("polyline has a zero-length edge");
    set.add_patch(std::make_shared<SegmentPatch>(p, q), outward_sign);
  }
  return set;
}

RectifiableSet make_fourier_graph(double s0, double s1, std::vector<double> sin_coeffs,
                                  std::vector<double> cos_coeffs) {
  RectifiableSet set(1, "fourier-graph", Orientation::GraphUp);
  set.add_patch(std::make_shared<FourierGraphPatch>(s0, s1, std::move(sin_coeffs), std::move(cos_coeffs)));
  return set;
}

RectifiableSet make_sphere(const Vec& center, double radius) {
  RectifiableSet set(2, "sphere", Orientation::Outward);
  set.add_patch(std::make_shared<SpherePatch>(center, radius));
  return set;
}

RectifiableSet make_poly_graph(const Param& lo, const Param& hi,
                               std::vector<std::vector<double>> coeffs) {
  RectifiableSet set(2, "poly-graph", Orientation::GraphUp);
  set.add_patch(std::make_shared<PolyGraphPatch>(lo, hi, std::move(coeffs)));
  return set;
}

RectifiableSet make_flat_piece(const TangentFrame& frame, double radius) {
  if (frame.n() == 1) {
    const Vec e = frame.basis.col(0);
    RectifiableSet set(1, "flat-piece", Orientation::GraphUp);
    set.add_patch(std::make_shared<SegmentPatch>(frame.x - radius * e, frame.x + radius * e));
    return set;
  }
  RectifiableSet set(2, "flat-piece", Orientation::GraphUp);
  set.add_patch(std::make_shared<DiskPatch>(frame.x, frame.basis.col(0), frame.basis.col(1), radius));
  return set;
}

std::vector<SurfacePoint> default_evaluation_points(const RectifiableSet& set, int count) {
  if (count < 1) throw DomainError("need at least one evaluation point");
  if (set.empty()) throw DomainError("set has no patches");
  std::vector<SurfacePoint> points;
  const int patches = static_cast<int>(set.patch_count());
  auto grid = [](double lo, double hi, int i, int m) {
    const double w = hi - lo;
    if (m == 1) return lo + 0.5 * w;
    return lo + w * (0.01 + 0.98 * static_cast<double>(i) / static_cast<double>(m - 1));
  };
  for (int p = 0; p < patches; ++p) {
    const int share = count / patches + (p < count % patches ? 1 : 0);
    if (share == 0) continue;
    const Param lo = set.patch(p).lower();
    const Param hi = set.patch(p).upper();
    if (set.n() == 1) {
      for (int i = 0; i < share; ++i) {
        points.push_back(set.surface_point(p, make_param({grid(lo[0], hi[0], i, share)})));
      }
    } else {
      const int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(share))));
      int taken = 0;
      for (int i = 0; i < m && taken < share; ++i) {
        for (int k = 0; k < m && taken < share; ++k, ++taken) {
          points.push_back(set.surface_point(
              p, make_param({grid(lo[0], hi[0], i, m), grid(lo[1], hi[1], k, m)})));
        }
      }
    }
  }
  return points;
}

}  // namespace jumplab
