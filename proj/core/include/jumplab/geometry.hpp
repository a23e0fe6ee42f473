#pragma once

#include <jumplab/types.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace jumplab {

/// A smooth map from a parameter box [lower, upper] in R^n into R^{n+1}.
class Patch {
 public:
  virtual ~Patch() = default;

  virtual int param_dim() const = 0;
  int ambient_dim() const { return param_dim() + 1; }
  virtual Param lower() const = 0;
  virtual Param upper() const = 0;

  virtual Vec point(const Param& t) const = 0;
  /// Columns are the partial derivatives d(phi)/dt_i.
  virtual Jacobian jacobian(const Param& t) const = 0;

  /// Outward-pointing reference direction for closed shapes (phi - center for
  /// circles and spheres). Patches without one rely on a per-patch sign.
  virtual std::optional<Vec> outward_reference(const Param&) const { return std::nullopt; }
};

using PatchPtr = std::shared_ptr<const Patch>;

enum class Orientation {
  /// Normals point away from the enclosed region.
  Outward,
  /// Normals have a positive last coordinate (the graph height axis); ties go
  /// to a positive first coordinate.
  GraphUp,
};

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// sqrt(det(J^T J)), the H^n area element of a patch.
double area_element(const Jacobian& jac);

/// A point of the set together with the patch and parameter it came from.
struct SurfacePoint {
  int patch = 0;
  Param param;
  Vec x;
};

struct TangentFrame {
  Vec x;
  /// Orthonormal basis of the tangent plane L_x, one column per direction.
  Jacobian basis;
  Vec normal;

  int n() const { return static_cast<int>(basis.cols()); }
  /// Distance from y to the affine plane x + L_x.
  double distance_to_plane(const Vec& y) const;
};

/// Finite union of parametrized patches of common dimension n in R^{n+1}.
/// Immutable once built.
class RectifiableSet {
 public:
  RectifiableSet(int n, std::string shape, Orientation orientation);

  /// `outward_sign` is used only for Outward sets whose patch has no
  /// outward_reference; it multiplies the raw (rotated-tangent or
  /// cross-product) normal.
  void add_patch(PatchPtr patch, double outward_sign = 1.0);

  int n() const { return n_; }
  int ambient_dim() const { return n_ + 1; }
  const std::string& shape() const { return shape_; }
  Orientation orientation() const { return orientation_; }
  std::size_t patch_count() const { return patches_.size(); }
  const Patch& patch(int i) const { return *patches_.at(static_cast<std::size_t>(i)); }
  bool empty() const { return patches_.empty(); }

  Vec point(int patch, const Param& t) const;
  /// Unit normal fixed by the orientation rule. Throws DegenerateParametrization.
  Vec normal(int patch, const Param& t) const;
  TangentFrame tangent_frame(int patch, const Param& t) const;
  SurfacePoint surface_point(int patch, const Param& t) const;

  /// Diagonal of a sampled bounding box; 0 for the empty set.
  double diameter() const { return diameter_; }

  /// Closest point on the set if within `tol` (absolute), else nullopt.
  std::optional<SurfacePoint> locate(const Vec& y, double tol = 1e-9) const;

 private:
  int n_;
  std::string shape_;
  Orientation orientation_;
  std::vector<PatchPtr> patches_;
  std::vector<double> outward_sign_;
  double sampled_diameter() const;

  double diameter_ = 0.0;
};

/// Free-function spelling of RectifiableSet::tangent_frame.
TangentFrame tangent_frame(const RectifiableSet& set, int patch, const Param& t);

/// One-sided cone X_a(apex, axis) = { y : (y - apex).axis > a |y - apex| }.
class Cone {
 public:
  Cone(Vec apex, Vec axis, double aperture);

  const Vec& apex() const { return apex_; }
  const Vec& axis() const { return axis_; }
  double aperture() const { return aperture_; }

  /// Strict inequality; the apex is never inside.
  bool contains(const Vec& y) const;

 private:
  Vec apex_;
  Vec axis_;
  double aperture_;
};

inline bool cone_contains(const Cone& cone, const Vec& y) { return cone.contains(y); }

// Built-in patches.

class SegmentPatch final : public Patch {
 public:
  SegmentPatch(Vec a, Vec b);
  int param_dim() const override { return 1; }
  Param lower() const override { return make_param({0.0}); }
  Param upper() const override { return make_param({1.0}); }
  Vec point(const Param& t) const override;
  Jacobian jacobian(const Param& t) const override;

 private:
  Vec a_, b_;
};

class ArcPatch final : public Patch {
 public:
  ArcPatch(Vec center, double radius, double theta0, double theta1);
  int param_dim() const override { return 1; }
  Param lower() const override { return make_param({theta0_}); }
  Param upper() const override { return make_param({theta1_}); }
  Vec point(const Param& t) const override;
  Jacobian jacobian(const Param& t) const override;
  std::optional<Vec> outward_reference(const Param& t) const override;

 private:
  Vec center_;
  double radius_, theta0_, theta1_;
};

/// Curve graph s -> (s, F(s)) with F(s) = offset + sum_k a_k sin(k s) + b_k cos(k s).
class FourierGraphPatch final : public Patch {
 public:
  FourierGraphPatch(double s0, double s1, std::vector<double> sin_coeffs,
                    std::vector<double> cos_coeffs, double offset = 0.0);
  int param_dim() const override { return 1; }
  Param lower() const override { return make_param({s0_}); }
  Param upper() const override { return make_param({s1_}); }
  Vec point(const Param& t) const override;
  Jacobian jacobian(const Param& t) const override;
  double height(double s) const;
  double slope(double s) const;

 private:
  double s0_, s1_;
  std::vector<double> sin_, cos_;
  double offset_;
};

/// Sphere patch in polar/azimuth coordinates (theta in [0, pi], phi in [0, 2 pi]).
class SpherePatch final : public Patch {
 public:
  SpherePatch(Vec center, double radius);
  int param_dim() const override { return 2; }
  Param lower() const override;
  Param upper() const override;
  Vec point(const Param& t) const override;
  Jacobian jacobian(const Param& t) const override;
  std::optional<Vec> outward_reference(const Param& t) const override;

 private:
  Vec center_;
  double radius_;
};

/// Surface graph (x, y) -> (x, y, P(x, y)), P(x, y) = sum_{i,k} c[i][k] x^i y^k.
class PolyGraphPatch final : public Patch {
 public:
  PolyGraphPatch(Param lo, Param hi, std::vector<std::vector<double>> coeffs);
  int param_dim() const override { return 2; }
  Param lower() const override { return lo_; }
  Param upper() const override { return hi_; }
  Vec point(const Param& t) const override;
  Jacobian jacobian(const Param& t) const override;

 private:
  Param lo_, hi_;
  std::vector<std::vector<double>> c_;
};

/// Flat disc x + r (cos a e1 + sin a e2), r in [0, R], a in [0, 2 pi].
class DiskPatch final : public Patch {
 public:
  DiskPatch(Vec center, Vec e1, Vec e2, double radius);
  int param_dim() const override { return 2; }
  Param lower() const override { return make_param({0.0, 0.0}); }
  Param upper() const override;
  Vec point(const Param& t) const override;
  Jacobian jacobian(const Param& t) const override;

 private:
  Vec center_, e1_, e2_;
  double radius_;
};

RectifiableSet make_segment(const Vec& a, const Vec& b);
RectifiableSet make_circle(const Vec& center, double radius);
RectifiableSet make_polyline(const std::vector<Vec>& vertices, bool closed,
                             Orientation orientation = Orientation::GraphUp);
RectifiableSet make_fourier_graph(double s0, double s1, std::vector<double> sin_coeffs,
                                  std::vector<double> cos_coeffs);
RectifiableSet make_sphere(const Vec& center, double radius);
RectifiableSet make_poly_graph(const Param& lo, const Param& hi,
                               std::vector<std::vector<double>> coeffs);
/// The piece of the tangent plane of `frame` inside B(frame.x, radius).
RectifiableSet make_flat_piece(const TangentFrame& frame, double radius);

/// Equispaced parameter grid, kept 1% of each patch's extent away from the
/// patch boundary. Points are spread round-robin over patches; for surfaces
/// the grid is the leading `count` points of an m x m lattice.
std::vector<SurfacePoint> default_evaluation_points(const RectifiableSet& set, int count);

}  // namespace jumplab
