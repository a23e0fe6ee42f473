#pragma once

#include <jumplab/geometry.hpp>
#include <jumplab/kernel.hpp>
#include <jumplab/measure.hpp>
#include <jumplab/quadrature.hpp>

#include <utility>
#include <vector>

namespace jumplab {

/// How a kernel is paired with the measure. `Direct` integrates K(x-y) f(y);
/// `DoubleLayer` integrates (1/omega_n) K(x-y).N_y f(y), i.e. the Riesz
/// kernel applied to the vector measure f N_y dH^n and contracted.
class Transform {
 public:
  enum class Pairing { Direct, DoubleLayer };

  Transform(Kernel kernel);  // NOLINT(google-explicit-constructor): a kernel is a direct transform
  static Transform double_layer(int n);

  const Kernel& kernel() const { return kernel_; }
  Pairing pairing() const { return pairing_; }
  int out_dim() const { return pairing_ == Pairing::Direct ? kernel_.value_dim() : 1; }
  std::string name() const;

  /// Contribution density at y = phi_patch(t) for evaluation point x.
  Vec integrand(const RectifiableSet& set, int patch, const Param& t, const Vec& x, const Vec& y,
                double f) const;
  /// w K(x - p) for an atom; atoms are rejected for double layers.
  Vec atom_term(const Vec& x, const Atom& atom) const;
  /// C_K(N) for direct pairings; (1/omega_n) C_K(N).N = 1/2 for double layers.
  Vec jump_coefficient(const Vec& normal) const;
  /// Right-hand side of the jump identity at a point with normal N and density f.
  Vec jump_term(const Vec& normal, double f) const;

 private:
  Kernel kernel_;
  Pairing pairing_ = Pairing::Direct;
  double scale_ = 1.0;
};

struct ExtrapolationConfig {
  double eps0 = 0.2;
  double ratio = 0.5;
  int max_steps = 24;
  double tol = 1e-6;
  /// Iterates required before convergence may be declared.
  int min_steps = 3;
  /// Richardson order p applied to the last two iterates; 0 disables it.
  int richardson_order = 0;

  void validate() const;
};

struct LimitResult {
  Vec value;
  bool converged = false;
  double last_delta = 0.0;
  /// Set when some quadrature fell back to its best estimate.
  bool quadrature_failed = false;
  std::vector<std::pair<double, Vec>> samples;
};

enum class Side { Plus, Minus };

/// T_eps nu(x) = int_{|x-y|>eps} K(x-y) dnu(y).
Vec truncated_transform(const Transform& op, const RadonMeasure& measure, const Vec& x, double eps,
                        const QuadConfig& qcfg = {});

/// T nu(y) with no truncation, for y off the support of the measure.
Vec full_transform(const Transform& op, const RadonMeasure& measure, const Vec& y,
                   const QuadConfig& qcfg = {});

/// max over the grid of |T_eps nu(x)|.
double maximal_transform(const Transform& op, const RadonMeasure& measure, const Vec& x,
                         const std::vector<double>& eps_grid, const QuadConfig& qcfg = {});

/// lim_{eps -> 0} T_eps nu(x) along eps_k = eps0 ratio^k.
LimitResult principal_value(const Transform& op, const RadonMeasure& measure,
                            const SurfacePoint& x, const ExtrapolationConfig& cfg,
                            const QuadConfig& qcfg = {});

/// lim T_{b t} nu(x +- t N_x) as t = eps0 ratio^k -> 0, along the cone axis.
LimitResult nontangential_limit(const Transform& op, const RadonMeasure& measure,
                                const SurfacePoint& x, Side side, double aperture, double b,
                                const ExtrapolationConfig& cfg, const QuadConfig& qcfg = {});

struct JumpConstantOptions {
  double radius = 1e4;
  /// Integrate |y| > radius exactly through r = radius / u; when false the
  /// region is dropped and only bounded.
  bool include_tail = true;
  double tol = 1e-10;
  QuadConfig quad{};
};

struct JumpConstantEstimate {
  Vec value;
  /// Quadrature error, plus the tail bound when the tail is not integrated.
  double error = 0.0;
  /// sup |integrand| on |y| = radius times the tail mass of r^{-(n+1)}.
  double tail_bound = 0.0;
  double radius = 0.0;
};

/// C_K(N) = int_{L(N)} (Omega(y+N) - Omega(y-N)) / (2 (|y|^2+1)^{n/2}) dH^n(y)
/// in radial-angular form. Throws ConvergenceFailure asking for a larger
/// radius when the reported error exceeds options.tol.
JumpConstantEstimate jump_constant_numeric(const Kernel& kernel, const Vec& normal,
                                           const JumpConstantOptions& options = {});

/// Closed form when the kernel has one, otherwise the numeric integral.
Vec jump_constant(const Kernel& kernel, const Vec& normal);

struct TraceStep {
  double scale = 0.0;
  double residual_avg = 0.0;
  double residual_jump = 0.0;
};

struct JumpRecord {
  SurfacePoint point;
  Vec normal;
  double density = 0.0;
  LimitResult pv;
  LimitResult plus;
  LimitResult minus;
  /// C_K(N_x) f(x), or its contraction for double layers.
  Vec jump_rhs;
  /// Transform::jump_coefficient at N_x.
  Vec jump_constant;
  double residual_avg = 0.0;
  double residual_jump = 0.0;
  bool converged = false;
  std::vector<TraceStep> trace;
};

JumpRecord jump_residuals(const Transform& op, const RadonMeasure& measure, const SurfacePoint& x,
                          double aperture, double b, const ExtrapolationConfig& cfg,
                          const QuadConfig& qcfg = {});

/// Deterministic stratified points of X_a^+(x) with |y - x| <= delta. Radii
/// are 2^{-j / per_octave} for integer j inside [r_min, delta], so halving
/// delta selects a subset of the same points.
struct ConeSampling {
  int angular = 5;
  int per_octave = 4;
  double r_min = 1e-3;
};

std::vector<Vec> cone_samples(const TangentFrame& frame, double aperture, double delta,
                              const ConeSampling& sampling);

struct SymmetricDiagnostics {
  /// sup |pv - (T(y) + T(y*)) / 2|
  double sum = 0.0;
  /// sup |C_K(N) f - (T(y) - T(y*)) / 2|
  double difference = 0.0;
  int samples = 0;
};

SymmetricDiagnostics symmetric_diagnostics(const Transform& op, const RadonMeasure& measure,
                                           const SurfacePoint& x, const Vec& pv, double delta,
                                           double aperture, double b, const ConeSampling& sampling,
                                           const QuadConfig& qcfg = {});

double symmetric_sum_diagnostic(const Transform& op, const RadonMeasure& measure,
                                const SurfacePoint& x, const Vec& pv, double delta,
                                double aperture, double b, const ConeSampling& sampling,
                                const QuadConfig& qcfg = {});

double symmetric_difference_diagnostic(const Transform& op, const RadonMeasure& measure,
                                       const SurfacePoint& x, const Vec& pv, double delta,
                                       double aperture, double b, const ConeSampling& sampling,
                                       const QuadConfig& qcfg = {});

/// |T(chi_B H^n|_L)(y) + T(chi_B H^n|_L)(2x - y)| for the plane L through
/// frame.x, B = B(frame.x, radius). Vanishes for odd kernels.
double flat_plane_reflection_check(const Kernel& kernel, const TangentFrame& frame, const Vec& y,
                                   double radius, const QuadConfig& qcfg = {});

}  // namespace jumplab
