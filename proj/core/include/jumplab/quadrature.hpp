#pragma once

#include <jumplab/geometry.hpp>

#include <functional>
#include <optional>

namespace jumplab {

struct QuadConfig {
  /// Absolute tolerance for the whole integral, split across cells in
  /// proportion to their parameter volume.
  double abs_tol = 1e-10;
  /// Cells are also accepted once the refinement difference is below this
  /// fraction of the integral of |integrand| over the cell (roundoff floor).
  double rel_floor = 1e-13;
  long max_cells = 1'000'000;
  int initial_cells = 8;
  int max_depth = 60;
  /// Cells meeting the ball boundary are split until their image diameter is
  /// below straddle_ratio * radius before a clipped rule is applied.
  double straddle_ratio = 0.25;
  /// With a focus point, cells whose image is wider than near_ratio times
  /// their distance to the focus are split before any rule is trusted.
  double near_ratio = 1.0;
  /// Roundoff allowance near the focus: refinement differences below
  /// noise_factor * DBL_EPSILON * (1 + |focus|) / distance * |mass| count as converged.
  double noise_factor = 16.0;
  /// Power of 1 / distance in that allowance; 2 suits integrands whose
  /// numerator cancels to second order (double layers).
  int noise_order = 1;
};

/// Which part of the set to integrate over.
struct Region {
  enum class Kind { Everywhere, OutsideBall, InsideBall };
  Kind kind = Kind::Everywhere;
  Vec center;
  double radius = 0.0;
  /// Point where the integrand is (nearly) singular, if any.
  std::optional<Vec> focus;

  static Region everywhere() { return {}; }
  /// Whole set, integrand singular at y (off the set).
  static Region everywhere_near(Vec y) { return {Kind::Everywhere, Vec(), 0.0, std::move(y)}; }
  /// E \ B(c, r), open complement of the closed ball; the integrand is
  /// taken to be singular at c.
  static Region outside_ball(Vec c, double r) { return {Kind::OutsideBall, c, r, c}; }
  /// E intersected with the closed ball.
  static Region inside_ball(Vec c, double r) { return {Kind::InsideBall, std::move(c), r, std::nullopt}; }
};

struct QuadResult {
  Vec value;
  double error = 0.0;
  long cells = 0;
  bool converged = true;
};

/// Integrand evaluated at a point x = phi_patch(t) of the set.
using SurfaceIntegrand = std::function<Vec(int patch, const Param& t, const Vec& x)>;
using BoxIntegrand = std::function<Vec(const Param& t)>;

/// Integral of `integrand` against H^n on the region, by adaptive tensor
/// Gauss-Legendre (5 points per axis) on dyadically split parameter cells.
/// Cells crossing the ball boundary are clipped at the exact crossing
/// parameters. Summation order is fixed, so results are reproducible.
QuadResult integrate_measure_detailed(const RectifiableSet& set, int out_dim,
                                      const SurfaceIntegrand& integrand, const Region& region,
                                      const QuadConfig& cfg = {});

/// As above; throws ConvergenceFailure (carrying the estimate) when the cell
/// budget runs out before the tolerance is met.
Vec integrate_measure(const RectifiableSet& set, int out_dim, const SurfaceIntegrand& integrand,
                      const Region& region = Region::everywhere(), const QuadConfig& cfg = {});

/// Plain adaptive cubature of f over the box [lo, hi] in R^1 or R^2.
QuadResult integrate_box(const Param& lo, const Param& hi, int out_dim, const BoxIntegrand& f,
                         const QuadConfig& cfg = {});

/// Pairwise (cascade) sum in index order.
Vec pairwise_sum(const std::vector<Vec>& terms, int dim);

}  // namespace jumplab
