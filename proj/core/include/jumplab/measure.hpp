#pragma once

#include <jumplab/geometry.hpp>
#include <jumplab/quadrature.hpp>

#include <memory>
#include <string>
#include <vector>

namespace jumplab {

/// Closed-form density on a carrier, written in patch parameters. A density
/// is a linear combination of registry terms:
///   constant  f = c
///   trig      f = c0 + sum_k a_k cos(k t_axis) + b_k sin(k t_axis)
///   poly      f = sum_k c_k t_axis^k
class Density {
 public:
  enum class Kind { Constant, Trig, Poly };

  struct Term {
    Kind kind = Kind::Constant;
    double scale = 1.0;
    int axis = 0;
    double offset = 0.0;
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
    std::vector<double> poly_coeffs;
  };

  static Density zero() { return Density{}; }
  static Density constant(double c);
  static Density trig(int axis, double offset, std::vector<double> cos_coeffs,
                      std::vector<double> sin_coeffs);
  static Density poly(int axis, std::vector<double> coeffs);

  double operator()(const Param& t) const;
  bool is_zero() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

  Density scaled(double s) const;
  Density plus(const Density& other) const;

 private:
  std::vector<Term> terms_;
};

struct Atom {
  Vec location;
  double weight = 0.0;
};

/// nu = f H^n|_E + sum_i w_i delta_{p_i}. Immutable.
class RadonMeasure {
 public:
  RadonMeasure(std::shared_ptr<const RectifiableSet> carrier, Density density,
               std::vector<Atom> atoms = {});

  const RectifiableSet& carrier() const { return *carrier_; }
  std::shared_ptr<const RectifiableSet> carrier_ptr() const { return carrier_; }
  const Density& density() const { return density_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  int ambient_dim() const { return carrier_->ambient_dim(); }
  int n() const { return carrier_->n(); }

  /// f at a parametrized point of the carrier.
  double density_at(const SurfacePoint& p) const { return density_(p.param); }

  /// alpha * a + beta * b; both must share a carrier.
  static RadonMeasure combine(double alpha, const RadonMeasure& a, double beta,
                              const RadonMeasure& b);

 private:
  std::shared_ptr<const RectifiableSet> carrier_;
  Density density_;
  std::vector<Atom> atoms_;
};

/// Density of nu with respect to H^n|_E at a point of E. Atoms contribute
/// nothing. Throws DomainError when x is not on the carrier.
double density_at(const RadonMeasure& measure, const Vec& x);

/// |nu|(closed ball B(x, r)).
double ball_mass(const RadonMeasure& measure, const Vec& x, double r, const QuadConfig& cfg = {});

struct MaximalDensity {
  double value = 0.0;
  bool infinite = false;
};

/// sup over the radius grid of |nu|(B(x, r)) / r^n; flags +infinity when an
/// atom sits at x.
MaximalDensity maximal_density(const RadonMeasure& measure, const Vec& x,
                               const std::vector<double>& radii, const QuadConfig& cfg = {});

/// 40 radii, geometric from 1e-4 * diam to 4 * diam.
std::vector<double> default_radii(double diameter, int count = 40);

}  // namespace jumplab
