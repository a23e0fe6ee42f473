#include <jumplab/measure.hpp>

#include <cmath>
#include <limits>

namespace jumplab {

Density Density::constant(double c) {
  Density d;
  if (c != 0.0) {
    Term t;
    t.kind = Kind::Constant;
    t.offset = c;
    d.terms_.push_back(t);
  }
  return d;
}

Density Density::trig(int axis, double offset, std::vector<double> cos_coeffs,
                      std::vector<double> sin_coeffs) {
  if (axis < 0 || axis > 1) throw DomainError("density axis must be 0 or 1");
  Density d;
  Term t;
  t.kind = Kind::Trig;
  t.axis = axis;
  t.offset = offset;
  t.cos_coeffs = std::move(cos_coeffs);
  t.sin_coeffs = std::move(sin_coeffs);
  d.terms_.push_back(std::move(t));
  return d;
}

Density Density::poly(int axis, std::vector<double> coeffs) {
  if (axis < 0 || axis > 1) throw DomainError("density axis must be 0 or 1");
  Density d;
  Term t;
  t.kind = Kind::Poly;
  t.axis = axis;
  t.poly_coeffs = std::move(coeffs);
  d.terms_.push_back(std::move(t));
  return d;
}

double Density::operator()(const Param& p) const {
  double f = 0.0;
  for (const Term& term : terms_) {
    double v = 0.0;
    switch (term.kind) {
      case Kind::Constant:
        v = term.offset;
        break;
      case Kind::Trig: {
        if (term.axis >= p.size()) throw DomainError("density axis exceeds parameter dimension");
        const double s = p[term.axis];
        v = term.offset;
        for (std::size_t k = 0; k < term.cos_coeffs.size(); ++k) {
          v += term.cos_coeffs[k] * std::cos(static_cast<double>(k + 1) * s);
        }
        for (std::size_t k = 0; k < term.sin_coeffs.size(); ++k) {
          v += term.sin_coeffs[k] * std::sin(static_cast<double>(k + 1) * s);
        }
        break;
      }
      case Kind::Poly: {
        if (term.axis >= p.size()) throw DomainError("density axis exceeds parameter dimension");
        const double s = p[term.axis];
        // Horner
        for (auto it = term.poly_coeffs.rbegin(); it != term.poly_coeffs.rend(); ++it) v = v * s + *it;
        break;
      }
    }
    f += term.scale * v;
  }
  return f;
}

Density Density::scaled(double s) const {
  Density d;
  if (s == 0.0) return d;
  d.terms_ = terms_;
  for (Term& t : d.terms_) t.scale *= s;
  return d;
}

Density Density::plus(const Density& other) const {
  Density d;
  d.terms_ = terms_;
  d.terms_.insert(d.terms_.end(), other.terms_.begin(), other.terms_.end());
  return d;
}

RadonMeasure::RadonMeasure(std::shared_ptr<const RectifiableSet> carrier, Density density,
                           std::vector<Atom> atoms)
    : carrier_(std::move(carrier)), density_(std::move(density)), atoms_(std::move(atoms)) {
  if (!carrier_) throw DomainError("measure needs a carrier set");
  for (const Atom& a : atoms_) {
    if (a.location.size() != carrier_->ambient_dim()) throw DomainError("atom dimension mismatch");
    if (!std::isfinite(a.weight)) throw DomainError("atom weight must be finite");
  }
}

RadonMeasure RadonMeasure::combine(double alpha, const RadonMeasure& a, double beta,
                                   const RadonMeasure& b) {
  if (a.carrier_ != b.carrier_) throw DomainError("combined measures must share a carrier");
  std::vector<Atom> atoms;
  for (const Atom& at : a.atoms_) atoms.push_back({at.location, alpha * at.weight});
  for (const Atom& at : b.atoms_) atoms.push_back({at.location, beta * at.weight});
  return RadonMeasure(a.carrier_, a.density_.scaled(alpha).plus(b.density_.scaled(beta)),
                      std::move(atoms));
}

double density_at(const RadonMeasure& measure, const Vec& x) {
  const double tol = 1e-9 * (1.0 + measure.carrier().diameter());
  const auto sp = measure.carrier().locate(x, tol);
  if (!sp) throw DomainError("point is not on the carrier");
  return measure.density_at(*sp);
}

double ball_mass(const RadonMeasure& measure, const Vec& x, double r, const QuadConfig& cfg) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  double mass = 0.0;
  if (!measure.density().is_zero() && !measure.carrier().empty()) {
    const Density& f = measure.density();
    const Vec v = integrate_measure(
        measure.carrier(), 1,
        [&f](int, const Param& t, const Vec&) { return make_vec({std::abs(f(t))}); },
        Region::inside_ball(x, r), cfg);
    mass += v[0];
  }
  for (const Atom& a : measure.atoms()) {
    if ((a.location - x).norm() <= r) mass += std::abs(a.weight);
  }
  return mass;
}

MaximalDensity maximal_density(const RadonMeasure& measure, const Vec& x,
                               const std::vector<double>& radii, const QuadConfig& cfg) {
  if (radii.empty()) throw DomainError("radius grid is empty");
  MaximalDensity out;
  for (const Atom& a : measure.atoms()) {
    if (a.weight != 0.0 && (a.location - x).norm() == 0.0) {
      out.infinite = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  for (double r : radii) {
    if (!(r > 0.0)) throw DomainError("radii must be positive");
    out.value = std::max(out.value, ball_mass(measure, x, r, cfg) / std::pow(r, measure.n()));
  }
  return out;
}

std::vector<double> default_radii(double diameter, int count) {
  if (!(diameter > 0.0) || count < 2) throw DomainError("radius grid needs a positive scale");
  std::vector<double> radii;
  const double lo = 1e-4 * diameter;
  const double hi = 4.0 * diameter;
  for (int i = 0; i < count; ++i) {
    radii.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  }
  return radii;
}

}  // namespace jumplab
