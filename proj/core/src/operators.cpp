#include <jumplab/operators.hpp>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace jumplab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_atoms_allowed(const Transform& op, const RadonMeasure& measure) {
  if (op.pairing() == Transform::Pairing::DoubleLayer && !measure.atoms().empty()) {
    throw DomainError("double-layer transforms act on f N_y dH^n only; atoms are not allowed");
  }
}

Vec integrate_against(const Transform& op, const RadonMeasure& measure, const Vec& x,
                      const Region& region, const QuadConfig& qcfg) {
  const int dim = op.out_dim();
  Vec total = Vec::Zero(dim);
  if (!measure.density().is_zero() && !measure.carrier().empty()) {
    const RectifiableSet& set = measure.carrier();
    const Density& f = measure.density();
    QuadConfig cfg = qcfg;
    if (op.pairing() == Transform::Pairing::DoubleLayer) cfg.noise_order = std::max(cfg.noise_order, 2);
    total += integrate_measure(
        set, dim,
        [&](int patch, const Param& t, const Vec& y) {
          return op.integrand(set, patch, t, x, y, f(t));
        },
        region, cfg);
  }
  return total;
}

// Orthonormal basis of the hyperplane orthogonal to a unit vector.
Jacobian hyperplane_basis(const Vec& normal) {
  const int dim = static_cast<int>(normal.size());
  Jacobian basis(dim, dim - 1);
  if (dim == 2) {
    basis.col(0) = make_vec({-normal[1], normal[0]});
    return basis;
  }
  if (dim != 3) throw DomainError("hyperplane parametrization supports R^2 and R^3");
  int least = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(normal[i]) < std::abs(normal[least])) least = i;
  }
  Eigen::Vector3d nn(normal[0], normal[1], normal[2]);
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  a[least] = 1.0;
  Eigen::Vector3d e1 = nn.cross(a).normalized();
  Eigen::Vector3d e2 = nn.cross(e1).normalized();
  basis.col(0) = make_vec({e1[0], e1[1], e1[2]});
  basis.col(1) = make_vec({e2[0], e2[1], e2[2]});
  return basis;
}

template <class Eval>
LimitResult run_limit(const ExtrapolationConfig& cfg, int dim, Eval&& eval) {
  cfg.validate();
  LimitResult out;
  out.value = Vec::Zero(dim);
  int below = 0;
  Vec prev;
  for (int k = 0; k < cfg.max_steps; ++k) {
    const double scale = cfg.eps0 * std::pow(cfg.ratio, k);
    Vec v;
    try {
      v = eval(scale);
    } catch (const ConvergenceFailure& e) {
      v = e.estimate();
      out.quadrature_failed = true;
    }
    out.samples.emplace_back(scale, v);
    if (k > 0) {
      out.last_delta = (v - prev).norm();
      below = out.last_delta < cfg.tol ? below + 1 : 0;
    }
    prev = v;
    if (below >= 2 && k + 1 >= cfg.min_steps) {
      out.converged = true;
      break;
    }
  }
  out.value = prev;
  if (cfg.richardson_order > 0 && out.samples.size() >= 2) {
    const double f = std::pow(cfg.ratio, cfg.richardson_order);
    const Vec& last = out.samples.back().second;
    const Vec& before = out.samples[out.samples.size() - 2].second;
    out.value = (last - f * before) / (1.0 - f);
  }
  if (out.quadrature_failed) out.converged = false;
  return out;
}

void check_cone_params(double aperture, double b) {
  if (!(aperture > 0.0 && aperture < 1.0)) throw DomainError("aperture a must lie in (0, 1)");
  if (!(b > 0.0 && b < aperture)) throw DomainError("truncation factor b must lie in (0, a)");
}

}  // namespace

// Transform -------------------------------------------------------------------

Transform::Transform(Kernel kernel) : kernel_(std::move(kernel)) {}

Transform Transform::double_layer(int n) {
  Transform t(make_riesz(n));
  t.pairing_ = Pairing::DoubleLayer;
  t.scale_ = 1.0 / unit_sphere_area(n);
  return t;
}

std::string Transform::name() const {
  if (pairing_ == Pairing::DoubleLayer) return "double-layer";
  return kernel_.name();
}

Vec Transform::integrand(const RectifiableSet& set, int patch, const Param& t, const Vec& x,
                         const Vec& y, double f) const {
  const Vec k = kernel_.evaluate(x - y);
  if (pairing_ == Pairing::Direct) return f * k;
  return make_vec({scale_ * f * k.dot(set.normal(patch, t))});
}

Vec Transform::atom_term(const Vec& x, const Atom& atom) const {
  if (pairing_ == Pairing::DoubleLayer) throw DomainError("double-layer transforms take no atoms");
  return atom.weight * kernel_.evaluate(x - atom.location);
}

Vec Transform::jump_coefficient(const Vec& normal) const {
  const Vec ck = jump_constant(kernel_, normal);
  if (pairing_ == Pairing::Direct) return ck;
  return make_vec({scale_ * ck.dot(normal)});
}

Vec Transform::jump_term(const Vec& normal, double f) const { return f * jump_coefficient(normal); }

void ExtrapolationConfig::validate() const {
  if (!(eps0 > 0.0)) throw DomainError("eps0 must be positive");
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("ratio must lie in (0, 1)");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  if (max_steps < 1) throw DomainError("max_steps must be at least 1");
}

// Transforms ----------------------------------------------------------------

Vec truncated_transform(const Transform& op, const RadonMeasure& measure, const Vec& x, double eps,
                        const QuadConfig& qcfg) {
  if (!(eps > 0.0)) throw DomainError("truncation radius must be positive");
  if (x.size() != measure.ambient_dim()) throw DomainError("point dimension mismatch");
  check_atoms_allowed(op, measure);
  Vec total = integrate_against(op, measure, x, Region::outside_ball(x, eps), qcfg);
  for (const Atom& a : measure.atoms()) {
    if ((x - a.location).norm() > eps) total += op.atom_term(x, a);
  }
  return total;
}

Vec full_transform(const Transform& op, const RadonMeasure& measure, const Vec& y,
                   const QuadConfig& qcfg) {
  if (y.size() != measure.ambient_dim()) throw DomainError("point dimension mismatch");
  check_atoms_allowed(op, measure);
  Vec total = integrate_against(op, measure, y, Region::everywhere_near(y), qcfg);
  for (const Atom& a : measure.atoms()) total += op.atom_term(y, a);
  return total;
}

double maximal_transform(const Transform& op, const RadonMeasure& measure, const Vec& x,
                         const std::vector<double>& eps_grid, const QuadConfig& qcfg) {
  if (eps_grid.empty()) throw DomainError("truncation grid is empty");
  double sup = 0.0;
  for (double eps : eps_grid) sup = std::max(sup, truncated_transform(op, measure, x, eps, qcfg).norm());
  return sup;
}

LimitResult principal_value(const Transform& op, const RadonMeasure& measure,
                            const SurfacePoint& x, const ExtrapolationConfig& cfg,
                            const QuadConfig& qcfg) {
  for (const Atom& a : measure.atoms()) {
    if (a.weight != 0.0 && (a.location - x.x).norm() == 0.0) {
      throw DomainError("principal value requested at an atom");
    }
  }
  return run_limit(cfg, op.out_dim(), [&](double eps) {
    return truncated_transform(op, measure, x.x, eps, qcfg);
  });
}

LimitResult nontangential_limit(const Transform& op, const RadonMeasure& measure,
                                const SurfacePoint& x, Side side, double aperture, double b,
                                const ExtrapolationConfig& cfg, const QuadConfig& qcfg) {
  check_cone_params(aperture, b);
  const Vec normal = measure.carrier().normal(x.patch, x.param);
  const double sign = side == Side::Plus ? 1.0 : -1.0;
  return run_limit(cfg, op.out_dim(), [&](double t) {
    const Vec y = x.x + sign * t * normal;
    return truncated_transform(op, measure, y, b * t, qcfg);
  });
}

// Jump constants ------------------------------------------------------------

JumpConstantEstimate jump_constant_numeric(const Kernel& kernel, const Vec& normal,
                                           const JumpConstantOptions& options) {
  const int n = kernel.n();
  if (normal.size() != kernel.ambient_dim()) throw DomainError("normal dimension mismatch");
  if (std::abs(normal.norm() - 1.0) > 1e-10) throw DomainError("normal must be a unit vector");
  if (!(options.radius > 0.0)) throw DomainError("radial cutoff must be positive");
  if (n > 2) throw DomainError("numeric jump constant supports n = 1, 2");
  const int dim = kernel.value_dim();
  const Jacobian basis = hyperplane_basis(normal);
  const double half_power = 0.5 * n;

  auto g = [&](const Vec& y) -> Vec {
    return (kernel.omega(y + normal) - kernel.omega(y - normal)) /
           (2.0 * std::pow(y.squaredNorm() + 1.0, half_power));
  };
  auto direction = [&](double angle) -> Vec {
    if (n == 1) return basis.col(0);
    return std::cos(angle) * basis.col(0) + std::sin(angle) * basis.col(1);
  };
  // Integral over the unit "sphere" of L(N) at radius r, times r^{n-1}.
  auto shell = [&](double r, const Param& t) -> Vec {
    if (n == 1) {
      const Vec e = direction(0.0);
      return g(r * e) + g(-r * e);
    }
    return r * g(r * direction(t[1]));
  };

  QuadConfig qc = options.quad;
  qc.abs_tol = 0.05 * options.tol;
  const double R = options.radius;
  Param lo(n), hi(n);
  lo[0] = 0.0;
  hi[0] = R;
  if (n == 2) {
    lo[1] = 0.0;
    hi[1] = kTwoPi;
  }
  // Radial pieces [0,1], [1,2], [2,4], ..., [.., R] keep the scales apart.
  std::vector<double> cuts{0.0};
  for (double r = 1.0; r < R; r *= 2.0) cuts.push_back(r);
  cuts.push_back(R);
  std::vector<Vec> pieces;
  QuadResult inner;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    lo[0] = cuts[i];
    hi[0] = cuts[i + 1];
    QuadConfig pc = qc;
    pc.abs_tol = qc.abs_tol / static_cast<double>(cuts.size() - 1);
    const QuadResult piece =
        integrate_box(lo, hi, dim, [&](const Param& t) { return shell(t[0], t); }, pc);
    pieces.push_back(piece.value);
    inner.error += piece.error;
    inner.cells += piece.cells;
    inner.converged = inner.converged && piece.converged;
  }
  inner.value = pairwise_sum(pieces, dim);

  JumpConstantEstimate out;
  out.radius = R;
  out.value = inner.value;
  out.error = inner.error;
  bool ok = inner.converged;

  // Tail bound: sup |g| on the radius-R sphere times the mass of r^{-(n+1)}
  // scaled to match at r = R.
  double sup = 0.0;
  const int probes = n == 1 ? 1 : 32;
  for (int i = 0; i < probes; ++i) {
    const double angle = kTwoPi * i / probes;
    sup = std::max(sup, g(R * direction(angle)).norm());
    sup = std::max(sup, g(-R * direction(angle)).norm());
  }
  const double sphere_measure = n == 1 ? 2.0 : kTwoPi;
  out.tail_bound = sup * sphere_measure * std::pow(R, n);

  if (options.include_tail) {
    Param ulo(n), uhi(n);
    ulo[0] = 0.0;
    uhi[0] = 1.0;
    if (n == 2) {
      ulo[1] = 0.0;
      uhi[1] = kTwoPi;
    }
    const QuadResult tail = integrate_box(
        ulo, uhi, dim,
        [&](const Param& t) -> Vec {
          const double u = t[0];
          const double r = R / u;
          return shell(r, t) * (R / (u * u));
        },
        qc);
    out.value += tail.value;
    out.error += tail.error;
    ok = ok && tail.converged;
  } else {
    out.error += out.tail_bound;
  }
  if (!ok || out.error > options.tol) {
    throw ConvergenceFailure("jump constant error " + std::to_string(out.error) +
                                 " exceeds tolerance; increase the radial cutoff",
                             out.value, out.error);
  }
  return out;
}

Vec jump_constant(const Kernel& kernel, const Vec& normal) {
  if (kernel.has_closed_form_jump()) return kernel.closed_form_jump(normal);
  JumpConstantOptions options;
  options.tol = 1e-8;
  return jump_constant_numeric(kernel, normal, options).value;
}

// Jump residuals ------------------------------------------------------------

JumpRecord jump_residuals(const Transform& op, const RadonMeasure& measure, const SurfacePoint& x,
                          double aperture, double b, const ExtrapolationConfig& cfg,
                          const QuadConfig& qcfg) {
  check_cone_params(aperture, b);
  JumpRecord rec;
  rec.point = x;
  rec.normal = measure.carrier().tangent_frame(x.patch, x.param).normal;
  rec.density = measure.density_at(x);
  rec.jump_constant = op.jump_coefficient(rec.normal);
  rec.jump_rhs = rec.density * rec.jump_constant;

  rec.pv = principal_value(op, measure, x, cfg, qcfg);
  rec.plus = nontangential_limit(op, measure, x, Side::Plus, aperture, b, cfg, qcfg);
  rec.minus = nontangential_limit(op, measure, x, Side::Minus, aperture, b, cfg, qcfg);

  rec.residual_avg = (0.5 * (rec.plus.value + rec.minus.value) - rec.pv.value).norm();
  rec.residual_jump = (0.5 * (rec.plus.value - rec.minus.value) - rec.jump_rhs).norm();
  rec.converged = rec.pv.converged && rec.plus.converged && rec.minus.converged;

  // A side that converged early holds its final value for the remaining scales.
  const auto& ps = rec.plus.samples;
  const auto& ms = rec.minus.samples;
  const std::size_t steps = ps.empty() || ms.empty() ? 0 : std::max(ps.size(), ms.size());
  for (std::size_t k = 0; k < steps; ++k) {
    const Vec& tp = ps[std::min(k, ps.size() - 1)].second;
    const Vec& tm = ms[std::min(k, ms.size() - 1)].second;
    TraceStep step;
    step.scale = (ps.size() >= ms.size() ? ps : ms)[k].first;
    step.residual_avg = (0.5 * (tp + tm) - rec.pv.value).norm();
    step.residual_jump = (0.5 * (tp - tm) - rec.jump_rhs).norm();
    rec.trace.push_back(step);
  }
  return rec;
}

// Symmetric diagnostics -----------------------------------------------------

std::vector<Vec> cone_samples(const TangentFrame& frame, double aperture, double delta,
                              const ConeSampling& sampling) {
  if (!(aperture > 0.0 && aperture < 1.0)) throw DomainError("aperture a must lie in (0, 1)");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (sampling.angular < 1 || sampling.per_octave < 1 || !(sampling.r_min > 0.0)) {
    throw DomainError("invalid cone sampling");
  }
  std::vector<double> radii;
  // r_j = 2^{-j/q}; the first j with r_j <= delta.
  const double q = sampling.per_octave;
  int j = static_cast<int>(std::ceil(-q * std::log2(delta) - 1e-9));
  for (;; ++j) {
    const double r = std::exp2(-static_cast<double>(j) / q);
    if (r > delta) continue;
    if (r < sampling.r_min) break;
    radii.push_back(r);
  }
  const double max_angle = std::acos(aperture);
  std::vector<Vec> dirs;
  if (frame.n() == 1) {
    const int m = sampling.angular;
    for (int i = 0; i < m; ++i) {
      const double alpha = -max_angle + (i + 0.5) * 2.0 * max_angle / m;
      dirs.push_back(std::cos(alpha) * frame.normal + std::sin(alpha) * Vec(frame.basis.col(0)));
    }
  } else {
    const int polar = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(sampling.angular))));
    const int azimuth = (sampling.angular + polar - 1) / polar;
    for (int i = 0; i < polar; ++i) {
      const double beta = (i + 0.5) * max_angle / polar;
      for (int k = 0; k < azimuth; ++k) {
        const double gamma = kTwoPi * (k + 0.5) / azimuth;
        const Vec tangential = std::cos(gamma) * Vec(frame.basis.col(0)) +
                               std::sin(gamma) * Vec(frame.basis.col(1));
        dirs.push_back(std::cos(beta) * frame.normal + std::sin(beta) * tangential);
      }
    }
  }
  std::vector<Vec> out;
  for (double r : radii) {
    for (const Vec& d : dirs) out.push_back(frame.x + r * d);
  }
  return out;
}

SymmetricDiagnostics symmetric_diagnostics(const Transform& op, const RadonMeasure& measure,
                                           const SurfacePoint& x, const Vec& pv, double delta,
                                           double aperture, double b, const ConeSampling& sampling,
                                           const QuadConfig& qcfg) {
  check_cone_params(aperture, b);
  const TangentFrame frame = measure.carrier().tangent_frame(x.patch, x.param);
  const Vec rhs = op.jump_term(frame.normal, measure.density_at(x));
  SymmetricDiagnostics out;
  for (const Vec& y : cone_samples(frame, aperture, delta, sampling)) {
    const double r = (y - x.x).norm();
    const Vec mirror = 2.0 * x.x - y;
    const Vec ty = truncated_transform(op, measure, y, b * r, qcfg);
    const Vec tm = truncated_transform(op, measure, mirror, b * r, qcfg);
    out.sum = std::max(out.sum, (pv - 0.5 * (ty + tm)).norm());
    out.difference = std::max(out.difference, (rhs - 0.5 * (ty - tm)).norm());
    ++out.samples;
  }
  return out;
}

double symmetric_sum_diagnostic(const Transform& op, const RadonMeasure& measure,
                                const SurfacePoint& x, const Vec& pv, double delta,
                                double aperture, double b, const ConeSampling& sampling,
                                const QuadConfig& qcfg) {
  return symmetric_diagnostics(op, measure, x, pv, delta, aperture, b, sampling, qcfg).sum;
}

double symmetric_difference_diagnostic(const Transform& op, const RadonMeasure& measure,
                                       const SurfacePoint& x, const Vec& pv, double delta,
                                       double aperture, double b, const ConeSampling& sampling,
                                       const QuadConfig& qcfg) {
  return symmetric_diagnostics(op, measure, x, pv, delta, aperture, b, sampling, qcfg).difference;
}

double flat_plane_reflection_check(const Kernel& kernel, const TangentFrame& frame, const Vec& y,
                                   double radius, const QuadConfig& qcfg) {
  if (!(frame.distance_to_plane(y) > 0.0)) throw DomainError("point lies on the plane");
  auto piece = std::make_shared<const RectifiableSet>(make_flat_piece(frame, radius));
  const RadonMeasure plane(piece, Density::constant(1.0));
  const Transform op(kernel);
  const Vec at_y = full_transform(op, plane, y, qcfg);
  const Vec at_mirror = full_transform(op, plane, 2.0 * frame.x - y, qcfg);
  return (at_y + at_mirror).norm();
}

}  // namespace jumplab
