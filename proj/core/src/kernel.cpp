#include <jumplab/kernel.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace jumplab {

namespace {

constexpr double kFdStep = 1e-5;

void require_nonzero(const Vec& x) {
  if (x.size() == 0 || x.squaredNorm() == 0.0) {
    throw DomainError("kernel evaluated at the origin");
  }
}

}  // namespace

Vec complex_mul(const Vec& a, const Vec& b) {
  return make_vec({a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]});
}

Vec complex_pow(const Vec& z, int j) {
  Vec result = make_vec({1.0, 0.0});
  for (int k = 0; k < j; ++k) result = complex_mul(result, z);
  return result;
}

double unit_sphere_area(int n) {
  const double half = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

Vec Kernel::evaluate(const Vec& x) const {
  require_nonzero(x);
  if (x.size() != ambient_dim()) throw DomainError("point dimension does not match kernel");
  switch (kind_) {
    case Kind::Riesz: {
      const double r2 = x.squaredNorm();
      const double r = std::sqrt(r2);
      // |x|^{n+1}
      double denom = r;
      for (int k = 0; k < n_; ++k) denom *= r;
      return x / denom;
    }
    case Kind::CauchyPower: {
      const double r = x.norm();
      double denom = r;
      for (int k = 0; k < power_; ++k) denom *= r;
      return complex_pow(x, power_) / denom;
    }
    case Kind::Custom: {
      const double r = x.norm();
      return custom_omega_(x) / std::pow(r, n_);
    }
  }
  return {};
}

Vec Kernel::omega(const Vec& x) const {
  require_nonzero(x);
  if (x.size() != ambient_dim()) throw DomainError("point dimension does not match kernel");
  switch (kind_) {
    case Kind::Riesz:
      return x / x.norm();
    case Kind::CauchyPower: {
      const double r = x.norm();
      return complex_pow(x / r, power_);
    }
    case Kind::Custom:
      return custom_omega_(x);
  }
  return {};
}

Vec Kernel::closed_form_jump(const Vec& normal) const {
  if (!closed_form_) throw DomainError("kernel '" + name_ + "' has no closed-form jump constant");
  if (normal.size() != ambient_dim()) throw DomainError("normal dimension does not match kernel");
  return closed_form_(normal);
}

Kernel make_riesz(int n) {
  if (n < 1 || n + 1 > kMaxDim) {
    throw InvalidKernel("riesz kernel supports 1 <= n <= " + std::to_string(kMaxDim - 1));
  }
  Kernel k;
  k.kind_ = Kernel::Kind::Riesz;
  k.name_ = "riesz";
  k.n_ = n;
  k.value_dim_ = n + 1;
  const double half_area = 0.5 * unit_sphere_area(n);
  k.closed_form_ = [half_area](const Vec& normal) -> Vec { return half_area * normal; };
  return k;
}

Kernel make_cauchy_power(int j) {
  if (j < 1 || j % 2 == 0) {
    throw InvalidKernel("cauchy-power exponent must be a positive odd integer, got " +
                        std::to_string(j));
  }
  Kernel k;
  k.kind_ = Kernel::Kind::CauchyPower;
  k.name_ = "cauchy-power";
  k.n_ = 1;
  k.value_dim_ = 2;
  k.power_ = j;
  // C_K(N) = pi i^{j-1} N^j. Integrating Omega(y+N) - Omega(y-N) over the
  // line orthogonal to N gives this sign; for j = 1 the kernel coincides with
  // the planar Riesz kernel, whose constant is +pi N.
  const double sign = ((j - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
  k.closed_form_ = [j, sign](const Vec& normal) -> Vec {
    return sign * std::numbers::pi * complex_pow(normal, j);
  };
  return k;
}

Kernel make_custom_kernel(std::string name, int n, int value_dim, Kernel::AngularFn omega,
                          std::optional<Kernel::JumpFn> closed_form) {
  if (n < 1 || n + 1 > kMaxDim) throw InvalidKernel("custom kernel dimension out of range");
  if (value_dim < 1 || value_dim > kMaxDim) throw InvalidKernel("custom kernel value_dim out of range");
  if (!omega) throw InvalidKernel("custom kernel needs an angular part");
  Kernel k;
  k.kind_ = Kernel::Kind::Custom;
  k.name_ = std::move(name);
  k.n_ = n;
  k.value_dim_ = value_dim;
  k.custom_omega_ = std::move(omega);
  if (closed_form) k.closed_form_ = std::move(*closed_form);
  return k;
}

double check_cz_bounds(const Kernel& kernel, int sample_count, int derivative_order,
                       std::uint64_t seed) {
  if (sample_count < 1) throw DomainError("check_cz_bounds needs at least one sample");
  if (derivative_order < 0 || derivative_order > 2) {
    throw DomainError("derivative order must be 0, 1 or 2");
  }
  const int dim = kernel.ambient_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto checked = [&](const Vec& x) {
    Vec v = kernel.evaluate(x);
    if (!v.allFinite()) throw DomainError("kernel returned a non-finite value");
    return v;
  };
  auto unit = [&](int i) {
    Vec e = Vec::Zero(dim);
    e[i] = 1.0;
    return e;
  };

  double sup = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    Vec x(dim);
    do {
      for (int i = 0; i < dim; ++i) x[i] = gauss(rng);
    } while (x.norm() < 1e-3);
    x /= x.norm();

    double sq = 0.0;
    if (derivative_order == 0) {
      sq = checked(x).squaredNorm();
    } else if (derivative_order == 1) {
      for (int i = 0; i < dim; ++i) {
        const Vec h = kFdStep * unit(i);
        sq += ((checked(x + h) - checked(x - h)) / (2.0 * kFdStep)).squaredNorm();
      }
    } else {
      for (int i = 0; i < dim; ++i) {
        for (int k = 0; k < dim; ++k) {
          const Vec hi = kFdStep * unit(i);
          const Vec hk = kFdStep * unit(k);
          Vec d2;
          if (i == k) {
            d2 = (checked(x + hi) - 2.0 * checked(x) + checked(x - hi)) / (kFdStep * kFdStep);
          } else {
            d2 = (checked(x + hi + hk) - checked(x + hi - hk) - checked(x - hi + hk) +
                  checked(x - hi - hk)) /
                 (4.0 * kFdStep * kFdStep);
          }
          sq += d2.squaredNorm();
        }
      }
    }
    sup = std::max(sup, std::sqrt(sq));
  }
  return sup;
}

}  // namespace jumplab
