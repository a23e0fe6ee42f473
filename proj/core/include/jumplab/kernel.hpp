#pragma once

#include <jumplab/types.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace jumplab {

/// Odd convolution kernel K(x) = Omega(x) / |x|^n on R^{n+1}, with Omega
/// homogeneous of degree 0. Immutable once built.
///
/// Built-ins are dispatched on an enum so evaluation stays inlinable in the
/// quadrature loops; `make_custom_kernel` wraps an arbitrary angular part.
class Kernel {
 public:
  enum class Kind { Riesz, CauchyPower, Custom };

  using AngularFn = std::function<Vec(const Vec&)>;
  using JumpFn = std::function<Vec(const Vec&)>;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Homogeneity dimension; the kernel lives on R^{n+1}.
  int n() const { return n_; }
  int ambient_dim() const { return n_ + 1; }
  int value_dim() const { return value_dim_; }
  /// Cauchy exponent j (0 for other kernels).
  int power() const { return power_; }
  /// Smoothness exponent of the Holder condition; 1 for every built-in.
  double eta() const { return eta_; }

  /// K(x). Throws DomainError at x = 0.
  Vec evaluate(const Vec& x) const;
  /// Omega(x) = |x|^n K(x).
  Vec omega(const Vec& x) const;

  bool has_closed_form_jump() const { return static_cast<bool>(closed_form_); }
  /// C_K(N) from an analytic formula; throws if none is known.
  Vec closed_form_jump(const Vec& normal) const;

 private:
  friend Kernel make_riesz(int n);
  friend Kernel make_cauchy_power(int j);
  friend Kernel make_custom_kernel(std::string name, int n, int value_dim, AngularFn omega,
                                   std::optional<JumpFn> closed_form);

  Kernel() = default;

  Kind kind_ = Kind::Custom;
  std::string name_;
  int n_ = 1;
  int value_dim_ = 1;
  int power_ = 0;
  double eta_ = 1.0;
  AngularFn custom_omega_;
  JumpFn closed_form_;
};

/// Riesz kernel x/|x|^{n+1}; jump constant (omega_n / 2) N.
Kernel make_riesz(int n);

/// Complex kernel z^j / |z|^{j+1} on C = R^2, values encoded as (Re, Im).
/// Throws InvalidKernel for even or non-positive j.
Kernel make_cauchy_power(int j);

Kernel make_custom_kernel(std::string name, int n, int value_dim, Kernel::AngularFn omega,
                          std::optional<Kernel::JumpFn> closed_form = std::nullopt);

/// Surface area of the unit sphere S^n in R^{n+1}: 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double unit_sphere_area(int n);

/// Complex helpers on (Re, Im) 2-vectors.
Vec complex_mul(const Vec& a, const Vec& b);
Vec complex_pow(const Vec& z, int j);

/// Estimate of the constant in |grad^j K(x)| <= C / |x|^{n+j} from random
/// unit-sphere samples. Derivatives use central differences with step 1e-5;
/// on the unit sphere the homogeneity scaling is the identity. Norms are
/// Frobenius norms of the derivative tensors.
double check_cz_bounds(const Kernel& kernel, int sample_count, int derivative_order,
                       std::uint64_t seed = 0x6a756d70u);

}  // namespace jumplab
