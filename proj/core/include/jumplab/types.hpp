#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace jumplab {

// Small fixed-capacity vectors. Ambient dimension is n+1 <= 4; kernel values
// never exceed the ambient dimension. No heap traffic in the inner loops.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Param = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;
// Columns are the partial derivatives of a patch map.
using Jacobian = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, 2>;

inline Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Param make_param(std::initializer_list<double> xs) {
  Param p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside an operation's domain (kernel singularity, point off the
/// carrier, bad dimension).
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidKernel : public Error {
 public:
  using Error::Error;
};

/// The patch Jacobian lost rank at the requested parameter.
class DegenerateParametrization : public Error {
 public:
  using Error::Error;
};

class SceneError : public Error {
 public:
  using Error::Error;
};

class NoDataError : public Error {
 public:
  using Error::Error;
};

/// Quadrature could not meet its tolerance within the cell budget. Carries the
/// best available estimate so callers can still report it.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, Vec estimate, double error_bound)
      : Error(what), estimate_(std::move(estimate)), error_bound_(error_bound) {}

  const Vec& estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  Vec estimate_;
  double error_bound_;
};

}  // namespace jumplab
