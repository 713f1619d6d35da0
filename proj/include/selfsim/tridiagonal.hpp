// Thomas algorithm for tridiagonal systems.
#ifndef SELFSIM_TRIDIAGONAL_HPP
#define SELFSIM_TRIDIAGONAL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace selfsim {

/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i];
/// lower[0] and upper[n-1] are ignored.
template <typename Scalar = double>
struct Tridiagonal {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector lower, diag, upper;

  explicit Tridiagonal(Eigen::Index n) : lower(Vector::Zero(n)), diag(Vector::Zero(n)), upper(Vector::Zero(n)) {}
  Eigen::Index size() const { return diag.size(); }
};

/// Solves without pivoting; intended for diagonally dominant or M-matrix
/// systems. Throws on a vanishing or non-finite pivot.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_tridiagonal(const Tridiagonal<Scalar>& m,
                                                           const Eigen::MatrixBase<Derived>& rhs) {
  const Eigen::Index n = m.size();
  if (rhs.size() != n || n == 0) throw std::invalid_argument("solve_tridiagonal: size mismatch");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(n), x(n);
  Scalar pivot = m.diag[0];
  if (pivot == Scalar(0) || !std::isfinite(pivot)) throw std::runtime_error("solve_tridiagonal: zero pivot at row 0");
  c[0] = m.upper[0] / pivot;
  x[0] = rhs[0] / pivot;
  for (Eigen::Index i = 1; i < n; ++i) {
    pivot = m.diag[i] - m.lower[i] * c[i - 1];
    if (pivot == Scalar(0) || !std::isfinite(pivot)) {
      throw std::runtime_error("solve_tridiagonal: zero pivot at row " + std::to_string(i));
    }
    c[i] = m.upper[i] / pivot;
    x[i] = (rhs[i] - m.lower[i] * x[i - 1]) / pivot;
  }
  for (Eigen::Index i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace selfsim

#endif  // SELFSIM_TRIDIAGONAL_HPP
