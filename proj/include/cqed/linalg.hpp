// linalg.hpp — dense complex linear algebra for small quantum systems
//
// Everything here works in units with hbar = 1: Hamiltonians are angular
// frequencies in rad/ns and times are in ns.

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cqed {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Ordinary frequency (GHz) to angular frequency (rad/ns).
inline constexpr double to_angular(double f_ghz) { return kTwoPi * f_ghz; }
/// Angular frequency (rad/ns) to ordinary frequency (GHz).
inline constexpr double to_ghz(double w_rad_ns) { return w_rad_ns / kTwoPi; }

/// Largest row or column count `kron` will produce unless told otherwise.
inline constexpr std::size_t kDefaultMaxStateDim = std::size_t{1} << 20;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> d);
  static ComplexMatrix diagonal(std::span<const cplx> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::span<const cplx> entries() const { return entries_; }

  ComplexMatrix adjoint() const;
  double max_abs() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> entries_;
};

/// Amplitudes of a pure state on a (possibly tensor-product) space.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {}

  /// |k> in a space of dimension `dim`.
  static StateVector basis(std::size_t dim, std::size_t k);

  std::size_t dim() const { return amps_.size(); }
  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }
  std::span<const cplx> amplitudes() const { return amps_; }

  double norm() const;
  double population(std::size_t i) const { return std::norm(amps_[i]); }

 private:
  std::vector<cplx> amps_;
};

StateVector operator*(const ComplexMatrix& m, const StateVector& v);
cplx inner(const StateVector& a, const StateVector& b);

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k pairs with values[k]

  StateVector vector(std::size_t k) const;
};

struct HermiticityReport {
  bool hermitian = true;
  std::size_t row = 0;
  std::size_t col = 0;
  double deviation = 0.0;  // |H(i,j) - conj(H(j,i))|
};

/// Worst violation of H(i,j) == conj(H(j,i)), judged against `rel_tol` times
/// the largest absolute entry.
HermiticityReport check_hermitian(const ComplexMatrix& h, double rel_tol = 1e-12);

/// Lowest `k` eigenpairs of a Hermitian matrix (all of them when `k` is
/// empty). Real symmetric tridiagonal input is fed straight to implicit QL;
/// anything else is Householder-reduced first. Each eigenvector has its
/// largest-magnitude component real and positive, and eigenvalues equal to
/// within 1e-12 relative are ordered by the index of that component.
EigenDecomposition hermitian_eigensolve(const ComplexMatrix& h,
                                        std::optional<std::size_t> k = std::nullopt);

/// Eigenvalues only, same ordering as `hermitian_eigensolve`.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);

/// Implicit-shift QL on a real symmetric tridiagonal matrix given by its
/// diagonal and sub-diagonal (size n-1). When `z` is non-null it must hold an
/// n-by-n row-major matrix; its columns are rotated along with the iteration.
void tridiagonal_ql(std::vector<double>& diag, std::vector<double> offdiag,
                    std::vector<double>* z);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_dim = kDefaultMaxStateDim);

struct TimeTrace {
  std::vector<double> times;
  std::vector<StateVector> states;
};

/// psi(t) = sum_k exp(-i lambda_k t) v_k <v_k|psi0> on every grid time.
TimeTrace evolve(const ComplexMatrix& h, const StateVector& psi0,
                 std::span<const double> t_grid);

/// Same propagation, reusing an existing decomposition of H.
TimeTrace evolve(const EigenDecomposition& eig, const StateVector& psi0,
                 std::span<const double> t_grid);

/// <psi|op|psi>; rejects a result whose imaginary part exceeds 1e-9.
double expectation(const ComplexMatrix& op, const StateVector& psi);

}  // namespace cqed
