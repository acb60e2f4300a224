#include "cqed/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "cqed/error.hpp"

namespace cqed {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (!m.square() || m.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + ": expected a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_hermitian(const ComplexMatrix& h, const char* what) {
  const auto report = check_hermitian(h);
  if (!report.hermitian) {
    throw Error(ErrorCode::NotHermitian,
                std::string(what) + ": matrix is not Hermitian; worst pair H(" +
                    std::to_string(report.row) + "," + std::to_string(report.col) +
                    ") vs conj(H(" + std::to_string(report.col) + "," +
                    std::to_string(report.row) + ")) differs by " +
                    format_double(report.deviation) + " (max |H| = " +
                    format_double(h.max_abs()) + ")");
  }
}

bool is_tridiagonal(const ComplexMatrix& h) {
  const std::size_t n = h.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap > 1 && h(i, j) != cplx{}) return false;
    }
  }
  return true;
}

// Unitary reduction H = Q T Q^dagger with T Hermitian tridiagonal. On return
// `a` holds T; `q` (if given) holds Q.
void householder_tridiagonalize(ComplexMatrix& a, ComplexMatrix* q) {
  const std::size_t n = a.rows();
  if (q) *q = ComplexMatrix::identity(n);
  if (n < 3) return;

  std::vector<cplx> u;
  std::vector<cplx> p;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t lo = k + 1;
    const std::size_t m = n - lo;

    double tail = 0.0;
    for (std::size_t i = 1; i < m; ++i) tail += std::norm(a(lo + i, k));
    if (tail == 0.0) continue;

    const cplx x0 = a(lo, k);
    const double xnorm = std::sqrt(tail + std::norm(x0));
    const cplx phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cplx{1.0};
    const cplx alpha = -phase * xnorm;

    u.assign(m, cplx{});
    for (std::size_t i = 0; i < m; ++i) u[i] = a(lo + i, k);
    u[0] -= alpha;
    double unorm = 0.0;
    for (const auto& ui : u) unorm += std::norm(ui);
    unorm = std::sqrt(unorm);
    for (auto& ui : u) ui /= unorm;

    // Trailing block update A22 <- P A22 P with P = I - 2 u u^dagger.
    p.assign(m, cplx{});
    for (std::size_t i = 0; i < m; ++i) {
      cplx s{};
      for (std::size_t j = 0; j < m; ++j) s += a(lo + i, lo + j) * u[j];
      p[i] = s;
    }
    double kappa = 0.0;
    for (std::size_t i = 0; i < m; ++i) kappa += std::real(std::conj(u[i]) * p[i]);
    for (std::size_t i = 0; i < m; ++i) p[i] -= kappa * u[i];
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        a(lo + i, lo + j) -= 2.0 * (u[i] * std::conj(p[j]) + p[i] * std::conj(u[j]));
      }
    }

    a(lo, k) = alpha;
    a(k, lo) = std::conj(alpha);
    for (std::size_t i = 1; i < m; ++i) {
      a(lo + i, k) = cplx{};
      a(k, lo + i) = cplx{};
    }

    if (q) {
      for (std::size_t r = 0; r < n; ++r) {
        cplx s{};
        for (std::size_t j = 0; j < m; ++j) s += (*q)(r, lo + j) * u[j];
        s *= 2.0;
        for (std::size_t j = 0; j < m; ++j) (*q)(r, lo + j) -= s * std::conj(u[j]);
      }
    }
  }
}

struct RealTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;
  std::vector<cplx> phases;  // T = D S D^dagger with S real
};

// A Hermitian tridiagonal matrix is diagonally unitarily similar to a real
// symmetric one with non-negative off-diagonals.
RealTridiagonal realify(const ComplexMatrix& t) {
  const std::size_t n = t.rows();
  RealTridiagonal out;
  out.diag.resize(n);
  out.offdiag.resize(n > 0 ? n - 1 : 0);
  out.phases.assign(n, cplx{1.0});
  for (std::size_t i = 0; i < n; ++i) out.diag[i] = std::real(t(i, i));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cplx e = t(i + 1, i);
    const double mag = std::abs(e);
    out.offdiag[i] = mag;
    out.phases[i + 1] = mag > 0.0 ? out.phases[i] * (e / mag) : out.phases[i];
  }
  return out;
}

std::size_t dominant_index(const ComplexMatrix& v, std::size_t col) {
  double best = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) best = std::max(best, std::abs(v(i, col)));
  for (std::size_t i = 0; i < v.rows(); ++i) {
    if (std::abs(v(i, col)) >= best * (1.0 - 1e-10)) return i;
  }
  return 0;
}

void fix_phase(ComplexMatrix& v, std::size_t col, std::size_t idx) {
  const cplx lead = v(idx, col);
  const double mag = std::abs(lead);
  if (mag == 0.0) return;
  const cplx rot = std::conj(lead) / mag;
  for (std::size_t i = 0; i < v.rows(); ++i) v(i, col) *= rot;
  v(idx, col) = cplx{std::real(v(idx, col)), 0.0};
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix / StateVector

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw Error(ErrorCode::InvalidArgument,
                "ComplexMatrix: " + std::to_string(entries_.size()) +
                    " entries supplied for a " + std::to_string(rows_) + "x" +
                    std::to_string(cols_) + " matrix");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& x : entries_) m = std::max(m, std::abs(x));
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
    throw Error(ErrorCode::InvalidArgument, "matrix sum: shape mismatch");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
    throw Error(ErrorCode::InvalidArgument, "matrix difference: shape mismatch");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& x : entries_) x *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::InvalidArgument,
                "matrix product: inner dimensions " + std::to_string(a.cols()) + " and " +
                    std::to_string(b.rows()) + " differ");
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

StateVector StateVector::basis(std::size_t dim, std::size_t k) {
  if (k >= dim) {
    throw Error(ErrorCode::InvalidArgument,
                "basis state " + std::to_string(k) + " outside dimension " + std::to_string(dim));
  }
  std::vector<cplx> amps(dim);
  amps[k] = 1.0;
  return StateVector(std::move(amps));
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

StateVector operator*(const ComplexMatrix& m, const StateVector& v) {
  if (m.cols() != v.dim()) {
    throw Error(ErrorCode::InvalidArgument,
                "matrix-vector product: " + std::to_string(m.cols()) + " columns vs dimension " +
                    std::to_string(v.dim()));
  }
  std::vector<cplx> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    cplx s{};
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return StateVector(std::move(out));
}

cplx inner(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::InvalidArgument, "inner product: dimension mismatch");
  }
  cplx s{};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

StateVector EigenDecomposition::vector(std::size_t k) const {
  std::vector<cplx> amps(vectors.rows());
  for (std::size_t i = 0; i < vectors.rows(); ++i) amps[i] = vectors(i, k);
  return StateVector(std::move(amps));
}

// ---------------------------------------------------------------------------
// Eigensolver

HermiticityReport check_hermitian(const ComplexMatrix& h, double rel_tol) {
  HermiticityReport report;
  if (!h.square()) {
    report.hermitian = false;
    report.deviation = std::numeric_limits<double>::infinity();
    return report;
  }
  const double scale = h.max_abs();
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = i; j < h.cols(); ++j) {
      const double dev = std::abs(h(i, j) - std::conj(h(j, i)));
      if (dev > report.deviation) {
        report.deviation = dev;
        report.row = i;
        report.col = j;
      }
    }
  }
  report.hermitian = report.deviation <= rel_tol * scale;
  return report;
}

void tridiagonal_ql(std::vector<double>& d, std::vector<double> offdiag, std::vector<double>* z) {
  const std::size_t n = d.size();
  if (n == 0) return;
  if (offdiag.size() + 1 != n) {
    throw Error(ErrorCode::InvalidArgument, "tridiagonal_ql: off-diagonal must have n-1 entries");
  }
  if (z && z->size() != n * n) {
    throw Error(ErrorCode::InvalidArgument, "tridiagonal_ql: rotation matrix must be n x n");
  }
  std::vector<double> e(n, 0.0);
  std::copy(offdiag.begin(), offdiag.end(), e.begin());

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const std::size_t max_iter = 60 * n + 30;
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    // Find a negligible sub-diagonal element to split at.
    tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::fabs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      std::size_t iter = 0;
      do {
        if (++iter > max_iter) {
          throw Error(ErrorCode::ConvergenceFailure,
                      "tridiagonal_ql: no convergence for eigenvalue " + std::to_string(l) +
                          " after " + std::to_string(max_iter) + " sweeps");
        }
        // Wilkinson-style shift from the leading 2x2 block.
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        // Implicit QL sweep from m back to l.
        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (z) {
            auto& zz = *z;
            for (std::size_t k = 0; k < n; ++k) {
              const double zk1 = zz[k * n + ii + 1];
              zz[k * n + ii + 1] = s * zz[k * n + ii] + c * zk1;
              zz[k * n + ii] = c * zz[k * n + ii] - s * zk1;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::fabs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

namespace {

struct RawEigen {
  std::vector<double> values;  // unsorted
  ComplexMatrix vectors;       // empty when not requested
};

RawEigen solve_unsorted(const ComplexMatrix& h, bool want_vectors) {
  const std::size_t n = h.rows();
  ComplexMatrix t = h;
  ComplexMatrix q;
  const bool tridiagonal = is_tridiagonal(h);
  if (!tridiagonal) householder_tridiagonalize(t, want_vectors ? &q : nullptr);

  RealTridiagonal rt = realify(t);
  std::vector<double> z;
  if (want_vectors) {
    z.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  }
  tridiagonal_ql(rt.diag, rt.offdiag, want_vectors ? &z : nullptr);

  RawEigen out;
  out.values = std::move(rt.diag);
  for (double v : out.values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NumericalFailure, "hermitian_eigensolve: non-finite eigenvalue");
    }
  }
  if (!want_vectors) return out;

  // Back-transform: eigenvectors of H are Q D z.
  out.vectors = ComplexMatrix(n, n);
  if (tridiagonal) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) out.vectors(r, c) = rt.phases[r] * z[r * n + c];
  } else {
    ComplexMatrix qd = q;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < n; ++i) qd(r, i) *= rt.phases[i];
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        const cplx qri = qd(r, i);
        if (qri == cplx{}) continue;
        for (std::size_t c = 0; c < n; ++c) out.vectors(r, c) += qri * z[i * n + c];
      }
    }
  }
  return out;
}

}  // namespace

EigenDecomposition hermitian_eigensolve(const ComplexMatrix& h, std::optional<std::size_t> k) {
  require_square(h, "hermitian_eigensolve");
  const std::size_t n = h.rows();
  const std::size_t want = k.value_or(n);
  if (want > n) {
    throw Error(ErrorCode::InvalidArgument,
                "hermitian_eigensolve: requested " + std::to_string(want) +
                    " eigenpairs from a matrix of dimension " + std::to_string(n));
  }
  require_hermitian(h, "hermitian_eigensolve");

  RawEigen raw = solve_unsorted(h, true);

  std::vector<std::size_t> lead(n);
  for (std::size_t c = 0; c < n; ++c) {
    lead[c] = dominant_index(raw.vectors, c);
    fix_phase(raw.vectors, c, lead[c]);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw.values[a] < raw.values[b]; });

  // Runs of (numerically) degenerate eigenvalues are ordered by the position
  // of their dominant component.
  double scale = 0.0;
  for (double v : raw.values) scale = std::max(scale, std::fabs(v));
  const double tie = 1e-12 * scale;
  for (std::size_t start = 0; start < n;) {
    std::size_t stop = start + 1;
    while (stop < n && raw.values[order[stop]] - raw.values[order[start]] <= tie) ++stop;
    if (stop - start > 1) {
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                       order.begin() + static_cast<std::ptrdiff_t>(stop),
                       [&](std::size_t a, std::size_t b) { return lead[a] < lead[b]; });
    }
    start = stop;
  }

  EigenDecomposition out;
  out.values.resize(want);
  out.vectors = ComplexMatrix(n, want);
  for (std::size_t c = 0; c < want; ++c) {
    out.values[c] = raw.values[order[c]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = raw.vectors(r, order[c]);
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  require_square(h, "hermitian_eigenvalues");
  require_hermitian(h, "hermitian_eigenvalues");
  RawEigen raw = solve_unsorted(h, false);
  std::sort(raw.values.begin(), raw.values.end());
  return raw.values;
}

// ---------------------------------------------------------------------------
// Kronecker product, propagation, expectation values

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_dim) {
  const auto exceeds = [max_dim](std::size_t x, std::size_t y) {
    return y != 0 && x > max_dim / y;
  };
  if (exceeds(a.rows(), b.rows()) || exceeds(a.cols(), b.cols())) {
    throw Error(ErrorCode::DimensionOverflow,
                "kron: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " (x) " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                    " exceeds the maximum state-space dimension " + std::to_string(max_dim));
  }
  const std::size_t rb = b.rows();
  const std::size_t cb = b.cols();
  ComplexMatrix out(a.rows() * rb, a.cols() * cb);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < cb; ++l) out(i * rb + k, j * cb + l) = aij * b(k, l);
    }
  }
  return out;
}

TimeTrace evolve(const ComplexMatrix& h, const StateVector& psi0, std::span<const double> t_grid) {
  require_square(h, "evolve");
  require_hermitian(h, "evolve");
  return evolve(hermitian_eigensolve(h), psi0, t_grid);
}

TimeTrace evolve(const EigenDecomposition& eig, const StateVector& psi0,
                 std::span<const double> t_grid) {
  const std::size_t n = eig.vectors.rows();
  const std::size_t m = eig.values.size();
  if (psi0.dim() != n) {
    throw Error(ErrorCode::InvalidArgument,
                "evolve: state dimension " + std::to_string(psi0.dim()) +
                    " does not match Hamiltonian dimension " + std::to_string(n));
  }
  if (m != n) {
    throw Error(ErrorCode::InvalidArgument, "evolve: needs the full eigendecomposition");
  }
  const double norm = psi0.norm();
  if (std::fabs(norm - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument,
                "evolve: initial state is not normalized (norm = " + format_double(norm) + ")");
  }
  if (t_grid.empty()) throw Error(ErrorCode::InvalidArgument, "evolve: empty time grid");
  if (!(t_grid[0] >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "evolve: time grid must start at t >= 0");
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "evolve: time grid not strictly increasing at index " + std::to_string(i));
    }
  }

  std::vector<cplx> coeff(m);
  for (std::size_t k = 0; k < m; ++k) {
    cplx s{};
    for (std::size_t i = 0; i < n; ++i) s += std::conj(eig.vectors(i, k)) * psi0[i];
    coeff[k] = s;
  }

  TimeTrace trace;
  trace.times.assign(t_grid.begin(), t_grid.end());
  trace.states.reserve(t_grid.size());
  std::vector<cplx> phased(m);
  for (double t : t_grid) {
    if (t == 0.0) {
      trace.states.push_back(psi0);
      continue;
    }
    for (std::size_t k = 0; k < m; ++k) phased[k] = std::polar(1.0, -eig.values[k] * t) * coeff[k];
    std::vector<cplx> amps(n);
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{};
      for (std::size_t k = 0; k < m; ++k) s += eig.vectors(i, k) * phased[k];
      amps[i] = s;
    }
    trace.states.emplace_back(std::move(amps));
  }
  return trace;
}

double expectation(const ComplexMatrix& op, const StateVector& psi) {
  if (!op.square() || op.rows() != psi.dim()) {
    throw Error(ErrorCode::InvalidArgument,
                "expectation: operator is " + std::to_string(op.rows()) + "x" +
                    std::to_string(op.cols()) + " but state has dimension " +
                    std::to_string(psi.dim()));
  }
  const cplx value = inner(psi, op * psi);
  if (std::fabs(value.imag()) > 1e-9) {
    throw Error(ErrorCode::NotHermitian,
                "expectation: imaginary part " + format_double(value.imag()) +
                    " indicates a non-Hermitian operator");
  }
  return value.real();
}

}  // namespace cqed
