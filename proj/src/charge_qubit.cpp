#include "cqed/charge_qubit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cqed/error.hpp"
#include "parallel.hpp"

namespace cqed {

namespace {

constexpr int kMaxNcut = 512;
constexpr double kConvergenceTol = 1e-9;
constexpr double kPi = kTwoPi / 2.0;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Integer nearest to n_g; the basis is centred there so that the spectrum is
// exactly periodic in n_g and large offsets do not need a wider truncation.
int nearest_charge(double ng) { return static_cast<int>(std::floor(ng + 0.5)); }

// Diagonal and off-diagonal of the charge-basis matrix in rad/ns.
void charge_tridiagonal(const QubitParams& q, double ng_local, int n_cut,
                        std::vector<double>& diag, std::vector<double>& off) {
  const std::size_t dim = static_cast<std::size_t>(2 * n_cut + 1);
  const double four_ec = 4.0 * to_angular(q.ec_ghz);
  const double hop = -0.5 * to_angular(q.ej_ghz);
  diag.resize(dim);
  off.assign(dim - 1, hop);
  for (std::size_t i = 0; i < dim; ++i) {
    const double n = static_cast<double>(static_cast<int>(i) - n_cut) - ng_local;
    diag[i] = four_ec * n * n;
  }
}

ComplexMatrix tridiagonal_matrix(const std::vector<double>& diag, const std::vector<double>& off) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  for (std::size_t i = 0; i < off.size(); ++i) {
    m(i + 1, i) = off[i];
    m(i, i + 1) = off[i];
  }
  return m;
}

std::vector<double> lowest_levels(const QubitParams& q, double ng_local, int n_cut,
                                  std::size_t levels) {
  std::vector<double> diag, off;
  charge_tridiagonal(q, ng_local, n_cut, diag, off);
  tridiagonal_ql(diag, off, nullptr);
  std::sort(diag.begin(), diag.end());
  diag.resize(levels);
  return diag;
}

bool converged(const std::vector<double>& coarse, const std::vector<double>& fine, double floor) {
  for (std::size_t m = 0; m < fine.size(); ++m) {
    const double scale = std::max(std::fabs(fine[m]), floor);
    if (std::fabs(fine[m] - coarse[m]) > kConvergenceTol * scale) return false;
  }
  return true;
}

}  // namespace

void validate(const JunctionPhysical& j) {
  const bool finite = std::isfinite(j.ic_na) && std::isfinite(j.cj_ff) &&
                      std::isfinite(j.cshunt_ff) && std::isfinite(j.cg_ff);
  if (!finite) throw Error(ErrorCode::InvalidArgument, "junction parameters must be finite");
  if (!(j.ic_na > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "junction: critical current I_c must be > 0 nA");
  }
  if (j.cj_ff < 0.0 || j.cshunt_ff < 0.0 || j.cg_ff < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "junction: capacitances must be >= 0 fF");
  }
  if (!(j.cj_ff + j.cshunt_ff > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "junction: C_J + C_shunt must be > 0 (zero total capacitance)");
  }
}

void validate(const QubitParams& q) {
  if (!std::isfinite(q.ej_ghz) || !std::isfinite(q.ec_ghz) || !std::isfinite(q.ng)) {
    throw Error(ErrorCode::InvalidArgument, "qubit parameters must be finite");
  }
  if (q.ej_ghz < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "qubit: E_J must be >= 0, got " + num(q.ej_ghz));
  }
  if (!(q.ec_ghz > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "qubit: E_C must be > 0, got " + num(q.ec_ghz));
  }
}

QubitParams params_from_physical(const JunctionPhysical& j, double ng) {
  validate(j);
  using namespace codata;
  const double c_total = (j.cj_ff + j.cshunt_ff + j.cg_ff) * 1e-15;
  const double ic = j.ic_na * 1e-9;
  const double ec_joule = kElementaryCharge * kElementaryCharge / (2.0 * c_total);
  const double ej_joule = kHbar * ic / (2.0 * kElementaryCharge);
  QubitParams q;
  q.ec_ghz = ec_joule / kPlanck * 1e-9;
  q.ej_ghz = ej_joule / kPlanck * 1e-9;
  q.ng = ng;
  return q;
}

double cospi(double x) {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  double r = std::fmod(std::fabs(x), 2.0);
  if (r > 1.0) r = 2.0 - r;
  double sign = 1.0;
  if (r > 0.5) {
    r = 1.0 - r;
    sign = -1.0;
  }
  if (r == 0.5) return 0.0;
  return r <= 0.25 ? sign * std::cos(kPi * r) : sign * std::sin(kPi * (0.5 - r));
}

double squid_effective_ej(const SquidBias& s) {
  if (!std::isfinite(s.ej_single_ghz) || !std::isfinite(s.flux_ratio)) {
    throw Error(ErrorCode::InvalidArgument, "SQUID bias must be finite");
  }
  if (s.ej_single_ghz < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "SQUID: per-junction E_J must be >= 0");
  }
  return std::fabs(2.0 * s.ej_single_ghz * cospi(s.flux_ratio));
}

int auto_ncut(const QubitParams& q) {
  const int spread = static_cast<int>(std::ceil(2.0 * std::sqrt(q.ej_ghz / q.ec_ghz))) + 5;
  return std::max(10, spread);
}

ChargeBasisHamiltonian build_charge_hamiltonian(const QubitParams& q, int n_cut) {
  validate(q);
  if (n_cut < 1) {
    throw Error(ErrorCode::InvalidArgument, "build_charge_hamiltonian: n_cut must be >= 1");
  }
  std::vector<double> diag, off;
  charge_tridiagonal(q, q.ng, n_cut, diag, off);

  ChargeBasisHamiltonian h;
  h.n_cut = n_cut;
  h.matrix = tridiagonal_matrix(diag, off);
  if (const int suggested = auto_ncut(q); n_cut < suggested) {
    h.warning = "charge basis truncated at n_cut = " + std::to_string(n_cut) +
                ", below the suggested " + std::to_string(suggested) + " for E_J/E_C = " +
                num(q.ej_ghz / q.ec_ghz);
  }
  return h;
}

Spectrum spectrum(const QubitParams& q, std::size_t levels, bool with_vectors) {
  validate(q);
  if (levels == 0) throw Error(ErrorCode::InvalidArgument, "spectrum: need at least one level");
  if (levels > static_cast<std::size_t>(2 * kMaxNcut)) {
    throw Error(ErrorCode::InvalidArgument,
                "spectrum: " + std::to_string(levels) + " levels exceed 2 * max n_cut");
  }

  const int offset = nearest_charge(q.ng);
  const double ng_local = q.ng - offset;
  const double floor = to_angular(q.ec_ghz);

  int n_cut = std::max(auto_ncut(q), static_cast<int>((levels + 1) / 2));
  n_cut = std::min(n_cut, kMaxNcut);
  std::vector<double> coarse = lowest_levels(q, ng_local, n_cut, levels);
  for (;;) {
    if (n_cut >= kMaxNcut) {
      throw Error(ErrorCode::ConvergenceFailure,
                  "spectrum: " + std::to_string(levels) + " levels not converged to " +
                      num(kConvergenceTol) + " relative by n_cut = " + std::to_string(kMaxNcut) +
                      " (E_J = " + num(q.ej_ghz) + " GHz, E_C = " + num(q.ec_ghz) +
                      " GHz, n_g = " + num(q.ng) + ")");
    }
    const int next = std::min(2 * n_cut, kMaxNcut);
    std::vector<double> fine = lowest_levels(q, ng_local, next, levels);
    n_cut = next;
    const bool done = converged(coarse, fine, floor);
    coarse = std::move(fine);
    if (done) break;
  }

  Spectrum s;
  s.n_cut = n_cut;
  s.charge_offset = offset;
  if (with_vectors) {
    std::vector<double> diag, off;
    charge_tridiagonal(q, ng_local, n_cut, diag, off);
    EigenDecomposition eig = hermitian_eigensolve(tridiagonal_matrix(diag, off), levels);
    s.levels_ghz.resize(levels);
    for (std::size_t m = 0; m < levels; ++m) s.levels_ghz[m] = to_ghz(eig.values[m]);
    s.eigvectors = std::move(eig.vectors);
  } else {
    s.levels_ghz.resize(levels);
    for (std::size_t m = 0; m < levels; ++m) s.levels_ghz[m] = to_ghz(coarse[m]);
  }
  return s;
}

double transition_energy(const QubitParams& q, std::size_t m, std::size_t n) {
  if (!(m < n)) {
    throw Error(ErrorCode::InvalidArgument,
                "transition_energy: need m < n, got (" + std::to_string(m) + ", " +
                    std::to_string(n) + ")");
  }
  const Spectrum s = spectrum(q, n + 1, false);
  return s.levels_ghz[n] - s.levels_ghz[m];
}

double anharmonicity(const QubitParams& q) {
  const Spectrum s = spectrum(q, 3, false);
  const auto& e = s.levels_ghz;
  return (e[2] - e[1]) - (e[1] - e[0]);
}

double charge_dispersion(const QubitParams& q, std::size_t m) {
  constexpr std::size_t kSamples = 101;
  std::vector<double> values(kSamples);
  detail::parallel_for(kSamples, [&](std::size_t i) {
    QubitParams at = q;
    at.ng = static_cast<double>(i) / static_cast<double>(kSamples - 1);
    values[i] = spectrum(at, m + 1, false).levels_ghz[m];
  });
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

OffsetChargeSweep sweep_offset_charge(const QubitParams& q, std::span<const double> ng_grid,
                                      std::size_t levels, bool normalize) {
  if (ng_grid.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep_offset_charge: empty n_g grid");
  }
  for (double ng : ng_grid) {
    if (!std::isfinite(ng)) {
      throw Error(ErrorCode::InvalidArgument, "sweep_offset_charge: non-finite n_g in grid");
    }
  }
  const std::size_t solve_levels = std::max<std::size_t>(levels, normalize ? 2 : 1);

  OffsetChargeSweep out;
  if (normalize) {
    QubitParams half = q;
    half.ng = 0.5;
    const Spectrum s = spectrum(half, 2, false);
    out.offset_ghz = s.levels_ghz[0];
    out.scale_ghz = s.levels_ghz[1] - s.levels_ghz[0];
    if (!(out.scale_ghz > 0.0)) {
      throw Error(ErrorCode::NumericalFailure,
                  "sweep_offset_charge: E_01 vanishes at n_g = 1/2; cannot normalize "
                  "(E_J = 0 is degenerate there)");
    }
  }

  out.rows.resize(ng_grid.size());
  detail::parallel_for(ng_grid.size(), [&](std::size_t i) {
    QubitParams at = q;
    at.ng = ng_grid[i];
    const Spectrum s = spectrum(at, solve_levels, false);
    SweepRow row;
    row.ng = ng_grid[i];
    row.energies.resize(levels);
    for (std::size_t m = 0; m < levels; ++m) {
      row.energies[m] = (s.levels_ghz[m] - out.offset_ghz) / out.scale_ghz;
    }
    out.rows[i] = std::move(row);
  });
  return out;
}

ComplexMatrix charge_operator_eigenbasis(const QubitParams& q, std::size_t n_levels) {
  if (n_levels == 0) {
    throw Error(ErrorCode::InvalidArgument, "charge_operator_eigenbasis: need >= 1 level");
  }
  const Spectrum s = spectrum(q, n_levels, true);
  const double ng_local = q.ng - s.charge_offset;
  const std::size_t dim = s.eigvectors.rows();
  ComplexMatrix out(n_levels, n_levels);
  for (std::size_t a = 0; a < n_levels; ++a) {
    for (std::size_t b = 0; b < n_levels; ++b) {
      cplx sum{};
      for (std::size_t i = 0; i < dim; ++i) {
        const double charge = static_cast<double>(static_cast<int>(i) - s.n_cut) - ng_local;
        sum += std::conj(s.eigvectors(i, a)) * charge * s.eigvectors(i, b);
      }
      out(a, b) = sum;
    }
  }
  return out;
}

std::vector<double> charge_matrix_elements(const QubitParams& q, std::size_t j_max) {
  if (j_max < 1) {
    throw Error(ErrorCode::InvalidArgument, "charge_matrix_elements: j_max must be >= 1");
  }
  const ComplexMatrix n = charge_operator_eigenbasis(q, j_max + 1);
  std::vector<double> out(j_max);
  for (std::size_t j = 1; j <= j_max; ++j) out[j - 1] = std::abs(n(j - 1, j));
  return out;
}

}  // namespace cqed
