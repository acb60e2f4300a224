#include "cqed/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cqed/error.hpp"

namespace cqed {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Operator on the transmon factor, in rad/ns: projectors weighted by level.
ComplexMatrix transmon_free(const CoupledSystemSpec& spec) {
  std::vector<double> w(spec.n_transmon);
  for (std::size_t j = 0; j < spec.n_transmon; ++j) w[j] = to_angular(spec.transmon_levels_ghz[j]);
  return ComplexMatrix::diagonal(std::span<const double>(w));
}

ComplexMatrix number_operator(std::size_t n_fock) {
  std::vector<double> n(n_fock);
  for (std::size_t k = 0; k < n_fock; ++k) n[k] = static_cast<double>(k);
  return ComplexMatrix::diagonal(std::span<const double>(n));
}

// |row><col| on the transmon factor.
ComplexMatrix transmon_ket_bra(std::size_t n, std::size_t row, std::size_t col) {
  ComplexMatrix m(n, n);
  m(row, col) = 1.0;
  return m;
}

// Dressed eigenvalue whose eigenvector overlaps most with the bare state.
double dressed_energy(const EigenDecomposition& eig, std::size_t bare) {
  std::size_t best = 0;
  double best_overlap = -1.0;
  for (std::size_t c = 0; c < eig.values.size(); ++c) {
    const double overlap = std::norm(eig.vectors(bare, c));
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = c;
    }
  }
  return eig.values[best];
}

}  // namespace

ResonatorParams resonator_from_lc(double lr_nh, double cr_ff, double kappa_mhz) {
  if (!(lr_nh > 0.0) || !(cr_ff > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "resonator: L_r and C_r must be > 0");
  }
  ResonatorParams r;
  r.lr_nh = lr_nh;
  r.cr_ff = cr_ff;
  r.kappa_mhz = kappa_mhz;
  r.fr_ghz = 1.0 / (kTwoPi * std::sqrt(lr_nh * 1e-9 * cr_ff * 1e-15)) * 1e-9;
  validate(r);
  return r;
}

void validate(const ResonatorParams& r) {
  if (!(r.fr_ghz > 0.0) || !std::isfinite(r.fr_ghz)) {
    throw Error(ErrorCode::InvalidArgument, "resonator: f_r must be > 0 GHz");
  }
  if (!(r.kappa_mhz > 0.0) || !std::isfinite(r.kappa_mhz)) {
    throw Error(ErrorCode::InvalidArgument, "resonator: kappa must be > 0 MHz");
  }
  if (r.cr_ff && !(*r.cr_ff > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "resonator: C_r must be > 0 fF");
  }
  if (r.lr_nh && !(*r.lr_nh > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "resonator: L_r must be > 0 nH");
  }
  if (r.cr_ff && r.lr_nh) {
    const double f_lc = 1.0 / (kTwoPi * std::sqrt(*r.lr_nh * 1e-9 * *r.cr_ff * 1e-15)) * 1e-9;
    if (std::fabs(f_lc - r.fr_ghz) > 1e-9 * r.fr_ghz) {
      throw Error(ErrorCode::InvalidArgument,
                  "resonator: f_r = " + num(r.fr_ghz) + " GHz inconsistent with L_r, C_r (" +
                      num(f_lc) + " GHz)");
    }
  }
}

double rms_vacuum_voltage(const ResonatorParams& r) {
  validate(r);
  if (!r.cr_ff) {
    throw Error(ErrorCode::InvalidArgument, "resonator: C_r is required for V_rms");
  }
  const double omega = kTwoPi * r.fr_ghz * 1e9;
  return std::sqrt(codata::kHbar * omega / (2.0 * *r.cr_ff * 1e-15));
}

void validate(const CoupledSystemSpec& spec) {
  if (spec.n_transmon < 2) {
    throw Error(ErrorCode::InvalidArgument, "coupled system: n_transmon must be >= 2");
  }
  if (spec.n_fock < 2) throw Error(ErrorCode::InvalidArgument, "coupled system: n_fock must be >= 2");
  if (spec.transmon_levels_ghz.size() != spec.n_transmon) {
    throw Error(ErrorCode::InvalidArgument,
                "coupled system: expected " + std::to_string(spec.n_transmon) +
                    " transmon levels, got " + std::to_string(spec.transmon_levels_ghz.size()));
  }
  if (spec.coupling.g_ghz.size() + 1 != spec.n_transmon) {
    throw Error(ErrorCode::InvalidArgument,
                "coupled system: expected " + std::to_string(spec.n_transmon - 1) +
                    " coupling strengths g_j, got " + std::to_string(spec.coupling.g_ghz.size()));
  }
  for (double g : spec.coupling.g_ghz) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw Error(ErrorCode::InvalidArgument, "coupled system: g_j must be finite and >= 0");
    }
  }
  if (!(spec.coupling.beta >= 0.0 && spec.coupling.beta <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "coupled system: beta must lie in [0, 1]");
  }
  if (!spec.charge_coupling_ghz.empty() &&
      (spec.charge_coupling_ghz.rows() != spec.n_transmon ||
       !check_hermitian(spec.charge_coupling_ghz).hermitian)) {
    throw Error(ErrorCode::InvalidArgument,
                "coupled system: charge coupling must be a Hermitian n_transmon square matrix");
  }
  validate(spec.resonator);
}

CoupledSystemSpec transmon_resonator_spec(const QubitParams& q, const ResonatorParams& r,
                                          double beta, std::size_t n_transmon,
                                          std::size_t n_fock) {
  validate(q);
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "coupling: beta must lie in [0, 1]");
  }
  if (n_transmon < 2) throw Error(ErrorCode::InvalidArgument, "coupled system: n_transmon must be >= 2");

  CoupledSystemSpec spec;
  spec.n_transmon = n_transmon;
  spec.n_fock = n_fock;
  spec.resonator = r;
  spec.qubit = q;

  const Spectrum s = spectrum(q, n_transmon, false);
  spec.transmon_levels_ghz.resize(n_transmon);
  for (std::size_t j = 0; j < n_transmon; ++j) {
    spec.transmon_levels_ghz[j] = s.levels_ghz[j] - s.levels_ghz[0];
  }

  spec.coupling.beta = beta;
  spec.coupling.v_rms = rms_vacuum_voltage(r);
  const double scale =
      2.0 * codata::kElementaryCharge * beta * spec.coupling.v_rms / codata::kPlanck * 1e-9;
  spec.charge_coupling_ghz = charge_operator_eigenbasis(q, n_transmon) * cplx{scale};
  spec.coupling.g_ghz.resize(n_transmon - 1);
  for (std::size_t j = 1; j < n_transmon; ++j) {
    spec.coupling.g_ghz[j - 1] = std::abs(spec.charge_coupling_ghz(j - 1, j));
  }
  validate(spec);
  return spec;
}

CoupledSystemSpec two_level_spec(double f01_ghz, double fr_ghz, double g_ghz, std::size_t n_fock) {
  CoupledSystemSpec spec;
  spec.n_transmon = 2;
  spec.n_fock = n_fock;
  spec.transmon_levels_ghz = {0.0, f01_ghz};
  spec.resonator.fr_ghz = fr_ghz;
  spec.coupling.g_ghz = {g_ghz};
  validate(spec);
  return spec;
}

LadderOperators ladder_operators(std::size_t n_fock) {
  if (n_fock < 1) throw Error(ErrorCode::InvalidArgument, "ladder_operators: n_fock must be >= 1");
  LadderOperators ops;
  ops.a = ComplexMatrix(n_fock, n_fock);
  for (std::size_t k = 1; k < n_fock; ++k) ops.a(k - 1, k) = std::sqrt(static_cast<double>(k));
  ops.a_dag = ops.a.adjoint();
  return ops;
}

std::vector<double> coupling_strengths(const QubitParams& q, double beta, const ResonatorParams& r,
                                       std::size_t j_max) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "coupling: beta must lie in [0, 1]");
  }
  const double v_rms = rms_vacuum_voltage(r);
  const double scale = 2.0 * codata::kElementaryCharge * beta * v_rms / codata::kPlanck * 1e-9;
  std::vector<double> g = charge_matrix_elements(q, j_max);
  for (double& x : g) x *= scale;
  return g;
}

ComplexMatrix build_uncoupled_hamiltonian(const CoupledSystemSpec& spec) {
  validate(spec);
  const auto id_t = ComplexMatrix::identity(spec.n_transmon);
  const auto id_r = ComplexMatrix::identity(spec.n_fock);
  ComplexMatrix h = kron(transmon_free(spec), id_r);
  h += kron(id_t, number_operator(spec.n_fock)) * cplx{to_angular(spec.resonator.fr_ghz)};
  return h;
}

ComplexMatrix build_jc_hamiltonian(const CoupledSystemSpec& spec) {
  ComplexMatrix h = build_uncoupled_hamiltonian(spec);
  const auto ops = ladder_operators(spec.n_fock);
  for (std::size_t j = 1; j < spec.n_transmon; ++j) {
    const double g = to_angular(spec.coupling.g_ghz[j - 1]);
    if (g == 0.0) continue;
    ComplexMatrix term = kron(transmon_ket_bra(spec.n_transmon, j - 1, j), ops.a_dag);
    term += kron(transmon_ket_bra(spec.n_transmon, j, j - 1), ops.a);
    h += term * cplx{g};
  }
  return h;
}

ComplexMatrix build_full_interaction(const CoupledSystemSpec& spec) {
  ComplexMatrix h = build_uncoupled_hamiltonian(spec);
  ComplexMatrix charge = spec.charge_coupling_ghz;
  if (charge.empty()) {
    charge = ComplexMatrix(spec.n_transmon, spec.n_transmon);
    for (std::size_t j = 1; j < spec.n_transmon; ++j) {
      charge(j - 1, j) = spec.coupling.g_ghz[j - 1];
      charge(j, j - 1) = spec.coupling.g_ghz[j - 1];
    }
  }
  const auto ops = ladder_operators(spec.n_fock);
  h += kron(charge * cplx{kTwoPi}, ops.a + ops.a_dag);
  return h;
}

ComplexMatrix excitation_number_operator(const CoupledSystemSpec& spec) {
  validate(spec);
  ComplexMatrix levels = number_operator(spec.n_transmon);
  ComplexMatrix n = kron(levels, ComplexMatrix::identity(spec.n_fock));
  n += kron(ComplexMatrix::identity(spec.n_transmon), number_operator(spec.n_fock));
  return n;
}

DispersiveResult dispersive_shift(const CoupledSystemSpec& spec) {
  validate(spec);
  DispersiveResult out;
  out.delta_ghz = std::fabs(spec.f01_ghz() - spec.resonator.fr_ghz);
  if (!(out.delta_ghz > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "dispersive_shift: qubit and resonator are resonant (Delta = 0); "
                "the dispersive approximation does not apply");
  }
  const double g1 = spec.coupling.g_ghz[0];
  out.chi_ghz = g1 * g1 / out.delta_ghz;
  out.validity = g1 > 0.0 ? out.delta_ghz / g1 : std::numeric_limits<double>::infinity();
  return out;
}

DressedComparison dressed_dispersive_comparison(const CoupledSystemSpec& spec) {
  const DispersiveResult disp = dispersive_shift(spec);
  if (spec.n_fock < 3) {
    throw Error(ErrorCode::InvalidArgument,
                "dressed_dispersive_comparison: n_fock must be >= 3 to resolve |1,1>");
  }
  const EigenDecomposition eig = hermitian_eigensolve(build_jc_hamiltonian(spec));
  const double e00 = to_ghz(dressed_energy(eig, spec.index(0, 0)));
  const double e01 = to_ghz(dressed_energy(eig, spec.index(0, 1)));
  const double e10 = to_ghz(dressed_energy(eig, spec.index(1, 0)));
  const double e11 = to_ghz(dressed_energy(eig, spec.index(1, 1)));
  const double fr = spec.resonator.fr_ghz;

  DressedComparison out;
  out.chi_ghz = disp.chi_ghz;
  out.pull_ground_ghz = (e01 - e00) - fr;
  out.pull_excited_ghz = (e11 - e10) - fr;
  out.dressed_shift_ghz = std::fabs(out.pull_ground_ghz);
  return out;
}

RabiTrace vacuum_rabi_trace(const CoupledSystemSpec& spec, std::span<const double> t_grid_ns) {
  validate(spec);
  const double detuning = spec.f01_ghz() - spec.resonator.fr_ghz;
  if (std::fabs(detuning) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument,
                "vacuum_rabi_trace: qubit and resonator must be resonant, detuning is " +
                    num(detuning) + " GHz");
  }
  const ComplexMatrix h = build_jc_hamiltonian(spec);
  const TimeTrace trace = evolve(h, StateVector::basis(spec.dim(), spec.index(1, 0)), t_grid_ns);

  RabiTrace out;
  out.times_ns = trace.times;
  for (const StateVector& psi : trace.states) {
    double excited = 0.0, photon = 0.0, total = 0.0;
    for (std::size_t j = 0; j < spec.n_transmon; ++j) {
      for (std::size_t k = 0; k < spec.n_fock; ++k) {
        const double p = psi.population(spec.index(j, k));
        total += p;
        if (j == 1) excited += p;
        if (k == 1) photon += p;
      }
    }
    out.p_excited.push_back(excited);
    out.p_photon.push_back(photon);
    out.p_total.push_back(total);
  }
  return out;
}

double rabi_swap_frequency(const CoupledSystemSpec& spec) {
  validate(spec);
  const double g1 = spec.coupling.g_ghz[0];
  if (!(g1 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rabi_swap_frequency: g_1 must be > 0");
  }
  const EigenDecomposition eig = hermitian_eigensolve(build_jc_hamiltonian(spec));
  const StateVector psi0 = StateVector::basis(spec.dim(), spec.index(1, 0));
  const auto photon = [&](double t) {
    const double grid[] = {t};
    const StateVector psi = evolve(eig, psi0, grid).states.front();
    double p = 0.0;
    for (std::size_t j = 0; j < spec.n_transmon; ++j) p += psi.population(spec.index(j, 1));
    return p;
  };

  // Scan one bare-coupling Rabi period in 400 steps, then refine the first
  // sampled maximum.
  constexpr std::size_t kScan = 400;
  const double t_scan = 1.0 / g1;
  const double step = t_scan / kScan;
  double prev = photon(0.0);
  double cur = photon(step);
  std::size_t peak = 0;
  for (std::size_t i = 2; i <= kScan; ++i) {
    const double next = photon(step * static_cast<double>(i));
    if (cur >= prev && cur > next) {
      peak = i - 1;
      break;
    }
    prev = cur;
    cur = next;
  }
  if (peak == 0) {
    throw Error(ErrorCode::NumericalFailure, "rabi_swap_frequency: no population maximum found");
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = step * static_cast<double>(peak - 1);
  double hi = step * static_cast<double>(peak + 1);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = photon(x1), f2 = photon(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = photon(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = photon(x1);
    }
  }
  const double t_swap = 0.5 * (lo + hi);
  return (kTwoPi / 4.0) / t_swap;
}

TransmissionSpectrum transmission_spectrum(const CoupledSystemSpec& spec, QubitState state,
                                           std::span<const double> f_grid_ghz,
                                           double min_validity) {
  const DispersiveResult disp = dispersive_shift(spec);
  TransmissionSpectrum out;
  out.chi_ghz = disp.chi_ghz;
  const double fr = spec.resonator.fr_ghz;
  out.peak_ghz = state == QubitState::Ground ? fr + disp.chi_ghz : fr - disp.chi_ghz;
  if (disp.validity < min_validity) {
    out.warning = "dispersive validity Delta/g_1 = " + num(disp.validity) + " is below " +
                  num(min_validity) + "; the state-dependent shift is not reliable";
  }
  const double half_width = 0.5 * spec.resonator.kappa_mhz * 1e-3;
  const double hw2 = half_width * half_width;
  out.f_ghz.assign(f_grid_ghz.begin(), f_grid_ghz.end());
  out.s21_sq.reserve(f_grid_ghz.size());
  for (double f : f_grid_ghz) {
    const double d = f - out.peak_ghz;
    out.s21_sq.push_back(hw2 / (d * d + hw2));
  }
  return out;
}

}  // namespace cqed
