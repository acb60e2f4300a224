// cavity.hpp — a transmon capacitively coupled to one resonator mode.
//
// Composite states are ordered transmon (x) resonator: |j, k> sits at index
// j * n_fock + k. Frequencies in the public structs are GHz; the assembled
// Hamiltonians are in rad/ns.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqed/charge_qubit.hpp"
#include "cqed/linalg.hpp"

namespace cqed {

struct ResonatorParams {
  double fr_ghz = 6.0;
  std::optional<double> cr_ff;  // needed for V_rms
  std::optional<double> lr_nh;
  double kappa_mhz = 1.0;  // readout linewidth
};

/// f_r = 1 / (2 pi sqrt(L_r C_r)).
ResonatorParams resonator_from_lc(double lr_nh, double cr_ff, double kappa_mhz = 1.0);
void validate(const ResonatorParams& r);

/// sqrt(hbar omega_r / 2 C_r) in volts.
double rms_vacuum_voltage(const ResonatorParams& r);

struct CouplingParams {
  double beta = 0.0;   // C_g / (C_g + C_q)
  double v_rms = 0.0;  // V
  std::vector<double> g_ghz;  // g_1 .. g_{n_transmon-1}
};

struct CoupledSystemSpec {
  std::size_t n_transmon = 3;
  std::size_t n_fock = 10;
  // Transmon eigenenergies E_j/h, ascending; only differences matter.
  std::vector<double> transmon_levels_ghz;
  ResonatorParams resonator;
  CouplingParams coupling;
  // 2 e beta V_rms <i|n|j> / h in the transmon eigenbasis (n_transmon square).
  // Left empty for models defined directly by g_j, in which case the
  // nearest-neighbour matrix with entries g_j stands in for it.
  ComplexMatrix charge_coupling_ghz;
  std::optional<QubitParams> qubit;

  std::size_t dim() const { return n_transmon * n_fock; }
  std::size_t index(std::size_t j, std::size_t k) const { return j * n_fock + k; }
  double f01_ghz() const { return transmon_levels_ghz.at(1) - transmon_levels_ghz.at(0); }
};

void validate(const CoupledSystemSpec& spec);

/// Spec derived from circuit parameters: levels from the charge-basis
/// spectrum, g_j from `coupling_strengths`. Requires `r.cr_ff`.
CoupledSystemSpec transmon_resonator_spec(const QubitParams& q, const ResonatorParams& r,
                                          double beta, std::size_t n_transmon,
                                          std::size_t n_fock);

/// Two-level qubit at f01 with coupling g, directly parameterized.
CoupledSystemSpec two_level_spec(double f01_ghz, double fr_ghz, double g_ghz,
                                 std::size_t n_fock);

struct LadderOperators {
  ComplexMatrix a;
  ComplexMatrix a_dag;
};

/// Truncated annihilation/creation operators, a|k> = sqrt(k)|k-1>.
LadderOperators ladder_operators(std::size_t n_fock);

/// g_j = 2 e beta V_rms |<j-1|n|j>| / h in GHz, for j = 1..j_max.
std::vector<double> coupling_strengths(const QubitParams& q, double beta,
                                       const ResonatorParams& r, std::size_t j_max);

/// Free transmon + free resonator, no coupling.
ComplexMatrix build_uncoupled_hamiltonian(const CoupledSystemSpec& spec);

/// Generalized Jaynes-Cummings form: free terms plus
/// sum_j g_j (|j-1><j| (x) a^dag + |j><j-1| (x) a).
ComplexMatrix build_jc_hamiltonian(const CoupledSystemSpec& spec);

/// Free terms plus the full capacitive coupling (charge coupling) (x) (a + a^dag),
/// without the rotating-wave approximation.
ComplexMatrix build_full_interaction(const CoupledSystemSpec& spec);

/// sum_j j |j><j| (x) I + I (x) a^dag a.
ComplexMatrix excitation_number_operator(const CoupledSystemSpec& spec);

struct DispersiveResult {
  double chi_ghz = 0.0;    // g_1^2 / Delta
  double delta_ghz = 0.0;  // |f_01 - f_r|
  double validity = 0.0;   // Delta / g_1 (infinite when g_1 = 0)
};

DispersiveResult dispersive_shift(const CoupledSystemSpec& spec);

/// Exact diagonalization of the Jaynes-Cummings Hamiltonian compared with
/// the dispersive formula. All values in GHz.
struct DressedComparison {
  double chi_ghz = 0.0;
  // |E(~|0,1>) - E(~|0,0>) - f_r|: dressing of the one-photon state.
  double dressed_shift_ghz = 0.0;
  // Dressed resonator frequency minus f_r, with the qubit in |0> and in |1>.
  double pull_ground_ghz = 0.0;
  double pull_excited_ghz = 0.0;

  double pull_difference_ghz() const { return pull_ground_ghz - pull_excited_ghz; }
};

DressedComparison dressed_dispersive_comparison(const CoupledSystemSpec& spec);

struct RabiTrace {
  std::vector<double> times_ns;
  std::vector<double> p_excited;  // transmon in |1>, any photon number
  std::vector<double> p_photon;   // exactly one photon, any transmon level
  std::vector<double> p_total;    // sum over every basis state
};

/// Evolution of |1, 0> under the Jaynes-Cummings Hamiltonian. Requires
/// |f_01 - f_r| <= 1e-9 GHz.
RabiTrace vacuum_rabi_trace(const CoupledSystemSpec& spec, std::span<const double> t_grid_ns);

/// Angular swap frequency Omega (rad/ns) such that P_photon(t) peaks first at
/// t = pi / (2 Omega), located by a sampled scan refined with a golden-section
/// search on the exact propagator.
double rabi_swap_frequency(const CoupledSystemSpec& spec);

enum class QubitState { Ground, Excited };

struct TransmissionSpectrum {
  std::vector<double> f_ghz;
  std::vector<double> s21_sq;
  double peak_ghz = 0.0;
  double chi_ghz = 0.0;
  std::optional<std::string> warning;
};

/// Lorentzian |S21|^2 centred at f_r + chi (ground) or f_r - chi (excited).
/// A dispersive validity ratio below `min_validity` is reported through
/// `warning` rather than rejected.
TransmissionSpectrum transmission_spectrum(const CoupledSystemSpec& spec, QubitState state,
                                           std::span<const double> f_grid_ghz,
                                           double min_validity = 5.0);

}  // namespace cqed
