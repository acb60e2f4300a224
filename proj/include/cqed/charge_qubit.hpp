// charge_qubit.hpp — Cooper-pair-box / transmon Hamiltonian in the charge basis
//
//   H = 4 E_C (n - n_g)^2 - E_J cos(phi)
//
// In the basis of Cooper-pair number states |N>, the first term is diagonal
// and the second couples neighbouring charge states with amplitude -E_J/2.
// Parameters are given as E/h in GHz; matrices are built in rad/ns.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqed/linalg.hpp"

namespace cqed {

namespace codata {
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kHbar = kPlanck / kTwoPi;             // J s
}  // namespace codata

struct JunctionPhysical {
  double ic_na = 0.0;      // critical current
  double cj_ff = 0.0;      // junction capacitance
  double cshunt_ff = 0.0;  // shunt capacitance C_B
  double cg_ff = 0.0;      // gate capacitance
};

struct QubitParams {
  double ej_ghz = 0.0;
  double ec_ghz = 0.0;
  double ng = 0.0;  // offset charge in Cooper pairs
};

struct SquidBias {
  double ej_single_ghz = 0.0;
  double flux_ratio = 0.0;  // Phi / Phi_0
};

struct ChargeBasisHamiltonian {
  int n_cut = 0;         // basis spans N = -n_cut..n_cut
  ComplexMatrix matrix;  // rad/ns
  std::optional<std::string> warning;
};

struct Spectrum {
  std::vector<double> levels_ghz;  // ascending
  ComplexMatrix eigvectors;        // charge-basis amplitudes; empty if not requested
  int n_cut = 0;
  // Charge basis actually used is N = offset - n_cut .. offset + n_cut, with
  // offset the integer nearest n_g.
  int charge_offset = 0;
};

void validate(const JunctionPhysical& j);
void validate(const QubitParams& q);

/// E_C = e^2 / (2 (C_J + C_B + C_g)) and E_J = hbar I_c / 2e, both as E/h in
/// GHz.
QubitParams params_from_physical(const JunctionPhysical& j, double ng = 0.0);

/// cos(pi x) with exact zeros at half-integers and exact +-1 at integers.
double cospi(double x);

/// |2 E_J cos(pi Phi/Phi_0)|.
double squid_effective_ej(const SquidBias& s);

/// Starting truncation max(10, ceil(2 sqrt(E_J/E_C)) + 5).
int auto_ncut(const QubitParams& q);

ChargeBasisHamiltonian build_charge_hamiltonian(const QubitParams& q, int n_cut);

/// Lowest `levels` eigenenergies, converged by doubling n_cut until every
/// requested level moves by less than 1e-9 relative. Throws
/// ConvergenceFailure if n_cut would have to exceed 512.
Spectrum spectrum(const QubitParams& q, std::size_t levels, bool with_vectors = true);

double transition_energy(const QubitParams& q, std::size_t m, std::size_t n);

/// (E2 - E1) - (E1 - E0) at the given n_g.
double anharmonicity(const QubitParams& q);

/// Peak-to-peak variation of level m over n_g in [0, 1] (101 samples,
/// including 0 and 1/2). The n_g carried by `q` is ignored.
double charge_dispersion(const QubitParams& q, std::size_t m);

struct SweepRow {
  double ng = 0.0;
  std::vector<double> energies;
};

struct OffsetChargeSweep {
  std::vector<SweepRow> rows;
  // Energies were mapped through (E - offset) / scale; identity when not
  // normalized.
  double scale_ghz = 1.0;
  double offset_ghz = 0.0;
};

/// Levels E_0..E_{levels-1} on each grid point. With `normalize`, energies
/// are shifted by E_0(1/2) and divided by E_01(1/2).
OffsetChargeSweep sweep_offset_charge(const QubitParams& q, std::span<const double> ng_grid,
                                      std::size_t levels, bool normalize);

/// |<j-1|n|j>| for j = 1..j_max.
std::vector<double> charge_matrix_elements(const QubitParams& q, std::size_t j_max);

/// <i|(n - n_g)|j> for i, j < n_levels in the qubit eigenbasis, with the
/// eigenvector phase convention of hermitian_eigensolve.
ComplexMatrix charge_operator_eigenbasis(const QubitParams& q, std::size_t n_levels);

}  // namespace cqed
