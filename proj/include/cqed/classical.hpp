// classical.hpp — classical phase dynamics of a Josephson junction and of its
// mechanical analogue, the rigid pendulum.
//
//   junction:  phi'' = -8 E_C E_J sin(phi)   (energies in rad/ns, t in ns)
//   pendulum:  phi'' = -(g/R) sin(phi)

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "cqed/charge_qubit.hpp"

namespace cqed {

struct PendulumParams {
  double mass_kg = 1.0;
  double length_m = 1.0;
  double gravity = 9.80665;  // m/s^2
  double phi0 = 0.0;         // rad
  double l0 = 0.0;           // initial angular momentum, kg m^2/s
};

/// Angle and angular velocity; used for both the junction phase and the
/// pendulum angle.
struct PhaseState {
  double phi = 0.0;
  double dphi_dt = 0.0;
};

using JunctionPhaseState = PhaseState;

struct PhaseDerivative {
  double dphi_dt = 0.0;
  double d2phi_dt2 = 0.0;
};

void validate(const PendulumParams& p);

PhaseDerivative junction_eom_rhs(const PhaseState& state, const QubitParams& q);
PhaseDerivative pendulum_eom_rhs(const PhaseState& state, const PendulumParams& p);

/// Conserved Hamiltonian of each system, in the same units as its rhs.
/// Junction: (dphi/dt)^2 / (16 E_C) - E_J cos(phi)  [rad/ns].
double junction_energy(const PhaseState& state, const QubitParams& q);
/// Pendulum: L^2 / (2 m R^2) - m g R cos(phi)  [J].
double pendulum_energy(const PhaseState& state, const PendulumParams& p);

/// A separable Hamiltonian system: the acceleration must not depend on the
/// velocity, which is what makes the leapfrog scheme symplectic.
struct PhaseDynamics {
  std::function<PhaseDerivative(const PhaseState&)> rhs;
  std::function<double(const PhaseState&)> energy;
};

PhaseDynamics junction_dynamics(const QubitParams& q);
PhaseDynamics pendulum_dynamics(const PendulumParams& p);

/// Initial state of a pendulum: phi0 and L0 / (m R^2).
PhaseState pendulum_initial_state(const PendulumParams& p);

/// Small-oscillation angular frequencies.
double junction_linear_frequency(const QubitParams& q);  // sqrt(8 E_C E_J), rad/ns
double pendulum_linear_frequency(const PendulumParams& p);  // sqrt(g/R), rad/s

struct PhaseTrajectory {
  std::vector<double> times;
  std::vector<double> angles;
  std::vector<double> velocities;
  std::vector<double> energies;

  std::size_t size() const { return times.size(); }
};

/// Velocity-Verlet (kick-drift-kick leapfrog) from t = 0 to t_end. The step
/// is shrunk to t_end / ceil(t_end / dt) so the last sample lands on t_end.
/// Every `sample_every`-th step is recorded, plus the first and last.
PhaseTrajectory integrate(const PhaseDynamics& dyn, const PhaseState& initial, double t_end,
                          double dt, std::size_t sample_every = 1);

/// Classical fourth-order Runge-Kutta with the same sampling rules; kept as a
/// cross-check for the leapfrog integrator.
PhaseTrajectory integrate_rk4(const PhaseDynamics& dyn, const PhaseState& initial, double t_end,
                              double dt, std::size_t sample_every = 1);

/// Mean period from successive upward zero crossings of the angle (linear
/// interpolation between samples). Throws if fewer than two crossings exist.
double oscillation_period(const PhaseTrajectory& traj);

}  // namespace cqed
