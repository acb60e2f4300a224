#include "cqed/classical.hpp"

#include <cmath>
#include <string>

#include "cqed/error.hpp"

namespace cqed {

namespace {

std::size_t step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidArgument, "integrate: dt must be > 0");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::InvalidArgument, "integrate: t_end must be > 0");
  }
  const double ratio = t_end / dt;
  if (ratio > 1e10) {
    throw Error(ErrorCode::InvalidArgument, "integrate: more than 1e10 steps requested");
  }
  // Tolerate t_end / dt landing a hair above an integer.
  return static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-14)));
}

class Recorder {
 public:
  Recorder(const PhaseDynamics& dyn, std::size_t steps, std::size_t every)
      : dyn_(dyn), steps_(steps), every_(every == 0 ? 1 : every) {
    const std::size_t n = steps_ / every_ + 2;
    traj_.times.reserve(n);
    traj_.angles.reserve(n);
    traj_.velocities.reserve(n);
    traj_.energies.reserve(n);
  }

  void offer(std::size_t step, double t, const PhaseState& s) {
    if (!std::isfinite(s.phi) || !std::isfinite(s.dphi_dt)) {
      throw Error(ErrorCode::NumericalFailure,
                  "integrate: non-finite state at step " + std::to_string(step));
    }
    if (step % every_ != 0 && step != steps_) return;
    traj_.times.push_back(t);
    traj_.angles.push_back(s.phi);
    traj_.velocities.push_back(s.dphi_dt);
    traj_.energies.push_back(dyn_.energy ? dyn_.energy(s) : 0.0);
  }

  PhaseTrajectory take() { return std::move(traj_); }

 private:
  const PhaseDynamics& dyn_;
  std::size_t steps_;
  std::size_t every_;
  PhaseTrajectory traj_;
};

}  // namespace

void validate(const PendulumParams& p) {
  if (!(p.mass_kg > 0.0)) throw Error(ErrorCode::InvalidArgument, "pendulum: mass must be > 0");
  if (!(p.length_m > 0.0)) throw Error(ErrorCode::InvalidArgument, "pendulum: length must be > 0");
  if (!(p.gravity >= 0.0)) throw Error(ErrorCode::InvalidArgument, "pendulum: g must be >= 0");
  if (!std::isfinite(p.phi0) || !std::isfinite(p.l0)) {
    throw Error(ErrorCode::InvalidArgument, "pendulum: initial conditions must be finite");
  }
}

PhaseDerivative junction_eom_rhs(const PhaseState& state, const QubitParams& q) {
  const double omega_sq = 8.0 * to_angular(q.ec_ghz) * to_angular(q.ej_ghz);
  return {state.dphi_dt, -omega_sq * std::sin(state.phi)};
}

PhaseDerivative pendulum_eom_rhs(const PhaseState& state, const PendulumParams& p) {
  return {state.dphi_dt, -(p.gravity / p.length_m) * std::sin(state.phi)};
}

double junction_energy(const PhaseState& state, const QubitParams& q) {
  const double ec = to_angular(q.ec_ghz);
  const double ej = to_angular(q.ej_ghz);
  // n = (dphi/dt) / (8 E_C) from Hamilton's equations with hbar = 1.
  return state.dphi_dt * state.dphi_dt / (16.0 * ec) - ej * std::cos(state.phi);
}

double pendulum_energy(const PhaseState& state, const PendulumParams& p) {
  const double inertia = p.mass_kg * p.length_m * p.length_m;
  const double l = inertia * state.dphi_dt;
  return l * l / (2.0 * inertia) - p.mass_kg * p.gravity * p.length_m * std::cos(state.phi);
}

PhaseDynamics junction_dynamics(const QubitParams& q) {
  validate(q);
  return {[q](const PhaseState& s) { return junction_eom_rhs(s, q); },
          [q](const PhaseState& s) { return junction_energy(s, q); }};
}

PhaseDynamics pendulum_dynamics(const PendulumParams& p) {
  validate(p);
  return {[p](const PhaseState& s) { return pendulum_eom_rhs(s, p); },
          [p](const PhaseState& s) { return pendulum_energy(s, p); }};
}

PhaseState pendulum_initial_state(const PendulumParams& p) {
  validate(p);
  return {p.phi0, p.l0 / (p.mass_kg * p.length_m * p.length_m)};
}

double junction_linear_frequency(const QubitParams& q) {
  return std::sqrt(8.0 * to_angular(q.ec_ghz) * to_angular(q.ej_ghz));
}

double pendulum_linear_frequency(const PendulumParams& p) {
  return std::sqrt(p.gravity / p.length_m);
}

PhaseTrajectory integrate(const PhaseDynamics& dyn, const PhaseState& initial, double t_end,
                          double dt, std::size_t sample_every) {
  const std::size_t steps = step_count(t_end, dt);
  const double h = t_end / static_cast<double>(steps);
  Recorder rec(dyn, steps, sample_every);

  PhaseState s = initial;
  double accel = dyn.rhs(s).d2phi_dt2;
  rec.offer(0, 0.0, s);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double v_half = s.dphi_dt + 0.5 * h * accel;
    s.phi += h * v_half;
    accel = dyn.rhs(s).d2phi_dt2;
    s.dphi_dt = v_half + 0.5 * h * accel;
    rec.offer(k, k == steps ? t_end : static_cast<double>(k) * h, s);
  }
  return rec.take();
}

PhaseTrajectory integrate_rk4(const PhaseDynamics& dyn, const PhaseState& initial, double t_end,
                              double dt, std::size_t sample_every) {
  const std::size_t steps = step_count(t_end, dt);
  const double h = t_end / static_cast<double>(steps);
  Recorder rec(dyn, steps, sample_every);

  const auto shifted = [](const PhaseState& s, const PhaseDerivative& d, double f) {
    return PhaseState{s.phi + f * d.dphi_dt, s.dphi_dt + f * d.d2phi_dt2};
  };
  PhaseState s = initial;
  rec.offer(0, 0.0, s);
  for (std::size_t k = 1; k <= steps; ++k) {
    const PhaseDerivative k1 = dyn.rhs(s);
    const PhaseDerivative k2 = dyn.rhs(shifted(s, k1, 0.5 * h));
    const PhaseDerivative k3 = dyn.rhs(shifted(s, k2, 0.5 * h));
    const PhaseDerivative k4 = dyn.rhs(shifted(s, k3, h));
    s.phi += h / 6.0 * (k1.dphi_dt + 2.0 * k2.dphi_dt + 2.0 * k3.dphi_dt + k4.dphi_dt);
    s.dphi_dt += h / 6.0 * (k1.d2phi_dt2 + 2.0 * k2.d2phi_dt2 + 2.0 * k3.d2phi_dt2 + k4.d2phi_dt2);
    rec.offer(k, k == steps ? t_end : static_cast<double>(k) * h, s);
  }
  return rec.take();
}

double oscillation_period(const PhaseTrajectory& traj) {
  std::vector<double> crossings;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double a = traj.angles[i - 1];
    const double b = traj.angles[i];
    if (a < 0.0 && b >= 0.0) {
      const double frac = -a / (b - a);
      crossings.push_back(traj.times[i - 1] + frac * (traj.times[i] - traj.times[i - 1]));
    }
  }
  if (crossings.size() < 2) {
    throw Error(ErrorCode::NumericalFailure,
                "oscillation_period: fewer than two upward zero crossings in trajectory");
  }
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

}  // namespace cqed
