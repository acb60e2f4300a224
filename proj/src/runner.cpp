#include "cqed/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cqed/error.hpp"
#include "parallel.hpp"

namespace cqed {

namespace {

constexpr std::pair<Command, std::string_view> kCommandNames[] = {
    {Command::Spectrum, "spectrum"}, {Command::FluxSweep, "flux-sweep"},
    {Command::Dispersion, "dispersion"}, {Command::Rabi, "rabi"},
    {Command::Dispersive, "dispersive"}, {Command::Readout, "readout"},
    {Command::Pendulum, "pendulum"},
};

// Shortest %.*g rendering that parses back to the same double.
std::string format_real(double x) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::string format_fixed17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out[n - 1] = hi;
  return out;
}

struct RawValue {
  std::string text;
  int line = 0;
};

// Pulls typed values out of the parsed key-value lines, checking ranges and
// recording what was resolved. Anything left unread at the end is an unknown
// key for the command.
class ConfigReader {
 public:
  ConfigReader(std::map<std::string, RawValue> raw, std::string source)
      : raw_(std::move(raw)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return raw_.count(key) != 0; }

  bool has_prefix(std::string_view prefix) const {
    return std::any_of(raw_.begin(), raw_.end(),
                       [&](const auto& kv) { return kv.first.starts_with(prefix); });
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto it = raw_.find(key);
    const std::string where =
        it == raw_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
    throw Error(ErrorCode::Config, where + ": " + message);
  }

  using RealCheck = std::function<bool(double)>;

  double real(const std::string& key, std::optional<double> fallback, const RealCheck& ok,
              const std::string& constraint) {
    double v = 0.0;
    if (const auto it = raw_.find(key); it != raw_.end()) {
      v = parse_real(key, it->second.text);
    } else if (fallback) {
      v = *fallback;
    } else {
      fail(key, "missing required key '" + key + "'");
    }
    if (!ok(v)) {
      fail(key, key + " = " + format_real(v) + " is out of range: " + constraint);
    }
    record(key, format_real(v));
    return v;
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t lo, std::size_t hi) {
    long long v = static_cast<long long>(fallback);
    if (const auto it = raw_.find(key); it != raw_.end()) {
      const std::string& text = it->second.text;
      char* end = nullptr;
      v = std::strtoll(text.c_str(), &end, 10);
      if (text.empty() || *end != '\0') {
        fail(key, key + ": expected an integer, got '" + text + "'");
      }
    }
    if (v < static_cast<long long>(lo) || v > static_cast<long long>(hi)) {
      fail(key, key + " = " + std::to_string(v) + " is out of range: must lie in [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    record(key, std::to_string(v));
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    bool v = fallback;
    if (const auto it = raw_.find(key); it != raw_.end()) {
      const std::string& t = it->second.text;
      if (t == "true" || t == "yes" || t == "1") {
        v = true;
      } else if (t == "false" || t == "no" || t == "0") {
        v = false;
      } else {
        fail(key, key + ": expected true or false, got '" + t + "'");
      }
    }
    record(key, v ? "true" : "false");
    return v;
  }

  std::vector<double> real_list(const std::string& key, std::vector<double> fallback,
                                const RealCheck& ok, const std::string& constraint) {
    std::vector<double> v = std::move(fallback);
    if (const auto it = raw_.find(key); it != raw_.end()) {
      v.clear();
      std::stringstream ss(it->second.text);
      std::string item;
      while (std::getline(ss, item, ',')) v.push_back(parse_real(key, trim(item)));
      if (v.empty()) fail(key, key + ": expected a comma-separated list of numbers");
    }
    std::string text;
    for (double x : v) {
      if (!ok(x)) fail(key, key + " entry " + format_real(x) + " is out of range: " + constraint);
      if (!text.empty()) text += ", ";
      text += format_real(x);
    }
    record(key, text);
    return v;
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& options) {
    std::string v = fallback;
    if (const auto it = raw_.find(key); it != raw_.end()) v = it->second.text;
    if (std::find(options.begin(), options.end(), v) == options.end()) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
      fail(key, key + ": '" + v + "' is not one of {" + list + "}");
    }
    record(key, v);
    return v;
  }

  void forbid_together(const std::string& a, const std::string& b) const {
    if (has(a) && has(b)) fail(b, b + " cannot be combined with " + a);
  }

  // Unknown or unused keys are errors so that typos never silently fall back
  // to defaults.
  void finish(std::string_view command) const {
    for (const auto& [key, value] : raw_) {
      if (!used_.count(key)) {
        fail(key, "unknown key '" + key + "' for command " + std::string(command));
      }
    }
  }

  std::vector<std::pair<std::string, std::string>> take_resolved() { return std::move(resolved_); }

 private:
  double parse_real(const std::string& key, const std::string& text) const {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0') {
      fail(key, key + ": expected a real number, got '" + text + "'");
    }
    if (!std::isfinite(v)) fail(key, key + ": value must be finite");
    return v;
  }

  void record(const std::string& key, std::string value) {
    used_.insert(key);
    resolved_.emplace_back(key, std::move(value));
  }

  std::map<std::string, RawValue> raw_;
  std::string source_;
  std::set<std::string> used_;
  std::vector<std::pair<std::string, std::string>> resolved_;
};

const auto positive = [](double x) { return x > 0.0; };
const auto non_negative = [](double x) { return x >= 0.0; };
const auto any_real = [](double) { return true; };

QubitParams read_qubit(ConfigReader& r, bool with_ng) {
  QubitParams q;
  if (r.has_prefix("junction.")) {
    for (const char* key : {"qubit.ec_ghz", "qubit.ej_ghz", "qubit.ej_over_ec"}) {
      if (r.has(key)) r.fail(key, std::string(key) + " cannot be combined with junction.* keys");
    }
    JunctionPhysical j;
    j.ic_na = r.real("junction.ic_na", std::nullopt, positive,
                     "JunctionPhysical requires I_c > 0 nA");
    j.cj_ff = r.real("junction.cj_ff", std::nullopt, non_negative,
                     "JunctionPhysical requires C_J >= 0 fF");
    j.cshunt_ff = r.real("junction.cshunt_ff", 0.0, non_negative,
                         "JunctionPhysical requires C_shunt >= 0 fF");
    j.cg_ff = r.real("junction.cg_ff", 0.0, non_negative, "JunctionPhysical requires C_g >= 0 fF");
    if (!(j.cj_ff + j.cshunt_ff > 0.0)) {
      r.fail("junction.cj_ff", "junction.cj_ff + junction.cshunt_ff must be > 0 fF");
    }
    q = params_from_physical(j);
  } else {
    q.ec_ghz = r.real("qubit.ec_ghz", 0.25, positive, "QubitParams requires E_C > 0");
    r.forbid_together("qubit.ej_ghz", "qubit.ej_over_ec");
    if (r.has("qubit.ej_ghz")) {
      q.ej_ghz = r.real("qubit.ej_ghz", std::nullopt, non_negative, "QubitParams requires E_J >= 0");
    } else {
      q.ej_ghz = q.ec_ghz * r.real("qubit.ej_over_ec", 50.0, non_negative,
                                   "QubitParams requires E_J/E_C >= 0");
    }
  }
  if (with_ng) q.ng = r.real("qubit.ng", 0.0, any_real, "n_g must be finite");
  return q;
}

CoupledModel read_coupled(ConfigReader& r, bool with_kappa) {
  CoupledModel m;
  const std::string kind = r.choice("coupled.model", "two-level", {"two-level", "transmon"});
  m.resonator.fr_ghz = r.real("resonator.fr_ghz", 6.0, positive, "ResonatorParams requires f_r > 0");
  if (with_kappa) {
    m.resonator.kappa_mhz =
        r.real("resonator.kappa_mhz", 1.0, positive, "ResonatorParams requires kappa > 0");
  }
  if (kind == "two-level") {
    m.from_circuit = false;
    m.f01_ghz = r.real("coupled.f01_ghz", 5.0, positive, "qubit frequency must be > 0");
    m.g_ghz = r.real("coupled.g_ghz", 0.1, positive, "coupling g_1 must be > 0");
    m.n_transmon = 2;
    m.n_fock = r.count("coupled.n_fock", 3, 3, 4096);
    if (m.f01_ghz == m.resonator.fr_ghz) {
      r.fail("coupled.f01_ghz", "coupled.f01_ghz equals resonator.fr_ghz; the dispersive model "
                                "needs a non-zero detuning");
    }
  } else {
    m.from_circuit = true;
    m.qubit = read_qubit(r, true);
    m.resonator.cr_ff =
        r.real("resonator.cr_ff", std::nullopt, positive, "ResonatorParams requires C_r > 0");
    m.beta = r.real("coupled.beta", std::nullopt, [](double b) { return b > 0.0 && b <= 1.0; },
                    "CouplingParams requires 0 < beta <= 1");
    m.n_transmon = r.count("coupled.n_transmon", 3, 2, 64);
    m.n_fock = r.count("coupled.n_fock", 10, 3, 4096);
    if (m.n_transmon * m.n_fock > 4096) {
      r.fail("coupled.n_fock", "coupled.n_transmon * coupled.n_fock must not exceed 4096");
    }
  }
  return m;
}

Job read_job(Command command, ConfigReader& r) {
  switch (command) {
    case Command::Spectrum: {
      SpectrumJob j;
      j.qubit = read_qubit(r, false);
      j.ng_min = r.real("sweep.ng_min", -1.0, any_real, "must be finite");
      j.ng_max = r.real("sweep.ng_max", 1.0, [&](double x) { return x > j.ng_min; },
                        "must exceed sweep.ng_min");
      j.points = r.count("sweep.points", 201, 2, 100000);
      j.levels = r.count("spectrum.levels", 3, 1, 64);
      j.normalize = r.boolean("spectrum.normalize", true);
      return j;
    }
    case Command::FluxSweep: {
      FluxSweepJob j;
      j.ec_ghz = r.real("qubit.ec_ghz", 0.25, positive, "QubitParams requires E_C > 0");
      j.ng = r.real("qubit.ng", 0.0, any_real, "n_g must be finite");
      j.ej_single_ghz = r.real("squid.ej_single_ghz", 0.5 * 50.0 * j.ec_ghz, non_negative,
                               "SquidBias requires E_J >= 0");
      j.flux_min = r.real("flux.min", 0.0, any_real, "must be finite");
      j.flux_max = r.real("flux.max", 0.5, [&](double x) { return x > j.flux_min; },
                          "must exceed flux.min");
      j.points = r.count("flux.points", 51, 2, 100000);
      j.levels = r.count("spectrum.levels", 3, 2, 64);
      return j;
    }
    case Command::Dispersion: {
      DispersionJob j;
      j.ec_ghz = r.real("qubit.ec_ghz", 0.25, positive, "QubitParams requires E_C > 0");
      j.ratios = r.real_list("dispersion.ratios", j.ratios, positive, "E_J/E_C must be > 0");
      return j;
    }
    case Command::Rabi: {
      RabiJob j;
      j.fr_ghz = r.real("resonator.fr_ghz", 6.0, positive, "ResonatorParams requires f_r > 0");
      j.g_ghz = r.real("coupled.g_ghz", 0.1, positive, "coupling g_1 must be > 0");
      j.n_fock = r.count("coupled.n_fock", 3, 2, 4096);
      j.t_max_ns = r.real("rabi.t_max_ns", 10.0, positive, "must be > 0");
      j.points = r.count("rabi.points", 201, 2, 1000000);
      return j;
    }
    case Command::Dispersive:
      return DispersiveJob{read_coupled(r, false)};
    case Command::Readout: {
      ReadoutJob j;
      j.model = read_coupled(r, true);
      j.span_mhz = r.real("readout.span_mhz", 100.0, positive, "must be > 0");
      j.points = r.count("readout.points", 1001, 2, 1000000);
      j.min_validity = r.real("readout.min_validity", 5.0, positive, "must be > 0");
      return j;
    }
    case Command::Pendulum: {
      PendulumJob j;
      j.qubit = read_qubit(r, false);
      if (!(j.qubit.ej_ghz > 0.0)) {
        r.fail(r.has("qubit.ej_ghz") ? "qubit.ej_ghz" : "qubit.ej_over_ec",
               "pendulum needs E_J > 0 for a finite oscillation period");
      }
      j.phi0 = r.real("pendulum.phi0", 0.5, [](double x) { return std::fabs(x) < 3.14159; },
                      "|phi0| must be below pi");
      j.periods = r.real("pendulum.periods", 10.0, positive, "must be > 0");
      j.steps_per_period = r.count("pendulum.steps_per_period", 1000, 8, 10000000);
      j.sample_every = r.count("pendulum.sample_every", 10, 1, 10000000);
      j.mass_kg = r.real("pendulum.mass_kg", 1.0, positive, "PendulumParams requires m > 0");
      j.length_m = r.real("pendulum.length_m", 1.0, positive, "PendulumParams requires R > 0");
      if (j.periods * static_cast<double>(j.steps_per_period) > 1e8) {
        r.fail("pendulum.periods", "pendulum.periods * pendulum.steps_per_period exceeds 1e8");
      }
      return j;
    }
  }
  throw Error(ErrorCode::Config, "unhandled command");
}

// --- command implementations ---------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> notes;
};

Table run_spectrum(const SpectrumJob& j) {
  const auto grid = linspace(j.ng_min, j.ng_max, j.points);
  const auto sweep = sweep_offset_charge(j.qubit, grid, j.levels, j.normalize);
  Table t;
  t.columns.push_back("n_g");
  for (std::size_t m = 0; m < j.levels; ++m) t.columns.push_back("E" + std::to_string(m));
  for (const auto& row : sweep.rows) {
    std::vector<double> r{row.ng};
    r.insert(r.end(), row.energies.begin(), row.energies.end());
    t.rows.push_back(std::move(r));
  }
  t.notes.emplace_back("columns", "n_g = offset charge [Cooper pairs]; E<m> = energy level m");
  if (j.normalize) {
    t.notes.emplace_back("normalization",
                         "E<m> = (E_m - E_0(n_g=1/2)) / E_01(n_g=1/2), dimensionless");
    t.notes.emplace_back("E01_half_ghz", format_fixed17(sweep.scale_ghz));
    t.notes.emplace_back("E0_half_ghz", format_fixed17(sweep.offset_ghz));
  } else {
    t.notes.emplace_back("units", "E<m> are E/h in GHz");
  }
  t.notes.emplace_back("E_J_ghz", format_fixed17(j.qubit.ej_ghz));
  t.notes.emplace_back("E_C_ghz", format_fixed17(j.qubit.ec_ghz));
  return t;
}

Table run_flux_sweep(const FluxSweepJob& j) {
  const auto grid = linspace(j.flux_min, j.flux_max, j.points);
  Table t;
  t.columns = {"flux_ratio", "ej_eff_ghz"};
  for (std::size_t m = 0; m < j.levels; ++m) t.columns.push_back("E" + std::to_string(m) + "_ghz");
  t.columns.push_back("f01_ghz");
  t.rows.resize(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    const double ej = squid_effective_ej({j.ej_single_ghz, grid[i]});
    const Spectrum s = spectrum({ej, j.ec_ghz, j.ng}, j.levels, false);
    std::vector<double> row{grid[i], ej};
    row.insert(row.end(), s.levels_ghz.begin(), s.levels_ghz.end());
    row.push_back(s.levels_ghz[1] - s.levels_ghz[0]);
    t.rows[i] = std::move(row);
  });
  t.notes.emplace_back("columns",
                       "flux_ratio = Phi/Phi_0; ej_eff_ghz = |2 E_J cos(pi Phi/Phi_0)|; "
                       "E<m>_ghz = level m as E/h in GHz; f01_ghz = E1 - E0");
  return t;
}

Table run_dispersion(const DispersionJob& j) {
  Table t;
  t.columns = {"ej_over_ec",  "eps0_ghz",       "eps1_ghz",          "f01_ng0_ghz",
               "alpha_ng0_ghz", "abs_alpha_over_f01_ng0", "f01_half_ghz", "alpha_half_ghz",
               "eps1_over_f01_half"};
  for (double ratio : j.ratios) {
    const QubitParams q0{ratio * j.ec_ghz, j.ec_ghz, 0.0};
    const QubitParams qh{ratio * j.ec_ghz, j.ec_ghz, 0.5};
    const double eps0 = charge_dispersion(q0, 0);
    const double eps1 = charge_dispersion(q0, 1);
    const double f0 = transition_energy(q0, 0, 1);
    const double a0 = anharmonicity(q0);
    const double fh = transition_energy(qh, 0, 1);
    const double ah = anharmonicity(qh);
    t.rows.push_back({ratio, eps0, eps1, f0, a0, std::fabs(a0) / f0, fh, ah, eps1 / fh});
  }
  t.notes.emplace_back("columns",
                       "eps<m>_ghz = peak-to-peak of level m over n_g in [0,1]; *_ng0 evaluated "
                       "at n_g = 0 and *_half at n_g = 1/2; alpha = (E2 - E1) - (E1 - E0)");
  return t;
}

Table run_rabi(const RabiJob& j) {
  const CoupledSystemSpec spec = two_level_spec(j.fr_ghz, j.fr_ghz, j.g_ghz, j.n_fock);
  const auto grid = linspace(0.0, j.t_max_ns, j.points);
  const RabiTrace trace = vacuum_rabi_trace(spec, grid);
  Table t;
  t.columns = {"t_ns", "p_excited", "p_photon", "p_total"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.rows.push_back({trace.times_ns[i], trace.p_excited[i], trace.p_photon[i], trace.p_total[i]});
  }
  const double omega = rabi_swap_frequency(spec);
  t.notes.emplace_back("columns",
                       "p_excited = P(transmon in |1>); p_photon = P(one photon); "
                       "p_total = total population");
  t.notes.emplace_back("swap_frequency_rad_per_ns", format_fixed17(omega));
  t.notes.emplace_back("swap_time_ns", format_fixed17(kTwoPi / 4.0 / omega));
  return t;
}

Table run_dispersive(const DispersiveJob& j) {
  const CoupledSystemSpec spec = j.model.build();
  const DispersiveResult d = dispersive_shift(spec);
  const DressedComparison c = dressed_dispersive_comparison(spec);
  const double g1 = spec.coupling.g_ghz[0];
  Table t;
  t.columns = {"f01_ghz",          "fr_ghz",          "g1_ghz",           "delta_ghz",
               "chi_ghz",          "validity",        "dressed_shift_ghz", "pull_ground_ghz",
               "pull_excited_ghz", "pull_diff_ghz",   "rel_err_shift",    "rel_err_pull"};
  t.rows.push_back({spec.f01_ghz(), spec.resonator.fr_ghz, g1, d.delta_ghz, d.chi_ghz, d.validity,
                    c.dressed_shift_ghz, c.pull_ground_ghz, c.pull_excited_ghz,
                    c.pull_difference_ghz(), c.dressed_shift_ghz / d.chi_ghz - 1.0,
                    std::fabs(c.pull_difference_ghz()) / (2.0 * d.chi_ghz) - 1.0});
  t.notes.emplace_back("columns",
                       "chi = g1^2/delta; dressed_shift = exact one-photon dressing with the "
                       "qubit in |0>; pull_* = dressed resonator frequency minus f_r with the "
                       "qubit in |0> / |1>; rel_err_* compare against chi and 2 chi");
  if (d.validity < 5.0) {
    t.notes.emplace_back("warning", "delta/g1 = " + format_real(d.validity) +
                                        " < 5: outside the dispersive regime");
  }
  return t;
}

Table run_readout(const ReadoutJob& j) {
  const CoupledSystemSpec spec = j.model.build();
  const double half_span = 0.5 * j.span_mhz * 1e-3;
  const double fr = spec.resonator.fr_ghz;
  const auto grid = linspace(fr - half_span, fr + half_span, j.points);
  const auto ground = transmission_spectrum(spec, QubitState::Ground, grid, j.min_validity);
  const auto excited = transmission_spectrum(spec, QubitState::Excited, grid, j.min_validity);
  Table t;
  t.columns = {"f_ghz", "s21_sq_ground", "s21_sq_excited"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.rows.push_back({grid[i], ground.s21_sq[i], excited.s21_sq[i]});
  }
  t.notes.emplace_back("columns", "f_ghz = probe frequency; s21_sq_* = |S21|^2 (Lorentzian)");
  t.notes.emplace_back("chi_ghz", format_fixed17(ground.chi_ghz));
  t.notes.emplace_back("peak_ground_ghz", format_fixed17(ground.peak_ghz));
  t.notes.emplace_back("peak_excited_ghz", format_fixed17(excited.peak_ghz));
  t.notes.emplace_back("peak_separation_ghz", format_fixed17(ground.peak_ghz - excited.peak_ghz));
  if (ground.warning) t.notes.emplace_back("warning", *ground.warning);
  return t;
}

Table run_pendulum(const PendulumJob& j) {
  const double omega = junction_linear_frequency(j.qubit);
  const double period = kTwoPi / omega;
  const double dt = period / static_cast<double>(j.steps_per_period);
  const double t_end = j.periods * period;

  PendulumParams p;
  p.mass_kg = j.mass_kg;
  p.length_m = j.length_m;
  p.gravity = omega * omega * j.length_m;  // g/R = 8 E_C E_J, time measured in ns
  p.phi0 = j.phi0;
  p.l0 = 0.0;

  const auto junction = integrate(junction_dynamics(j.qubit), {j.phi0, 0.0}, t_end, dt,
                                  j.sample_every);
  const auto pendulum = integrate(pendulum_dynamics(p), pendulum_initial_state(p), t_end, dt,
                                  j.sample_every);
  Table t;
  t.columns = {"t_ns", "phi_junction", "phi_pendulum", "energy_junction", "energy_pendulum"};
  double max_dev = 0.0, drift_j = 0.0, drift_p = 0.0;
  for (std::size_t i = 0; i < junction.size(); ++i) {
    t.rows.push_back({junction.times[i], junction.angles[i], pendulum.angles[i],
                      junction.energies[i], pendulum.energies[i]});
    max_dev = std::max(max_dev, std::fabs(junction.angles[i] - pendulum.angles[i]));
    drift_j = std::max(drift_j, std::fabs(junction.energies[i] / junction.energies[0] - 1.0));
    drift_p = std::max(drift_p, std::fabs(pendulum.energies[i] / pendulum.energies[0] - 1.0));
  }
  t.notes.emplace_back("columns",
                       "phi_* in rad; energy_junction in rad/ns (E/hbar); energy_pendulum in J "
                       "with pendulum time measured in ns");
  t.notes.emplace_back("linear_frequency_rad_per_ns", format_fixed17(omega));
  t.notes.emplace_back("max_phase_difference", format_fixed17(max_dev));
  t.notes.emplace_back("max_rel_energy_drift_junction", format_fixed17(drift_j));
  t.notes.emplace_back("max_rel_energy_drift_pendulum", format_fixed17(drift_p));
  return t;
}

std::map<std::string, RawValue> parse_lines(std::string_view text, const std::string& source,
                                            std::optional<std::string>& command_text,
                                            int& command_line) {
  std::map<std::string, RawValue> raw;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Config, source + ":" + std::to_string(line_no) +
                                         ": expected 'key = value', got '" + content + "'");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::Config, source + ":" + std::to_string(line_no) + ": empty key");
    }
    if (key == "command") {
      command_text = value;
      command_line = line_no;
      continue;
    }
    if (raw.count(key)) {
      throw Error(ErrorCode::Config, source + ":" + std::to_string(line_no) + ": duplicate key '" +
                                         key + "' (first set on line " +
                                         std::to_string(raw[key].line) + ")");
    }
    raw.emplace(key, RawValue{value, line_no});
  }
  return raw;
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [cmd, text] : kCommandNames) {
    if (text == name) return cmd;
  }
  return std::nullopt;
}

std::string_view command_name(Command c) {
  for (const auto& [cmd, text] : kCommandNames) {
    if (cmd == c) return text;
  }
  return "unknown";
}

std::optional<OutputFormat> parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  return std::nullopt;
}

CoupledSystemSpec CoupledModel::build() const {
  if (!from_circuit) {
    CoupledSystemSpec spec = two_level_spec(f01_ghz, resonator.fr_ghz, g_ghz, n_fock);
    spec.resonator = resonator;
    validate(spec);
    return spec;
  }
  return transmon_resonator_spec(qubit, resonator, beta, n_transmon, n_fock);
}

RunConfig parse_config(std::string_view text, std::optional<Command> command,
                       const std::string& source) {
  std::optional<std::string> command_text;
  int command_line = 0;
  auto raw = parse_lines(text, source, command_text, command_line);

  std::optional<std::string> out_path;
  OutputFormat format = OutputFormat::Csv;
  if (auto it = raw.find("output.path"); it != raw.end()) {
    out_path = it->second.text;
    raw.erase(it);
  }
  if (auto it = raw.find("output.format"); it != raw.end()) {
    const auto f = parse_format(it->second.text);
    if (!f) {
      throw Error(ErrorCode::Config, source + ":" + std::to_string(it->second.line) +
                                         ": output.format must be csv or json");
    }
    format = *f;
    raw.erase(it);
  }

  if (command_text) {
    const auto parsed = parse_command(*command_text);
    const std::string where = source + ":" + std::to_string(command_line);
    if (!parsed) throw Error(ErrorCode::Config, where + ": unknown command '" + *command_text + "'");
    if (command && *command != *parsed) {
      throw Error(ErrorCode::Config, where + ": config is for command '" + *command_text +
                                         "' but '" + std::string(command_name(*command)) +
                                         "' was requested");
    }
    command = parsed;
  }
  if (!command) throw Error(ErrorCode::Config, source + ": no command given");

  ConfigReader reader(std::move(raw), source);
  RunConfig cfg;
  cfg.command = *command;
  try {
    cfg.job = read_job(*command, reader);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    throw Error(ErrorCode::Config, source + ": " + e.what());
  }
  reader.finish(command_name(*command));
  cfg.resolved = reader.take_resolved();
  cfg.output_path = out_path;
  cfg.format = format;
  cfg.source = source;
  return cfg;
}

namespace {
std::string result_config_text(std::string_view text, const std::string& source);
}  // namespace

RunConfig load_config(const std::string& path, std::optional<Command> command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  // A previous result file carries its own configuration.
  if (text.starts_with("# cqed ") || text.starts_with("{")) {
    return parse_config(result_config_text(text, path), command, path);
  }
  return parse_config(text, command, path);
}

ResultTable run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const Table t = std::visit(
      [](const auto& job) -> Table {
        using J = std::decay_t<decltype(job)>;
        if constexpr (std::is_same_v<J, SpectrumJob>) return run_spectrum(job);
        if constexpr (std::is_same_v<J, FluxSweepJob>) return run_flux_sweep(job);
        if constexpr (std::is_same_v<J, DispersionJob>) return run_dispersion(job);
        if constexpr (std::is_same_v<J, RabiJob>) return run_rabi(job);
        if constexpr (std::is_same_v<J, DispersiveJob>) return run_dispersive(job);
        if constexpr (std::is_same_v<J, ReadoutJob>) return run_readout(job);
        if constexpr (std::is_same_v<J, PendulumJob>) return run_pendulum(job);
      },
      config.job);

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      if (!std::isfinite(t.rows[r][c])) {
        throw Error(ErrorCode::NumericalFailure,
                    "non-finite value in row " + std::to_string(r) + ", column " + t.columns[c]);
      }
    }
  }

  ResultTable out;
  out.columns = t.columns;
  out.rows = t.rows;
  out.notes = t.notes;
  out.command = config.command;
  out.config = config.resolved;
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string to_csv(const ResultTable& table) {
  std::string out;
  out += "# cqed " + table.version + "\n";
  out += "# command: " + std::string(command_name(table.command)) + "\n";
  char wall[64];
  std::snprintf(wall, sizeof wall, "%.6f", table.wall_time_s);
  out += std::string("# wall_time_s: ") + wall + "\n";
  out += "# units: frequencies are ordinary frequencies in GHz (not angular)\n";
  for (const auto& [k, v] : table.config) out += "# config: " + k + " = " + v + "\n";
  for (const auto& [k, v] : table.notes) out += "# " + k + ": " + v + "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out += (c ? "," : "") + table.columns[c];
  }
  out += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      out += format_fixed17(row[c]);
    }
    out += "\n";
  }
  return out;
}

std::string to_json(const ResultTable& table) {
  nlohmann::ordered_json meta;
  meta["cqed_version"] = table.version;
  meta["command"] = std::string(command_name(table.command));
  meta["wall_time_s"] = table.wall_time_s;
  meta["units"] = "frequencies are ordinary frequencies in GHz (not angular)";
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.config) cfg[k] = v;
  meta["config"] = cfg;
  nlohmann::ordered_json notes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.notes) notes[k] = v;
  meta["notes"] = notes;

  nlohmann::ordered_json doc;
  doc["metadata"] = meta;
  doc["columns"] = table.columns;
  doc["rows"] = table.rows;
  return doc.dump(2) + "\n";
}

std::string render(const ResultTable& table, OutputFormat format) {
  return format == OutputFormat::Csv ? to_csv(table) : to_json(table);
}

void write_result(const ResultTable& table, const std::string& path, OutputFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, path + ": cannot open for writing");
  out << render(table, format);
  if (!out) throw Error(ErrorCode::Io, path + ": write failed");
}

namespace {

// Rebuilds `key = value` config text from the metadata of a CSV or JSON result.
std::string result_config_text(std::string_view text, const std::string& source) {
  std::string cfg;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    try {
      const auto doc = nlohmann::json::parse(text);
      const auto& meta = doc.at("metadata");
      cfg += "command = " + meta.at("command").get<std::string>() + "\n";
      for (const auto& [k, v] : meta.at("config").items()) cfg += k + " = " + v.get<std::string>() + "\n";
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Config, source + ": invalid JSON result: " + e.what());
    }
  } else {
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto nl = text.find('\n', pos);
      const std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() : nl + 1;
      if (line.starts_with("# command: ")) {
        cfg += "command = " + trim(line.substr(11)) + "\n";
      } else if (line.starts_with("# config: ")) {
        cfg += trim(line.substr(10)) + "\n";
      }
    }
  }
  return cfg;
}

}  // namespace

RunConfig config_from_result(std::string_view text, const std::string& source) {
  return parse_config(result_config_text(text, source), std::nullopt, source);
}

}  // namespace cqed
