// Acceptance harness: one PASS/FAIL line per criterion.
//
// usage: cqed_acceptance <path-to-cqed-cli> <work-dir>
#include <sys/stat.h>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cqed/cavity.hpp"
#include "cqed/charge_qubit.hpp"
#include "cqed/classical.hpp"
#include "cqed/linalg.hpp"
#include "oracles.hpp"

using namespace cqed;

namespace {

// Collects the checks of one criterion; the first failure is kept for the report.
class Criterion {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok && first_failure_.empty()) first_failure_ = what;
    ok_ = ok_ && ok;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool ok() const { return ok_; }
  std::string detail() const { return ok_ ? notes_ : first_failure_; }

 private:
  bool ok_ = true;
  std::string first_failure_;
  std::string notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  g.back() = hi;
  return g;
}

ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = nd(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      h(i, j) = {nd(rng), nd(rng)};
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

double frobenius(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& z : m.entries()) s += std::norm(z);
  return std::sqrt(s);
}

StateVector random_state(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  double s = 0.0;
  for (auto& z : v) {
    z = {nd(rng), nd(rng)};
    s += std::norm(z);
  }
  for (auto& z : v) z /= std::sqrt(s);
  return StateVector(std::move(v));
}

double max_rel_energy_error(const PhaseTrajectory& t) {
  double worst = 0.0;
  for (double e : t.energies) worst = std::max(worst, std::fabs(e - t.energies[0]) / std::fabs(t.energies[0]));
  return worst;
}

// ---------------------------------------------------------------------------

void ac1(Criterion& c) {
  const double ec = 0.25;
  const QubitParams q{ec, ec, 0.0};
  const auto ng = grid(-2.0, 2.0, 201);

  const auto t0 = std::chrono::steady_clock::now();
  const auto sweep = sweep_offset_charge(q, ng, 3, true);
  const double elapsed = seconds_since(t0);

  // The oracle normalizes with its own sweet-spot levels.
  const int ncut = 20;
  const auto half = oracle::charge_levels(q.ej_ghz, ec, 0.5, ncut, 2);
  const double scale = half[1] - half[0];
  double worst = 0.0;
  c.check(sweep.rows.size() == 201, "expected 201 rows");
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto ref = oracle::charge_levels(q.ej_ghz, ec, ng[i], ncut, 3);
    for (std::size_t k = 0; k < 3; ++k) {
      const double expect = (ref[k] - half[0]) / scale;
      // Normalized energies vanish at the sweet spot, so the error is taken
      // relative to the larger of the value and the E01 unit.
      worst = std::max(worst, std::fabs(sweep.rows[i].energies[k] - expect) /
                                  std::max(1.0, std::fabs(expect)));
    }
  }
  c.check(worst <= 1e-8, "worst relative deviation " + fmt("%.3g", worst) + " > 1e-8");
  c.check(elapsed < 1.0, "runtime " + fmt("%.3f", elapsed) + " s >= 1 s");
  c.note("worst rel dev " + fmt("%.2e", worst));
  c.note("runtime " + fmt("%.3f", elapsed) + " s");
}

void ac2(Criterion& c) {
  const double ec = 0.25;
  const double ratios[] = {1.0, 5.0, 10.0, 50.0};
  const auto t0 = std::chrono::steady_clock::now();
  double eps[4], rel_alpha[4];
  for (int i = 0; i < 4; ++i) {
    const QubitParams q{ratios[i] * ec, ec, 0.0};
    eps[i] = charge_dispersion(q, 1);
    rel_alpha[i] = std::fabs(anharmonicity(q)) / transition_energy(q, 0, 1);
  }
  const double elapsed = seconds_since(t0);

  for (int i = 1; i < 4; ++i) {
    c.check(eps[i] < eps[i - 1], "charge dispersion not strictly decreasing at ratio " + fmt("%g", ratios[i]));
    c.check(rel_alpha[i] < rel_alpha[i - 1],
            "|alpha|/E01 not decreasing at ratio " + fmt("%g", ratios[i]));
  }
  const double suppression = eps[3] / eps[2];
  c.check(suppression < 1e-3, "eps1(50)/eps1(10) = " + fmt("%.3g", suppression));
  c.check(rel_alpha[3] > 1e-3, "|alpha|/E01 at 50 = " + fmt("%.3g", rel_alpha[3]));
  c.check(elapsed < 5.0, "runtime " + fmt("%.3f", elapsed) + " s >= 5 s");
  c.note("eps1(50)/eps1(10) = " + fmt("%.2e", suppression));
  c.note("|alpha|/E01 at n_g=0: " + fmt("%.3g", rel_alpha[0]) + " " + fmt("%.3g", rel_alpha[1]) + " " +
         fmt("%.3g", rel_alpha[2]) + " " + fmt("%.3g", rel_alpha[3]));
  c.note("runtime " + fmt("%.3f", elapsed) + " s");
}

void ac3(Criterion& c) {
  const double ec = 0.3;
  double worst = 0.0;
  for (double ng : {0.0, 0.1, 0.25, 0.5, 0.77, -1.3, 3.9}) {
    const auto s = spectrum({0.0, ec, ng}, 5, false).levels_ghz;
    std::vector<double> p;
    for (int n = -60; n <= 60; ++n) p.push_back(4.0 * ec * (n - ng) * (n - ng));
    std::sort(p.begin(), p.end());
    for (int k = 0; k < 5; ++k) {
      worst = std::max(worst, std::fabs(s[k] - p[k]) / std::max(p[k], ec));
    }
  }
  c.check(worst <= 1e-12, "parabola deviation " + fmt("%.3g", worst));

  const double ej = 7.3;
  const double eps = std::numeric_limits<double>::epsilon();
  c.check(squid_effective_ej({ej, 0.0}) == 2.0 * ej, "SQUID at flux 0");
  c.check(squid_effective_ej({ej, 0.5}) == 0.0, "SQUID at flux 1/2");
  const double third = squid_effective_ej({ej, 1.0 / 3.0});
  // 1/3 is not representable; one ulp of the flux plus one of the product.
  c.check(std::fabs(third - ej) <= 2.0 * ej * eps, "SQUID at flux 1/3: " + fmt("%.17g", third));
  c.note("parabola dev " + fmt("%.2e", worst));
  c.note("SQUID 1/3 dev " + fmt("%.2e", std::fabs(third - ej) / ej));
}

void ac4(Criterion& c) {
  const double ec = 0.25, ej = 50.0 * ec;
  const QubitParams q{ej, ec, 0.0};
  const double e01 = transition_energy(q, 0, 1);
  const double alpha = anharmonicity(q);
  const double e01_pert = std::sqrt(8.0 * ej * ec) - ec;
  const double err_e01 = std::fabs(e01 / e01_pert - 1.0);
  const double err_alpha = std::fabs(alpha / -ec - 1.0);
  c.check(err_e01 <= 0.02, "E01 off by " + fmt("%.3g", 100 * err_e01) + "%");
  c.check(err_alpha <= 0.15, "alpha off by " + fmt("%.3g", 100 * err_alpha) + "%");
  c.note("E01 " + fmt("%.3f", 100 * err_e01) + "%");
  c.note("alpha " + fmt("%.2f", 100 * err_alpha) + "%");
}

void ac5(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const double g = 0.1;
  const auto spec = two_level_spec(6.0, 6.0, g, 3);
  const double t_swap = M_PI / (2.0 * to_angular(g));
  const double ts[] = {0.0, t_swap};
  const auto trace = vacuum_rabi_trace(spec, ts);
  const double swap_err = std::fabs(trace.p_photon[1] - 1.0);
  c.check(swap_err <= 1e-6, "|P_photon - 1| = " + fmt("%.3g", swap_err));

  const double ladder[] = {0.025, 0.05, 0.1, 0.2};
  double worst = 0.0;
  for (double gi : ladder) {
    const double w = rabi_swap_frequency(two_level_spec(6.0, 6.0, gi, 3));
    worst = std::max(worst, std::fabs(w / to_angular(gi) - 1.0));
  }
  const double elapsed = seconds_since(t0);
  c.check(worst <= 1e-4, "swap frequency / g deviates by " + fmt("%.3g", worst));
  c.check(elapsed < 1.0, "runtime " + fmt("%.3f", elapsed) + " s >= 1 s");
  c.note("swap err " + fmt("%.2e", swap_err));
  c.note("linearity " + fmt("%.2e", worst));
  c.note("runtime " + fmt("%.3f", elapsed) + " s");
}

void ac6(Criterion& c) {
  double errs[2];
  int i = 0;
  for (double ratio : {0.05, 0.025}) {
    const auto cmp = dressed_dispersive_comparison(two_level_spec(5.0, 6.0, ratio, 4));
    errs[i++] = std::fabs(cmp.pull_difference_ghz() / (2.0 * cmp.chi_ghz) - 1.0);
  }
  c.check(errs[0] <= 0.01, "g/Delta = 0.05 off by " + fmt("%.3g", 100 * errs[0]) + "%");
  c.check(errs[1] <= 0.0025, "g/Delta = 0.025 off by " + fmt("%.3g", 100 * errs[1]) + "%");
  const double order = std::log2(errs[0] / errs[1]);
  c.check(std::fabs(order - 2.0) < 0.1, "convergence order " + fmt("%.3g", order));

  const auto spec = two_level_spec(5.0, 6.0, 0.1, 3);
  const auto f = grid(5.95, 6.05, 201);
  const auto gs = transmission_spectrum(spec, QubitState::Ground, f);
  const auto es = transmission_spectrum(spec, QubitState::Excited, f);
  const double sep = gs.peak_ghz - es.peak_ghz;
  c.check(std::fabs(sep - 2.0 * gs.chi_ghz) <= 4.0 * std::numeric_limits<double>::epsilon() * gs.peak_ghz,
          "peak separation " + fmt("%.17g", sep) + " vs 2 chi " + fmt("%.17g", 2.0 * gs.chi_ghz));
  c.check(gs.s21_sq.size() == f.size() && es.s21_sq.size() == f.size(), "spectrum length");
  c.note("errors " + fmt("%.3f", 100 * errs[0]) + "% / " + fmt("%.3f", 100 * errs[1]) + "%");
  c.note("order " + fmt("%.2f", order));
}

void ac7(Criterion& c) {
  const QubitParams q{12.5, 0.25, 0.0};
  const double w = junction_linear_frequency(q);
  const double T = kTwoPi / w;

  double worst = 0.0;
  for (double phi0 : {0.01, 0.5, 2.5}) {
    PendulumParams p;
    p.mass_kg = 0.2;
    p.length_m = 1.5;
    p.gravity = w * w * p.length_m;
    p.phi0 = phi0;
    const auto j = integrate(junction_dynamics(q), {phi0, 0.0}, 20.0 * T, T / 1000.0);
    const auto m = integrate(pendulum_dynamics(p), pendulum_initial_state(p), 20.0 * T, T / 1000.0);
    if (j.size() != m.size()) {
      c.check(false, "trajectory lengths differ");
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) worst = std::max(worst, std::fabs(j.angles[i] - m.angles[i]));
  }
  c.check(worst <= 1e-10, "pointwise difference " + fmt("%.3g", worst));

  const auto drift_run = integrate(junction_dynamics(q), {0.01, 0.0}, 100.0 * T, T / 1000.0);
  const double drift = max_rel_energy_error(drift_run);
  c.check(drift_run.size() == 100001, "expected 1e5 steps");
  c.check(drift <= 1e-8, "energy drift " + fmt("%.3g", drift));

  const auto small = integrate(junction_dynamics(q), {0.01, 0.0}, 50.0 * T, T / 2000.0);
  const double freq_err = std::fabs(kTwoPi / oscillation_period(small) / w - 1.0);
  c.check(freq_err <= 1e-5, "small-angle frequency off by " + fmt("%.3g", freq_err));
  c.note("pointwise " + fmt("%.2e", worst));
  c.note("drift " + fmt("%.2e", drift));
  c.note("freq " + fmt("%.2e", freq_err));
}

void ac8(Criterion& c) {
  std::mt19937_64 rng(20240917);
  std::uniform_int_distribution<std::size_t> dim(1, 64);
  double worst_res = 0.0, worst_orth = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = dim(rng);
    const auto h = random_hermitian(n, rng);
    const auto eig = hermitian_eigensolve(h);
    const double hnorm = frobenius(h);
    for (std::size_t k = 0; k < n; ++k) {
      const auto v = eig.vector(k);
      const auto hv = h * v;
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) res += std::norm(hv[i] - eig.values[k] * v[i]);
      worst_res = std::max(worst_res, std::sqrt(res) / hnorm);
    }
    const auto vtv = eig.vectors.adjoint() * eig.vectors;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        worst_orth = std::max(worst_orth, std::abs(vtv(i, j) - cplx(i == j ? 1.0 : 0.0)));
      }
    }
  }
  c.check(worst_res <= 1e-10, "eigen residual " + fmt("%.3g", worst_res));
  c.check(worst_orth <= 1e-10, "orthonormality " + fmt("%.3g", worst_orth));

  double worst_norm = 0.0, worst_energy = 0.0;
  const auto t = grid(0.0, 50.0, 101);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = random_hermitian(24, rng);
    const auto psi0 = random_state(24, rng);
    const auto trace = evolve(h, psi0, t);
    const double e0 = expectation(h, psi0);
    const double scale = frobenius(h);
    for (const auto& psi : trace.states) {
      worst_norm = std::max(worst_norm, std::fabs(psi.norm() - 1.0));
      worst_energy = std::max(worst_energy, std::fabs(expectation(h, psi) - e0) / scale);
    }
  }
  c.check(worst_norm <= 1e-9, "evolve norm drift " + fmt("%.3g", worst_norm));
  c.check(worst_energy <= 1e-9, "evolve energy drift " + fmt("%.3g", worst_energy));

  std::uniform_real_distribution<double> ec(0.1, 1.0), rat(0.0, 80.0), ngd(-2.0, 2.0);
  double worst_period = 0.0, worst_reflect = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double e = ec(rng);
    const QubitParams q{rat(rng) * e, e, ngd(rng)};
    const auto base = spectrum(q, 4, false).levels_ghz;
    const auto shifted = spectrum({q.ej_ghz, q.ec_ghz, q.ng + 1.0}, 4, false).levels_ghz;
    const auto reflected = spectrum({q.ej_ghz, q.ec_ghz, -q.ng}, 4, false).levels_ghz;
    for (int k = 0; k < 4; ++k) {
      const double scale = std::max(std::fabs(base[k]), q.ec_ghz);
      worst_period = std::max(worst_period, std::fabs(base[k] - shifted[k]) / scale);
      worst_reflect = std::max(worst_reflect, std::fabs(base[k] - reflected[k]) / scale);
    }
  }
  c.check(worst_period <= 1e-10, "n_g periodicity " + fmt("%.3g", worst_period));
  c.check(worst_reflect <= 1e-10, "n_g reflection " + fmt("%.3g", worst_reflect));
  c.note("residual " + fmt("%.1e", worst_res) + ", orth " + fmt("%.1e", worst_orth));
  c.note("evolve " + fmt("%.1e", worst_norm) + " / " + fmt("%.1e", worst_energy));
  c.note("symmetry " + fmt("%.1e", std::max(worst_period, worst_reflect)));
}

// --- CLI ---------------------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Non-comment lines: the header row and the data rows.
std::string data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') out += line + "\n";
  }
  return out;
}

int run_cli(const std::string& cli, const std::string& args, const std::string& err_path) {
  const std::string cmd = "'" + cli + "' " + args + " > /dev/null 2> '" + err_path + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void ac9(Criterion& c, const std::string& cli, const std::string& work) {
  struct Job {
    const char* command;
    const char* config;
  };
  const Job jobs[] = {
      {"spectrum", "qubit.ej_over_ec = 1\nsweep.points = 101\n"},
      {"flux-sweep", "flux.points = 21\n"},
      {"dispersion", ""},
      {"rabi", "rabi.points = 101\n"},
      {"dispersive", "coupled.model = transmon\nqubit.ej_over_ec = 50\nresonator.cr_ff = 400\ncoupled.beta = 0.2\n"},
      {"readout", ""},
      {"pendulum", "pendulum.phi0 = 1.0\npendulum.periods = 5\n"},
  };
  int identical = 0;
  for (const auto& job : jobs) {
    const std::string base = work + "/" + job.command;
    spit(base + ".cfg", job.config);
    int codes[2];
    std::string rows[2];
    for (int k = 0; k < 2; ++k) {
      const std::string out = base + ".run" + std::to_string(k) + ".csv";
      std::remove(out.c_str());
      codes[k] = run_cli(cli, std::string(job.command) + " --config '" + base + ".cfg' --out '" + out + "'",
                         base + ".err");
      rows[k] = data_rows(slurp(out));
    }
    const bool ok = codes[0] == 0 && codes[1] == 0 && !rows[0].empty() && rows[0] == rows[1];
    c.check(ok, std::string(job.command) + ": exit " + std::to_string(codes[0]) + "/" +
                    std::to_string(codes[1]) + ", rows " + (rows[0] == rows[1] ? "identical" : "differ"));
    identical += ok;
  }

  struct Bad {
    const char* command;
    const char* config;
    const char* key;
  };
  const Bad bad[] = {
      {"spectrum", "qubit.ec_ghz = -1\n", "qubit.ec_ghz"},
      {"spectrum", "sweep.points = many\n", "sweep.points"},
      {"readout", "qubit.bogus = 1\n", "qubit.bogus"},
      {"rabi", "coupled.n_fock = 1\n", "coupled.n_fock"},
      {"pendulum", "pendulum.phi0 = 4\n", "pendulum.phi0"},
      {"dispersion", "dispersion.ratios = 1, -5\n", "dispersion.ratios"},
  };
  int rejected = 0;
  for (const auto& b : bad) {
    const std::string base = work + "/bad_" + std::to_string(rejected);
    spit(base + ".cfg", b.config);
    const int code = run_cli(cli, std::string(b.command) + " --config '" + base + ".cfg'", base + ".err");
    const std::string err = slurp(base + ".err");
    const bool ok = code == 2 && err.find(b.key) != std::string::npos;
    c.check(ok, std::string("invalid ") + b.key + ": exit " + std::to_string(code) + ", stderr '" + err + "'");
    ++rejected;
  }
  c.note(std::to_string(identical) + "/7 commands reproducible");
  c.note(std::to_string(rejected) + " invalid configs checked");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <cqed-cli> <work-dir>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1], work = argv[2];
  ::mkdir(work.c_str(), 0755);

  const std::vector<std::pair<const char*, std::function<void(Criterion&)>>> criteria = {
      {"AC1 charge-regime spectrum sweep vs dense oracle", ac1},
      {"AC2 dispersion and anharmonicity trends", ac2},
      {"AC3 exact limits", ac3},
      {"AC4 transmon asymptotics", ac4},
      {"AC5 vacuum Rabi swap", ac5},
      {"AC6 dispersive consistency", ac6},
      {"AC7 classical analogy", ac7},
      {"AC8 numerics invariants", ac8},
      {"AC9 CLI determinism and diagnostics", [&](Criterion& c) { ac9(c, cli, work); }},
  };

  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Criterion c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %s: %s\n", c.ok() ? "PASS" : "FAIL", name, c.detail().c_str());
    std::fflush(stdout);
    failed += !c.ok();
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
