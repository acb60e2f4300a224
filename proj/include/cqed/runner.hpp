// runner.hpp — batch front end: flat key-value configs in, CSV/JSON tables out.
//
// Config files hold one `key = value` per line with dotted namespaces
// (qubit.ec_ghz, resonator.fr_ghz, ...). `#` starts a comment. Every value a
// command uses is resolved up front, defaults included, and recorded in the
// output metadata so a result file carries enough to regenerate itself.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cqed/cavity.hpp"
#include "cqed/charge_qubit.hpp"
#include "cqed/classical.hpp"

namespace cqed {

inline constexpr const char* kVersion = "0.1.0";

enum class Command { Spectrum, FluxSweep, Dispersion, Rabi, Dispersive, Readout, Pendulum };
enum class OutputFormat { Csv, Json };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command c);
std::optional<OutputFormat> parse_format(std::string_view name);

struct SpectrumJob {
  QubitParams qubit;
  double ng_min = -1.0;
  double ng_max = 1.0;
  std::size_t points = 201;
  std::size_t levels = 3;
  bool normalize = true;
};

struct FluxSweepJob {
  double ec_ghz = 0.25;
  double ng = 0.0;
  double ej_single_ghz = 6.25;
  double flux_min = 0.0;
  double flux_max = 0.5;
  std::size_t points = 51;
  std::size_t levels = 3;
};

struct DispersionJob {
  double ec_ghz = 0.25;
  std::vector<double> ratios{1.0, 5.0, 10.0, 50.0};
};

struct RabiJob {
  double fr_ghz = 6.0;
  double g_ghz = 0.1;
  std::size_t n_fock = 3;
  double t_max_ns = 10.0;
  std::size_t points = 201;
};

/// Coupled qubit-resonator model, either given directly by (f01, g) or
/// derived from circuit parameters.
struct CoupledModel {
  bool from_circuit = false;
  double f01_ghz = 5.0;
  double g_ghz = 0.1;
  QubitParams qubit;
  double beta = 0.0;
  ResonatorParams resonator;
  std::size_t n_transmon = 2;
  std::size_t n_fock = 3;

  CoupledSystemSpec build() const;
};

struct DispersiveJob {
  CoupledModel model;
};

struct ReadoutJob {
  CoupledModel model;
  double span_mhz = 100.0;
  std::size_t points = 1001;
  double min_validity = 5.0;
};

struct PendulumJob {
  QubitParams qubit;
  double phi0 = 0.5;
  double periods = 10.0;
  std::size_t steps_per_period = 1000;
  std::size_t sample_every = 10;
  double mass_kg = 1.0;
  double length_m = 1.0;
};

using Job = std::variant<SpectrumJob, FluxSweepJob, DispersionJob, RabiJob, DispersiveJob,
                         ReadoutJob, PendulumJob>;

struct RunConfig {
  Command command = Command::Spectrum;
  Job job;
  // Every key the command reads, defaults included, as `key`, `value`.
  std::vector<std::pair<std::string, std::string>> resolved;
  std::optional<std::string> output_path;
  OutputFormat format = OutputFormat::Csv;
  std::string source;  // file name used in diagnostics
};

/// Parses config text. `command` may be omitted if the text carries a
/// `command = ...` line; when both are present they must agree. Failures
/// throw Error with ErrorCode::Config and a `source:line:` prefix.
RunConfig parse_config(std::string_view text, std::optional<Command> command,
                       const std::string& source = "<config>");

RunConfig load_config(const std::string& path, std::optional<Command> command);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  Command command = Command::Spectrum;
  std::vector<std::pair<std::string, std::string>> config;
  // Extra descriptive lines: column schema, derived quantities, warnings.
  std::vector<std::pair<std::string, std::string>> notes;
  std::string version = kVersion;
  double wall_time_s = 0.0;
};

ResultTable run(const RunConfig& config);

std::string to_csv(const ResultTable& table);
std::string to_json(const ResultTable& table);
std::string render(const ResultTable& table, OutputFormat format);
void write_result(const ResultTable& table, const std::string& path, OutputFormat format);

/// Recovers the run configuration embedded in a CSV or JSON result.
RunConfig config_from_result(std::string_view text, const std::string& source = "<result>");

}  // namespace cqed
