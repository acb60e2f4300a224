// cqed: batch front end over the C API.
//
//   cqed <command> --config <path> [--out <path>] [--format csv|json]
//
// Exit codes: 0 success, 2 usage or config error, 3 failure while running.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "cqed/cqed.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;

int report(int exit_code, const char* what) {
  std::fprintf(stderr, "cqed: %s: %s\n", what, cqed_last_error());
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmon / circuit QED desk calculations"};
  app.set_version_flag("--version", cqed_version());

  std::string command;
  std::string config_path;
  std::string out_path;
  std::string format_name;
  std::string seed;
  app.add_option("command", command,
                 "spectrum | flux-sweep | dispersion | rabi | dispersive | readout | pendulum")
      ->required();
  app.add_option("--config", config_path, "key = value config file")->required();
  app.add_option("--out", out_path, "output file (default: stdout or output.path)");
  app.add_option("--format", format_name, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "accepted for interface compatibility; no command is random");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  cqed_config* config = nullptr;
  if (cqed_config_load(config_path.c_str(), command.c_str(), &config) != CQED_OK) {
    return report(kExitConfig, "config");
  }

  const char* configured_path = nullptr;
  cqed_format format = CQED_FORMAT_CSV;
  cqed_config_output(config, &configured_path, &format);
  if (!format_name.empty()) format = format_name == "json" ? CQED_FORMAT_JSON : CQED_FORMAT_CSV;
  if (!out_path.empty()) configured_path = out_path.c_str();
  const std::string target = configured_path ? configured_path : "";

  cqed_result* result = nullptr;
  const cqed_status status = cqed_run(config, &result);
  cqed_config_free(config);
  if (status != CQED_OK) {
    return report(status == CQED_ERR_CONFIG ? kExitConfig : kExitRun, "run");
  }

  int rc = 0;
  if (const char* warning = cqed_result_note(result, "warning")) {
    std::fprintf(stderr, "cqed: warning: %s\n", warning);
  }
  if (!target.empty()) {
    if (cqed_result_write(result, target.c_str(), format) != CQED_OK) rc = report(kExitRun, "write");
  } else {
    char* text = nullptr;
    if (cqed_result_render(result, format, &text) != CQED_OK) {
      rc = report(kExitRun, "render");
    } else {
      std::fputs(text, stdout);
      cqed_string_free(text);
    }
  }
  cqed_result_free(result);
  return rc;
}
