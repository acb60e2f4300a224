#include "cqed/cqed.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "cqed/cavity.hpp"
#include "cqed/charge_qubit.hpp"
#include "cqed/error.hpp"
#include "cqed/runner.hpp"

struct cqed_config {
  cqed::RunConfig cfg;
};

struct cqed_result {
  cqed::ResultTable table;
};

namespace {

thread_local std::string g_last_error;

cqed_status to_status(cqed::ErrorCode code) {
  switch (code) {
    case cqed::ErrorCode::InvalidArgument: return CQED_ERR_INVALID_ARGUMENT;
    case cqed::ErrorCode::NotHermitian: return CQED_ERR_NOT_HERMITIAN;
    case cqed::ErrorCode::DimensionOverflow: return CQED_ERR_DIMENSION_OVERFLOW;
    case cqed::ErrorCode::ConvergenceFailure: return CQED_ERR_CONVERGENCE;
    case cqed::ErrorCode::NumericalFailure: return CQED_ERR_NUMERICAL;
    case cqed::ErrorCode::Config: return CQED_ERR_CONFIG;
    case cqed::ErrorCode::Io: return CQED_ERR_IO;
  }
  return CQED_ERR_INTERNAL;
}

cqed_status fail(cqed_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
cqed_status guarded(F&& fn) {
  try {
    fn();
    return CQED_OK;
  } catch (const cqed::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CQED_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CQED_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CQED_ERR_INTERNAL, "unknown error");
  }
}

std::optional<cqed::Command> command_arg(const char* command) {
  if (command == nullptr) return std::nullopt;
  const auto c = cqed::parse_command(command);
  if (!c) {
    throw cqed::Error(cqed::ErrorCode::Config, std::string("unknown command '") + command + "'");
  }
  return c;
}

cqed::OutputFormat format_arg(cqed_format f) {
  if (f == CQED_FORMAT_CSV) return cqed::OutputFormat::Csv;
  if (f == CQED_FORMAT_JSON) return cqed::OutputFormat::Json;
  throw cqed::Error(cqed::ErrorCode::InvalidArgument, "unknown output format");
}

#define CQED_REQUIRE(ptr)                                                       \
  do {                                                                          \
    if ((ptr) == nullptr) return fail(CQED_ERR_INVALID_ARGUMENT, #ptr " is NULL"); \
  } while (0)

}  // namespace

extern "C" {

const char* cqed_version(void) { return cqed::kVersion; }

const char* cqed_last_error(void) { return g_last_error.c_str(); }

const char* cqed_status_name(cqed_status status) {
  switch (status) {
    case CQED_OK: return "ok";
    case CQED_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CQED_ERR_NOT_HERMITIAN: return "not hermitian";
    case CQED_ERR_DIMENSION_OVERFLOW: return "dimension overflow";
    case CQED_ERR_CONVERGENCE: return "convergence failure";
    case CQED_ERR_NUMERICAL: return "numerical failure";
    case CQED_ERR_CONFIG: return "config error";
    case CQED_ERR_IO: return "i/o error";
    case CQED_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

cqed_status cqed_spectrum(double ej_ghz, double ec_ghz, double ng, size_t levels,
                          double* out_levels_ghz) {
  CQED_REQUIRE(out_levels_ghz);
  return guarded([&] {
    const auto s = cqed::spectrum({ej_ghz, ec_ghz, ng}, levels, false);
    std::copy(s.levels_ghz.begin(), s.levels_ghz.end(), out_levels_ghz);
  });
}

cqed_status cqed_squid_effective_ej(double ej_single_ghz, double flux_ratio, double* out_ej_ghz) {
  CQED_REQUIRE(out_ej_ghz);
  return guarded([&] { *out_ej_ghz = cqed::squid_effective_ej({ej_single_ghz, flux_ratio}); });
}

cqed_status cqed_params_from_physical(double ic_na, double cj_ff, double cshunt_ff, double cg_ff,
                                      double* out_ej_ghz, double* out_ec_ghz) {
  CQED_REQUIRE(out_ej_ghz);
  CQED_REQUIRE(out_ec_ghz);
  return guarded([&] {
    const auto q = cqed::params_from_physical({ic_na, cj_ff, cshunt_ff, cg_ff});
    *out_ej_ghz = q.ej_ghz;
    *out_ec_ghz = q.ec_ghz;
  });
}

cqed_status cqed_dispersive_shift(double f01_ghz, double fr_ghz, double g_ghz,
                                  double* out_chi_ghz, double* out_validity) {
  CQED_REQUIRE(out_chi_ghz);
  return guarded([&] {
    const auto d = cqed::dispersive_shift(cqed::two_level_spec(f01_ghz, fr_ghz, g_ghz, 2));
    *out_chi_ghz = d.chi_ghz;
    if (out_validity) *out_validity = d.validity;
  });
}

cqed_status cqed_config_load(const char* path, const char* command, cqed_config** out) {
  CQED_REQUIRE(path);
  CQED_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new cqed_config{cqed::load_config(path, command_arg(command))}; });
}

cqed_status cqed_config_parse(const char* text, const char* command, const char* source,
                              cqed_config** out) {
  CQED_REQUIRE(text);
  CQED_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new cqed_config{
        cqed::parse_config(text, command_arg(command), source ? source : "<config>")};
  });
}

cqed_status cqed_config_from_result(const char* text, cqed_config** out) {
  CQED_REQUIRE(text);
  CQED_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new cqed_config{cqed::config_from_result(text)}; });
}

void cqed_config_free(cqed_config* config) { delete config; }

const char* cqed_config_command(const cqed_config* config) {
  if (config == nullptr) return nullptr;
  return cqed::command_name(config->cfg.command).data();
}

cqed_status cqed_config_set_output(cqed_config* config, const char* path, cqed_format format) {
  CQED_REQUIRE(config);
  return guarded([&] {
    config->cfg.format = format_arg(format);
    if (path) config->cfg.output_path = path;
  });
}

cqed_status cqed_config_output(const cqed_config* config, const char** out_path,
                               cqed_format* out_format) {
  CQED_REQUIRE(config);
  if (out_path) {
    *out_path = config->cfg.output_path ? config->cfg.output_path->c_str() : nullptr;
  }
  if (out_format) {
    *out_format =
        config->cfg.format == cqed::OutputFormat::Json ? CQED_FORMAT_JSON : CQED_FORMAT_CSV;
  }
  return CQED_OK;
}

cqed_status cqed_run(const cqed_config* config, cqed_result** out) {
  CQED_REQUIRE(config);
  CQED_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new cqed_result{cqed::run(config->cfg)}; });
}

void cqed_result_free(cqed_result* result) { delete result; }

size_t cqed_result_rows(const cqed_result* result) {
  return result ? result->table.rows.size() : 0;
}

size_t cqed_result_cols(const cqed_result* result) {
  return result ? result->table.columns.size() : 0;
}

const char* cqed_result_column(const cqed_result* result, size_t col) {
  if (result == nullptr || col >= result->table.columns.size()) return nullptr;
  return result->table.columns[col].c_str();
}

cqed_status cqed_result_value(const cqed_result* result, size_t row, size_t col, double* out) {
  CQED_REQUIRE(result);
  CQED_REQUIRE(out);
  if (row >= result->table.rows.size() || col >= result->table.columns.size()) {
    return fail(CQED_ERR_INVALID_ARGUMENT, "cqed_result_value: index out of range");
  }
  *out = result->table.rows[row][col];
  return CQED_OK;
}

const char* cqed_result_note(const cqed_result* result, const char* key) {
  if (result == nullptr || key == nullptr) return nullptr;
  for (const auto& [k, v] : result->table.notes) {
    if (k == key) return v.c_str();
  }
  return nullptr;
}

cqed_status cqed_result_render(const cqed_result* result, cqed_format format, char** out_text) {
  CQED_REQUIRE(result);
  CQED_REQUIRE(out_text);
  *out_text = nullptr;
  return guarded([&] {
    const std::string text = cqed::render(result->table, format_arg(format));
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out_text = buf;
  });
}

cqed_status cqed_result_write(const cqed_result* result, const char* path, cqed_format format) {
  CQED_REQUIRE(result);
  CQED_REQUIRE(path);
  return guarded([&] { cqed::write_result(result->table, path, format_arg(format)); });
}

void cqed_string_free(char* text) { std::free(text); }

}  // extern "C"
