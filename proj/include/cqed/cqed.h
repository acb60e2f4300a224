/* cqed.h: C interface to the cqed library.
 *
 * Every call returns a cqed_status. On failure the message is available from
 * cqed_last_error() until the next failing call on the same thread. Objects
 * are opaque and must be released with the matching _free function.
 * Frequencies are ordinary frequencies in GHz.
 */
#ifndef CQED_H
#define CQED_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(CQED_BUILDING_LIBRARY)
#define CQED_API __declspec(dllexport)
#else
#define CQED_API __declspec(dllimport)
#endif
#else
#define CQED_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cqed_status {
  CQED_OK = 0,
  CQED_ERR_INVALID_ARGUMENT = 1,
  CQED_ERR_NOT_HERMITIAN = 2,
  CQED_ERR_DIMENSION_OVERFLOW = 3,
  CQED_ERR_CONVERGENCE = 4,
  CQED_ERR_NUMERICAL = 5,
  CQED_ERR_CONFIG = 6,
  CQED_ERR_IO = 7,
  CQED_ERR_INTERNAL = 99
} cqed_status;

typedef enum cqed_format { CQED_FORMAT_CSV = 0, CQED_FORMAT_JSON = 1 } cqed_format;

typedef struct cqed_config cqed_config;
typedef struct cqed_result cqed_result;

CQED_API const char* cqed_version(void);
CQED_API const char* cqed_last_error(void);
CQED_API const char* cqed_status_name(cqed_status status);

/* Direct calculations. */

/* Lowest `levels` eigenenergies of the charge-basis Hamiltonian, in GHz. */
CQED_API cqed_status cqed_spectrum(double ej_ghz, double ec_ghz, double ng, size_t levels,
                                   double* out_levels_ghz);
CQED_API cqed_status cqed_squid_effective_ej(double ej_single_ghz, double flux_ratio,
                                             double* out_ej_ghz);
CQED_API cqed_status cqed_params_from_physical(double ic_na, double cj_ff, double cshunt_ff,
                                               double cg_ff, double* out_ej_ghz,
                                               double* out_ec_ghz);
CQED_API cqed_status cqed_dispersive_shift(double f01_ghz, double fr_ghz, double g_ghz,
                                           double* out_chi_ghz, double* out_validity);

/* Batch runs. `command` may be NULL when the text carries a `command = ...` line. */

CQED_API cqed_status cqed_config_load(const char* path, const char* command, cqed_config** out);
CQED_API cqed_status cqed_config_parse(const char* text, const char* command, const char* source,
                                       cqed_config** out);
/* Rebuilds the configuration embedded in a CSV or JSON result. */
CQED_API cqed_status cqed_config_from_result(const char* text, cqed_config** out);
CQED_API void cqed_config_free(cqed_config* config);

CQED_API const char* cqed_config_command(const cqed_config* config);
/* NULL `path` leaves the current output path alone. */
CQED_API cqed_status cqed_config_set_output(cqed_config* config, const char* path,
                                            cqed_format format);
/* Sets *out_path to NULL when no output file is configured. */
CQED_API cqed_status cqed_config_output(const cqed_config* config, const char** out_path,
                                        cqed_format* out_format);

CQED_API cqed_status cqed_run(const cqed_config* config, cqed_result** out);
CQED_API void cqed_result_free(cqed_result* result);

CQED_API size_t cqed_result_rows(const cqed_result* result);
CQED_API size_t cqed_result_cols(const cqed_result* result);
CQED_API const char* cqed_result_column(const cqed_result* result, size_t col);
CQED_API cqed_status cqed_result_value(const cqed_result* result, size_t row, size_t col,
                                       double* out);
/* Looks up a note such as a warning or a derived scalar; NULL if absent. */
CQED_API const char* cqed_result_note(const cqed_result* result, const char* key);

/* Rendered text is owned by the caller; release with cqed_string_free. */
CQED_API cqed_status cqed_result_render(const cqed_result* result, cqed_format format,
                                        char** out_text);
CQED_API cqed_status cqed_result_write(const cqed_result* result, const char* path,
                                       cqed_format format);
CQED_API void cqed_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* CQED_H */
