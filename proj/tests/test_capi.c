/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "cqed/cqed.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_direct(void) {
  double levels[3];
  EXPECT(cqed_spectrum(12.5, 0.25, 0.0, 3, levels) == CQED_OK);
  /* Ratio 50 transition energy from the dense numpy reference. */
  EXPECT(fabs((levels[1] - levels[0]) / 4.7354797310792351 - 1.0) < 1e-9);
  EXPECT(levels[0] < levels[1] && levels[1] < levels[2]);

  EXPECT(cqed_spectrum(12.5, -0.25, 0.0, 3, levels) == CQED_ERR_INVALID_ARGUMENT);
  EXPECT(strstr(cqed_last_error(), "E_C") != NULL);
  EXPECT(cqed_spectrum(12.5, 0.25, 0.0, 3, NULL) == CQED_ERR_INVALID_ARGUMENT);

  double ej = -1.0;
  EXPECT(cqed_squid_effective_ej(10.0, 0.0, &ej) == CQED_OK && ej == 20.0);
  EXPECT(cqed_squid_effective_ej(10.0, 0.5, &ej) == CQED_OK && fabs(ej) < 1e-14);

  double ec = 0.0;
  EXPECT(cqed_params_from_physical(30.0, 70.0, 0.0, 0.0, &ej, &ec) == CQED_OK);
  EXPECT(fabs(ej / 14.900505323300266 - 1.0) < 1e-12);
  EXPECT(fabs(ec / 0.27671756178084456 - 1.0) < 1e-12);

  double chi = 0.0, validity = 0.0;
  EXPECT(cqed_dispersive_shift(5.0, 6.0, 0.1, &chi, &validity) == CQED_OK);
  EXPECT(fabs(chi - 0.01) < 1e-15);
  EXPECT(fabs(validity - 10.0) < 1e-12);
  EXPECT(cqed_dispersive_shift(6.0, 6.0, 0.1, &chi, &validity) != CQED_OK);
}

static void test_batch(void) {
  const char* text =
      "# small sweep\n"
      "qubit.ec_ghz = 0.25\n"
      "qubit.ej_over_ec = 1\n"
      "sweep.points = 11\n"
      "spectrum.levels = 3\n";
  cqed_config* cfg = NULL;
  EXPECT(cqed_config_parse(text, "spectrum", "inline", &cfg) == CQED_OK);
  if (!cfg) return;
  EXPECT(strcmp(cqed_config_command(cfg), "spectrum") == 0);

  const char* path = (const char*)1;
  cqed_format fmt = CQED_FORMAT_JSON;
  EXPECT(cqed_config_output(cfg, &path, &fmt) == CQED_OK);
  EXPECT(path == NULL && fmt == CQED_FORMAT_CSV);

  cqed_result* res = NULL;
  EXPECT(cqed_run(cfg, &res) == CQED_OK);
  if (res) {
    EXPECT(cqed_result_rows(res) == 11);
    EXPECT(cqed_result_cols(res) == 4);
    EXPECT(strcmp(cqed_result_column(res, 0), "n_g") == 0);
    EXPECT(cqed_result_column(res, 99) == NULL);
    double v = 0.0;
    EXPECT(cqed_result_value(res, 10, 0, &v) == CQED_OK && v == 1.0);
    EXPECT(cqed_result_value(res, 11, 0, &v) == CQED_ERR_INVALID_ARGUMENT);
    EXPECT(cqed_result_note(res, "no_such_note") == NULL);

    char* csv = NULL;
    EXPECT(cqed_result_render(res, CQED_FORMAT_CSV, &csv) == CQED_OK);
    EXPECT(csv && strncmp(csv, "# cqed ", 7) == 0);

    /* The rendered text carries enough to rebuild and rerun the job. */
    cqed_config* again = NULL;
    EXPECT(cqed_config_from_result(csv, &again) == CQED_OK);
    cqed_result* res2 = NULL;
    if (again) EXPECT(cqed_run(again, &res2) == CQED_OK);
    if (res2) {
      double a = 0.0, b = 1.0;
      cqed_result_value(res, 5, 2, &a);
      cqed_result_value(res2, 5, 2, &b);
      EXPECT(a == b);
    }
    cqed_result_free(res2);
    cqed_config_free(again);
    cqed_string_free(csv);

    char* json = NULL;
    EXPECT(cqed_result_render(res, CQED_FORMAT_JSON, &json) == CQED_OK);
    EXPECT(json && json[0] == '{');
    cqed_string_free(json);

    EXPECT(cqed_result_write(res, "capi_out.json", CQED_FORMAT_JSON) == CQED_OK);
    FILE* f = fopen("capi_out.json", "r");
    EXPECT(f != NULL);
    if (f) {
      EXPECT(fgetc(f) == '{');
      fclose(f);
    }
    remove("capi_out.json");
    EXPECT(cqed_result_write(res, "/nonexistent-dir/x.csv", CQED_FORMAT_CSV) == CQED_ERR_IO);
  }
  cqed_result_free(res);
  cqed_config_free(cfg);
}

static void test_errors(void) {
  cqed_config* cfg = NULL;
  EXPECT(cqed_config_parse("qubit.ec_ghz = -1\n", "spectrum", "bad.cfg", &cfg) == CQED_ERR_CONFIG);
  EXPECT(cfg == NULL);
  EXPECT(strstr(cqed_last_error(), "qubit.ec_ghz") != NULL);
  EXPECT(strstr(cqed_last_error(), "bad.cfg:1") != NULL);

  EXPECT(cqed_config_parse("qubit.typo = 1\n", "spectrum", "x", &cfg) == CQED_ERR_CONFIG);
  EXPECT(cqed_config_parse("", "no-such-command", "x", &cfg) == CQED_ERR_CONFIG);
  EXPECT(cqed_config_load("/nonexistent.cfg", "spectrum", &cfg) != CQED_OK);

  EXPECT(cqed_run(NULL, NULL) == CQED_ERR_INVALID_ARGUMENT);
  EXPECT(cqed_result_rows(NULL) == 0);
  cqed_config_free(NULL);
  cqed_result_free(NULL);
  cqed_string_free(NULL);

  EXPECT(strcmp(cqed_status_name(CQED_OK), "") != 0);
  EXPECT(cqed_version() && cqed_version()[0] != '\0');
}

int main(void) {
  test_direct();
  test_batch();
  test_errors();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
