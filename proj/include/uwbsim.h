/*
 * uwbsim — pulse-level simulator for time-hopping impulse-radio UWB sensor
 * networks.
 *
 * C interface to the simulation core. Handles are opaque; every function
 * returns a status code and the last failure message is retrievable per
 * thread. Distinct handles are safe to use from concurrent threads (a
 * scenario handle itself must not be shared while mutated).
 */

#ifndef UWBSIM_H
#define UWBSIM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uwbsim_status {
    UWBSIM_OK = 0,
    UWBSIM_ERR_INVALID_ARGUMENT = 1,
    UWBSIM_ERR_PARSE = 2,
    UWBSIM_ERR_VALIDATION = 3,
    UWBSIM_ERR_IO = 4,
    UWBSIM_ERR_RUNTIME = 5
} uwbsim_status;

typedef struct uwbsim_scenario uwbsim_scenario;
typedef struct uwbsim_result uwbsim_result;

const char* uwbsim_version(void);

/* Message for the most recent failure on the calling thread. */
const char* uwbsim_last_error(void);

/* Loads a scenario document (JSON). Relative file references inside the
 * document resolve against the scenario file's directory. */
uwbsim_status uwbsim_scenario_load_file(const char* path, uwbsim_scenario** out);
uwbsim_status uwbsim_scenario_load_string(const char* text, const char* base_dir,
                                          uwbsim_scenario** out);

/* Applies one dotted-path override, e.g. ("mac.retransmission_limit", "5").
 * The value is parsed as JSON when possible, else taken as a string. */
uwbsim_status uwbsim_scenario_set(uwbsim_scenario* s, const char* dotted_key, const char* value);

/* Validates the document; UWBSIM_OK means runnable. All findings (one per
 * line) are available from uwbsim_scenario_errors afterwards. */
uwbsim_status uwbsim_scenario_validate(uwbsim_scenario* s);
const char* uwbsim_scenario_errors(const uwbsim_scenario* s);

/* Effective configuration with every default materialized, as a JSON string.
 * Free with uwbsim_string_free. Returns NULL if the scenario is invalid. */
char* uwbsim_scenario_render(uwbsim_scenario* s);

/* Default seed from the scenario document. */
uint64_t uwbsim_scenario_seed(uwbsim_scenario* s);

/* Runs one seed. trace_path may be NULL to skip trace output. */
uwbsim_status uwbsim_run(uwbsim_scenario* s, uint64_t seed, const char* trace_path,
                         uwbsim_result** out);

/* Metrics summary of a finished run as a JSON string; owned by the result. */
const char* uwbsim_result_metrics_json(const uwbsim_result* r);

void uwbsim_scenario_free(uwbsim_scenario* s);
void uwbsim_result_free(uwbsim_result* r);
void uwbsim_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* UWBSIM_H */
