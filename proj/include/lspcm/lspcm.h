#ifndef LSPCM_LSPCM_H
#define LSPCM_LSPCM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define LSPCM_API __declspec(dllexport)
#else
#define LSPCM_API __attribute__((visibility("default")))
#endif

typedef enum lspcm_status {
    LSPCM_OK = 0,
    LSPCM_ERR_USAGE = 1,    /* bad argument, unknown key, out-of-range setting */
    LSPCM_ERR_DATA = 2,     /* malformed input or file problem */
    LSPCM_ERR_RUNTIME = 3,  /* numerical failure during a run */
    LSPCM_ERR_INTERNAL = 4
} lspcm_status;

typedef struct lspcm_network lspcm_network;
typedef struct lspcm_config lspcm_config;

/* Message of the last failing call on this thread; never NULL. */
LSPCM_API const char* lspcm_last_error(void);
LSPCM_API const char* lspcm_version(void);

/* Networks. format: 0 auto, 1 dense CSV, 2 edge list. */
LSPCM_API lspcm_status lspcm_network_load(const char* path, int format, int directed, lspcm_network** out);
LSPCM_API lspcm_status lspcm_network_from_dense(const uint8_t* values, int n, int directed, lspcm_network** out);
LSPCM_API void lspcm_network_free(lspcm_network* net);
LSPCM_API int lspcm_network_size(const lspcm_network* net);
LSPCM_API lspcm_status lspcm_network_density(const lspcm_network* net, double* out);
LSPCM_API lspcm_status lspcm_network_save(const lspcm_network* net, const char* path);

/* Run configuration. Keys match the command-line flags without dashes. */
LSPCM_API lspcm_status lspcm_config_create(lspcm_config** out);
LSPCM_API void lspcm_config_free(lspcm_config* cfg);
LSPCM_API lspcm_status lspcm_config_set(lspcm_config* cfg, const char* key, const char* value);
LSPCM_API lspcm_status lspcm_config_load_file(lspcm_config* cfg, const char* path);
/* Checks every setting for range errors. */
LSPCM_API lspcm_status lspcm_config_validate(const lspcm_config* cfg);
/* Accepted keys, in sorted order; NULL past the end. */
LSPCM_API size_t lspcm_config_key_count(void);
LSPCM_API const char* lspcm_config_key(size_t index);

/* Pipeline stages; each writes its files into outdir. */
LSPCM_API lspcm_status lspcm_simulate(const lspcm_config* cfg, const char* outdir);
LSPCM_API lspcm_status lspcm_fit(const lspcm_config* cfg, const char* network_path, const char* outdir);
/* truth_path may be NULL. */
LSPCM_API lspcm_status lspcm_postprocess(const char* const* traces, size_t count, const char* truth_path,
                                         const char* outdir);
/* On success *text and *csv (either may be NULL) receive strings to release
   with lspcm_string_free. */
LSPCM_API lspcm_status lspcm_report(const char* const* summaries, size_t count, char** text, char** csv);
LSPCM_API void lspcm_string_free(char* s);

/* Labels are arbitrary integers; matrices are row-major n x p. */
LSPCM_API lspcm_status lspcm_adjusted_rand_index(const int* a, const int* b, size_t n, double* out);
LSPCM_API lspcm_status lspcm_procrustes_correlation(const double* x, const double* y, size_t n, size_t p,
                                                    double* out);

#ifdef __cplusplus
}
#endif

#endif
