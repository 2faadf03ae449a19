#ifndef CMLHDC_H
#define CMLHDC_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CmlhdcStatus {
  CMLHDC_STATUS_OK = 0,
  CMLHDC_STATUS_NULL_POINTER = 1,
  CMLHDC_STATUS_INVALID_ARGUMENT = 2,
  CMLHDC_STATUS_DIMENSION_MISMATCH = 3,
  CMLHDC_STATUS_OUT_OF_RANGE = 4,
  CMLHDC_STATUS_IO = 5,
  CMLHDC_STATUS_PARSE = 6,
  CMLHDC_STATUS_FAILED = 7,
  CMLHDC_STATUS_PANIC = 8,
} CmlhdcStatus;

typedef struct CmlhdcGraph CmlhdcGraph;

typedef struct CmlhdcHypervector CmlhdcHypervector;

typedef struct CmlhdcModel CmlhdcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. The
// returned string is a copy owned by the caller.
char *cmlhdc_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, freed only once.
void cmlhdc_string_free(char *s);

// Random bipolar hypervector drawn from the stream `(seed, [stream])`.
//
// # Safety
// `out` must be a valid pointer.
enum CmlhdcStatus cmlhdc_hv_random(size_t d,
                                   uint64_t seed,
                                   uint64_t stream,
                                   struct CmlhdcHypervector **out);

// Hypervector from `len` elements, each +1 or -1.
//
// # Safety
// `elems` must point to `len` readable bytes; `out` must be valid.
enum CmlhdcStatus cmlhdc_hv_from_elements(const int8_t *elems,
                                          size_t len,
                                          struct CmlhdcHypervector **out);

// # Safety
// `hv` must be null or a live handle.
size_t cmlhdc_hv_dim(const struct CmlhdcHypervector *hv);

// Copies the elements into `buf`, which must hold `dim` bytes.
//
// # Safety
// `buf` must point to `len` writable bytes.
enum CmlhdcStatus cmlhdc_hv_elements(const struct CmlhdcHypervector *hv, int8_t *buf, size_t len);

// # Safety
// `a`, `b` and `out` must be valid.
enum CmlhdcStatus cmlhdc_hv_bind(const struct CmlhdcHypervector *a,
                                 const struct CmlhdcHypervector *b,
                                 struct CmlhdcHypervector **out);

// Cosine similarity.
//
// # Safety
// `a`, `b` and `out` must be valid.
enum CmlhdcStatus cmlhdc_hv_similarity(const struct CmlhdcHypervector *a,
                                       const struct CmlhdcHypervector *b,
                                       double *out);

// # Safety
// `hv` must be null or a handle not yet freed.
void cmlhdc_hv_free(struct CmlhdcHypervector *hv);

// Random connected graph with `edges` undirected edges.
//
// # Safety
// `out` must be valid.
enum CmlhdcStatus cmlhdc_graph_random(size_t n,
                                      size_t edges,
                                      uint64_t seed,
                                      struct CmlhdcGraph **out);

// Graph from `{"n": .., "edges": [[u, v], ..]}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be valid.
enum CmlhdcStatus cmlhdc_graph_from_json(const char *json, struct CmlhdcGraph **out);

// # Safety
// `g` and `out` must be valid; free the result with `cmlhdc_string_free`.
enum CmlhdcStatus cmlhdc_graph_to_json(const struct CmlhdcGraph *g, char **out);

// # Safety
// `g` must be null or a live handle.
size_t cmlhdc_graph_node_count(const struct CmlhdcGraph *g);

// Shortest hop count between two nodes.
//
// # Safety
// `g` and `out` must be valid.
enum CmlhdcStatus cmlhdc_graph_distance(const struct CmlhdcGraph *g,
                                        size_t u,
                                        size_t v,
                                        size_t *out);

// # Safety
// `g` must be null or a handle not yet freed.
void cmlhdc_graph_free(struct CmlhdcGraph *g);

// Trains a model on a copy of `g`; the graph handle stays owned by the caller.
//
// # Safety
// `g` and `out` must be valid.
enum CmlhdcStatus cmlhdc_model_train(const struct CmlhdcGraph *g,
                                     size_t d,
                                     size_t epochs,
                                     uint64_t seed,
                                     struct CmlhdcModel **out);

// # Safety
// `json` must be a nul-terminated string; `out` must be valid.
enum CmlhdcStatus cmlhdc_model_from_json(const char *json, struct CmlhdcModel **out);

// # Safety
// `m` and `out` must be valid; free the result with `cmlhdc_string_free`.
enum CmlhdcStatus cmlhdc_model_to_json(const struct CmlhdcModel *m, char **out);

// Plans from `start` to `target`. `max_steps = 0` uses the default cap of
// four times the node count. `reached` is false when the target was not hit
// or an impermissible action was chosen.
//
// # Safety
// `m`, `reached` and `steps` must be valid.
enum CmlhdcStatus cmlhdc_model_traverse(const struct CmlhdcModel *m,
                                        size_t start,
                                        size_t target,
                                        size_t max_steps,
                                        bool *reached,
                                        size_t *steps);

// Adjacency check plus random traversals; `success` is true when all pass.
//
// # Safety
// `m` and `success` must be valid.
enum CmlhdcStatus cmlhdc_model_evaluate(const struct CmlhdcModel *m, uint64_t seed, bool *success);

// # Safety
// `m` must be null or a handle not yet freed.
void cmlhdc_model_free(struct CmlhdcModel *m);

// Runs an experiment from a JSON config (same schema as the CLI's
// `--config`) and returns the result record as JSON.
//
// # Safety
// `config_json` must be a nul-terminated string; `out` must be valid.
enum CmlhdcStatus cmlhdc_run_experiment(const char *config_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CMLHDC_H */
