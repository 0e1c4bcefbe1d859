/* C interface to the c2lab library.
 *
 * Every function returns a c2lab_status. On failure the message of the most
 * recent error on the calling thread is available from c2lab_last_error().
 * Strings returned through char** out-parameters are owned by the caller and
 * released with c2lab_string_free(). Structured reports are JSON text.
 */
#ifndef C2LAB_C2LAB_H
#define C2LAB_C2LAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(C2LAB_BUILDING)
#define C2LAB_API __attribute__((visibility("default")))
#else
#define C2LAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum c2lab_status {
  C2LAB_OK = 0,
  C2LAB_ERROR_SYNTAX = 1,
  C2LAB_ERROR_UNKNOWN_PREDICATE = 2,
  C2LAB_ERROR_ARITY_MISMATCH = 3,
  C2LAB_ERROR_UNKNOWN_OBJECT = 4,
  C2LAB_ERROR_INVALID_INPUT = 5,
  C2LAB_ERROR_UNSUPPORTED_ARITY = 6,
  C2LAB_ERROR_TWO_VARIABLE = 7,
  C2LAB_ERROR_UNBOUND_VARIABLE = 8,
  C2LAB_ERROR_MIXED_INPUTS = 9,
  C2LAB_ERROR_NOT_FOUND = 10,
  C2LAB_ERROR_RESOURCE_CAP = 11,
  C2LAB_ERROR_DIVERGENCE = 12,
  C2LAB_ERROR_SHAPE_MISMATCH = 13,
  C2LAB_ERROR_NULL_ARGUMENT = 14,
  C2LAB_ERROR_OUT_OF_MEMORY = 15,
  C2LAB_ERROR_INTERNAL = 16
} c2lab_status;

typedef enum c2lab_encoding {
  /* Whatever the consuming operation expects. */
  C2LAB_ENCODING_DEFAULT = 0,
  /* State atoms plus goal duplicates. */
  C2LAB_ENCODING_EQ1 = 1,
  /* Goal-extended structure plus reversed copies of binary relations. */
  C2LAB_ENCODING_PLOI = 2,
  /* PLOI structure as a labeled graph. */
  C2LAB_ENCODING_LABELED_GRAPH = 3
} c2lab_encoding;

typedef struct c2lab_document c2lab_document;

C2LAB_API const char* c2lab_version(void);
C2LAB_API const char* c2lab_status_name(c2lab_status status);
/* Thread-local; empty string when the last call succeeded. */
C2LAB_API const char* c2lab_last_error(void);
C2LAB_API void c2lab_string_free(char* text);

C2LAB_API c2lab_status c2lab_document_parse(const char* text, c2lab_document** out);
C2LAB_API c2lab_status c2lab_document_builtin(const char* name, c2lab_document** out);
C2LAB_API void c2lab_document_free(c2lab_document* document);
C2LAB_API c2lab_status c2lab_document_instance_count(const c2lab_document* document, size_t* out);
/* The name stays valid for the document's lifetime. */
C2LAB_API c2lab_status c2lab_document_instance_name(const c2lab_document* document, size_t index,
                                                    const char** out);
C2LAB_API c2lab_status c2lab_document_serialize(const c2lab_document* document, char** out);

/* Instance arguments name an instance of the document; NULL selects the only
 * instance of a single-instance document. Operations use the initial state. */

C2LAB_API c2lab_status c2lab_encode(const c2lab_document* document, const char* instance,
                                    c2lab_encoding encoding, char** dump);
C2LAB_API c2lab_status c2lab_is_goal_state(const c2lab_document* document, const char* instance, int* out);
/* *length is -1 when no goal state is reachable within `bound` actions. */
C2LAB_API c2lab_status c2lab_plan_length(const c2lab_document* document, const char* instance, size_t bound,
                                         uint64_t action_cap, int64_t* length);
/* Evaluates a sentence on the goal-extended state structure. A NULL formula
 * selects the built-in goal-not-achieved sentence. */
C2LAB_API c2lab_status c2lab_eval(const c2lab_document* document, const char* instance, const char* formula,
                                  int* out);

typedef struct c2lab_input {
  const c2lab_document* document;
  const char* instance;
  c2lab_encoding encoding;
} c2lab_input;

/* regime: "rgnn", "pairtype-c2" (structures, goal-extended by default) or
 * "ploi-sparse" (labeled graphs, LABELED_GRAPH by default).
 * max_rounds 0 means the size of the union. */
C2LAB_API c2lab_status c2lab_distinguish(const c2lab_input* a, const c2lab_input* b, const char* regime,
                                         size_t max_rounds, char** report);

typedef struct c2lab_net_shape {
  size_t embedding;
  size_t layers;
  size_t hidden; /* 0: same as embedding */
  int residual;
} c2lab_net_shape;

typedef struct c2lab_random_config {
  size_t trials;
  double epsilon;
  c2lab_net_shape shape;
  uint64_t seed;
  size_t threads; /* 0: hardware concurrency */
} c2lab_random_config;

C2LAB_API void c2lab_random_config_init(c2lab_random_config* config);
/* Random-initialisation test on the structures of a and b (goal-extended
 * unless PLOI is requested). Either output may be NULL. trials_csv: trial_id,seed,out1,out2,rel_diff. */
C2LAB_API c2lab_status c2lab_random_test(const c2lab_input* a, const c2lab_input* b,
                                         const c2lab_random_config* config, char** trials_csv,
                                         char** summary);

typedef struct c2lab_train_config {
  size_t steps;
  double learning_rate;
  c2lab_net_shape shape;
  uint64_t seed;
  double slack;
} c2lab_train_config;

typedef struct c2lab_example {
  c2lab_input input;
  double target;
} c2lab_example;

C2LAB_API void c2lab_train_config_init(c2lab_train_config* config);
/* Full-batch training, goal-extended unless PLOI is requested. curve_csv: step,loss. */
C2LAB_API c2lab_status c2lab_train_test(const c2lab_example* examples, size_t count,
                                        const c2lab_train_config* config, char** curve_csv, char** summary);

/* Gradient check of freshly initialised parameters on one example. */
C2LAB_API c2lab_status c2lab_grad_check(const c2lab_example* example, const c2lab_net_shape* shape,
                                        uint64_t seed, double tolerance, char** report);

#ifdef __cplusplus
}
#endif

#endif
