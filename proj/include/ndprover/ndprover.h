#ifndef NDPROVER_H
#define NDPROVER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NDP_API __declspec(dllexport)
#else
#define NDP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum {
  NDP_OK = 0,
  NDP_NEGATIVE = 1,        /* goal not derivable, proof invalid, not guaranteed */
  NDP_PARSE_ERROR = 2,     /* also bad arguments and inputs outside the fragment */
  NDP_RESOURCE_LIMIT = 3,  /* grounding ceiling, leaf ceiling or A* budget */
  NDP_INTERNAL_ERROR = 4
} ndp_status;

typedef enum {
  NDP_STRATEGY_GROUND = 0,
  NDP_STRATEGY_SHALLOW = 1,
  NDP_STRATEGY_TOP1 = 2,
  NDP_STRATEGY_ASTAR = 3
} ndp_strategy;

typedef enum {
  NDP_FRAGMENT_FORWARD = 0,
  NDP_FRAGMENT_QUERY = 1,
  NDP_FRAGMENT_PLANNING = 2
} ndp_fragment;

typedef struct ndp_kb ndp_kb;
typedef struct ndp_result ndp_result;

typedef struct {
  ndp_strategy strategy;
  uint64_t budget;             /* A* expansions; 0 means unlimited */
  uint64_t grounding_ceiling;  /* 0 means the default */
  int want_proof;
  unsigned threads;            /* 0 means 1 */
} ndp_query_options;

typedef struct {
  ndp_strategy strategy;
  uint64_t max_leaves;         /* 0 means the default */
  uint64_t grounding_ceiling;  /* 0 means the default */
  int want_proof;
  int want_trace;
  unsigned threads;
} ndp_plan_options;

typedef struct {
  ndp_fragment fragment;
  const uint64_t* sizes;  /* D for query, k for planning, body literals for forward */
  size_t size_count;
  uint64_t seed;
  unsigned repetitions;   /* 0 means 5 */
  uint64_t existentials;  /* query N; 0 means 2 */
} ndp_bench_options;

NDP_API const char* ndp_version(void);

/* Message for the most recent failure on this thread; never NULL. */
NDP_API const char* ndp_last_error(void);

NDP_API void ndp_query_options_init(ndp_query_options* o);
NDP_API void ndp_plan_options_init(ndp_plan_options* o);
NDP_API void ndp_bench_options_init(ndp_bench_options* o);

/* On a parse error *out is NULL and ndp_last_error() lists the diagnostics. */
NDP_API ndp_status ndp_kb_parse(const char* text, const char* filename, ndp_kb** out);
NDP_API void ndp_kb_free(ndp_kb* kb);
/* Warnings from parsing, one per line; empty if none. Owned by the handle. */
NDP_API const char* ndp_kb_diagnostics(const ndp_kb* kb);
NDP_API size_t ndp_kb_fact_count(const ndp_kb* kb);
NDP_API size_t ndp_kb_rule_count(const ndp_kb* kb);

/* Each operation stores its report in *out, also on NDP_NEGATIVE and
   NDP_RESOURCE_LIMIT. Free it with ndp_result_free. */
NDP_API ndp_status ndp_check(const char* proof_text, const char* filename, ndp_result** out);
/* goal may be NULL: the report then lists derived facts (all facts if dump). */
NDP_API ndp_status ndp_run(const ndp_kb* kb, const char* goal, int dump, int want_proof, ndp_result** out);
NDP_API ndp_status ndp_query(const ndp_kb* kb, const char* goal, const ndp_query_options* o, ndp_result** out);
NDP_API ndp_status ndp_plan(const ndp_kb* kb, const char* goal, const ndp_plan_options* o, ndp_result** out);
NDP_API ndp_status ndp_bench(const ndp_bench_options* o, const char* csv_path, ndp_result** out);

NDP_API void ndp_result_free(ndp_result* r);
/* VALID, INVALID, FOUND, NOT-FOUND, GUARANTEED, NOT-GUARANTEED, or "" */
NDP_API const char* ndp_result_verdict(const ndp_result* r);
/* Report lines without the stats, newline-terminated. */
NDP_API const char* ndp_result_text(const ndp_result* r);
NDP_API size_t ndp_result_stat_count(const ndp_result* r);
NDP_API const char* ndp_result_stat_key(const ndp_result* r, size_t i);
NDP_API const char* ndp_result_stat_value(const ndp_result* r, size_t i);
/* NULL when absent. */
NDP_API const char* ndp_result_proof(const ndp_result* r);
NDP_API const char* ndp_result_trace(const ndp_result* r);

#ifdef __cplusplus
}
#endif

#endif
