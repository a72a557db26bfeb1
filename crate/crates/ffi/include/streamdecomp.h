#ifndef STREAMDECOMP_H
#define STREAMDECOMP_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SD_ALGORITHM_HASHING 0

#define SD_ALGORITHM_LDG 1

#define SD_ALGORITHM_FENNEL 2

#define SD_ALGORITHM_HEISTREAM 3

#define SD_ALGORITHM_OMS 4

#define SD_OBJECTIVE_CONNECTIVITY 0

#define SD_OBJECTIVE_CUT_NET 1

/**
 * Marks an absent metric in `SdReport`.
 */
#define SD_NONE UINT64_MAX

/**
 * Status codes returned by every fallible function.
 */
typedef enum SdStatus {
  SD_STATUS_OK = 0,
  SD_STATUS_NULL_POINTER = 1,
  SD_STATUS_INVALID_ARGUMENT = 2,
  SD_STATUS_IO = 3,
  SD_STATUS_PARSE = 4,
  SD_STATUS_INVARIANT = 5,
  SD_STATUS_PANIC = 6,
} SdStatus;

/**
 * Opaque in-memory graph.
 */
typedef struct SdGraph SdGraph;

/**
 * Opaque in-memory hypergraph.
 */
typedef struct SdHypergraph SdHypergraph;

/**
 * Parameters of a graph partitioning run. Fill with
 * `sd_partition_options_default` and override what you need.
 */
typedef struct SdPartitionOptions {
  /**
   * One of `SD_ALGORITHM_*`.
   */
  uint32_t algorithm;
  uint32_t k;
  double epsilon;
  uint64_t seed;
  double gamma;
  /**
   * Fennel α; values ≤ 0 select the default computed from n, m and k.
   */
  double alpha;
  uint32_t passes;
  double alpha_growth;
  /**
   * Multi-section tree fan-out for OMS without a hierarchy.
   */
  uint32_t base;
  /**
   * HeiStream batch size.
   */
  uint64_t delta;
  /**
   * HeiStream: nonzero selects the extended model.
   */
  uint32_t extended_model;
  uint32_t x;
  /**
   * OMS: number of bottom layers assigned by hashing.
   */
  uint32_t hash_bottom_layers;
} SdPartitionOptions;

/**
 * Quality of a partition. Absent values are `SD_NONE`.
 */
typedef struct SdReport {
  uint64_t edge_cut;
  uint64_t cut_net;
  uint64_t connectivity;
  uint64_t comm_cost;
  double imbalance;
  uint64_t max_block_weight;
  uint64_t l_max;
  uint64_t balance_violations;
  /**
   * α used by the scorer, or 0.
   */
  double alpha;
} SdReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message of the calling thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sd_last_error(void);

/**
 * Builds a graph from CSR arrays. `xadj` has `n + 1` entries and
 * `adjncy` lists every edge in both directions. `vwgt` (length `n`) and
 * `adjwgt` (length `xadj[n]`) may be null for unit weights.
 *
 * # Safety
 * All non-null pointers must be valid for the stated lengths; `out` must
 * be writable.
 */
enum SdStatus sd_graph_new(size_t n,
                           const uint64_t *xadj,
                           const uint32_t *adjncy,
                           const uint64_t *vwgt,
                           const uint64_t *adjwgt,
                           struct SdGraph **out);

/**
 * Reads a METIS graph file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SdStatus sd_graph_read_metis(const char *path, struct SdGraph **out);

/**
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void sd_graph_free(struct SdGraph *g);

/**
 * # Safety
 * `g` must be a live handle or null.
 */
size_t sd_graph_num_nodes(const struct SdGraph *g);

/**
 * # Safety
 * `g` must be a live handle or null.
 */
size_t sd_graph_num_edges(const struct SdGraph *g);

/**
 * Builds a hypergraph from net-major arrays: net `e` holds the pins
 * `pins[eptr[e]..eptr[e+1]]`. `vwgt` (length `n`) and `ewgt` (length `m`)
 * may be null.
 *
 * # Safety
 * All non-null pointers must be valid for the stated lengths; `out` must
 * be writable.
 */
enum SdStatus sd_hypergraph_new(size_t n,
                                size_t m,
                                const uint64_t *eptr,
                                const uint32_t *pins,
                                const uint64_t *vwgt,
                                const uint64_t *ewgt,
                                struct SdHypergraph **out);

/**
 * Reads an hMetis (net-major) file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SdStatus sd_hypergraph_read_hmetis(const char *path, struct SdHypergraph **out);

/**
 * Reads a node-major hypergraph file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SdStatus sd_hypergraph_read_node_major(const char *path, struct SdHypergraph **out);

/**
 * # Safety
 * `h` must come from this library and not be used afterwards.
 */
void sd_hypergraph_free(struct SdHypergraph *h);

/**
 * # Safety
 * `h` must be a live handle or null.
 */
size_t sd_hypergraph_num_nodes(const struct SdHypergraph *h);

/**
 * # Safety
 * `h` must be a live handle or null.
 */
size_t sd_hypergraph_num_nets(const struct SdHypergraph *h);

/**
 * # Safety
 * `opts` must be writable.
 */
void sd_partition_options_default(struct SdPartitionOptions *opts);

/**
 * Partitions `g` into `opts->k` blocks. `assignment` receives one block
 * id per node; `report` may be null.
 *
 * # Safety
 * `g` and `opts` must be valid; `assignment` must hold `n` entries.
 */
enum SdStatus sd_partition_graph(const struct SdGraph *g,
                                 const struct SdPartitionOptions *opts,
                                 uint32_t *assignment,
                                 struct SdReport *report);

/**
 * Maps `g` onto the hierarchy `fanouts[0..layers]` (innermost first) with
 * per-layer `distances`. `opts->k` is ignored; k is the product of the
 * fan-outs. `opts->algorithm` selects OMS or a flat partitioner whose
 * block `i` becomes PE `i`. `threads > 1` runs OMS node-parallel.
 *
 * # Safety
 * Pointers must be valid; `assignment` must hold `n` entries.
 */
enum SdStatus sd_map_graph(const struct SdGraph *g,
                           const uint32_t *fanouts,
                           const uint64_t *distances,
                           size_t layers,
                           const struct SdPartitionOptions *opts,
                           uint32_t threads,
                           uint32_t *assignment,
                           struct SdReport *report);

/**
 * Streams `h` through FREIGHT with one of `SD_OBJECTIVE_*`. `alpha ≤ 0`
 * selects the default.
 *
 * # Safety
 * `h` must be valid; `assignment` must hold `n` entries.
 */
enum SdStatus sd_freight(const struct SdHypergraph *h,
                         uint32_t k,
                         double epsilon,
                         uint32_t objective,
                         double alpha,
                         uint32_t *assignment,
                         struct SdReport *report);

/**
 * Quality of an existing graph partition. With `layers > 0` the
 * communication cost on that hierarchy is included.
 *
 * # Safety
 * `assignment` must hold `n` entries; hierarchy arrays hold `layers`.
 */
enum SdStatus sd_graph_metrics(const struct SdGraph *g,
                               const uint32_t *assignment,
                               uint32_t k,
                               double epsilon,
                               const uint32_t *fanouts,
                               const uint64_t *distances,
                               size_t layers,
                               struct SdReport *report);

/**
 * Quality of an existing hypergraph partition.
 *
 * # Safety
 * `assignment` must hold `n` entries.
 */
enum SdStatus sd_hypergraph_metrics(const struct SdHypergraph *h,
                                    const uint32_t *assignment,
                                    uint32_t k,
                                    double epsilon,
                                    struct SdReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STREAMDECOMP_H */
