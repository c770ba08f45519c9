#ifndef SPEX_H
#define SPEX_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SpexStatus {
  SPEX_STATUS_OK = 0,
  SPEX_STATUS_NULL_POINTER = 1,
  SPEX_STATUS_INVALID_ARGUMENT = 2,
  SPEX_STATUS_LABEL_MISMATCH = 3,
  SPEX_STATUS_MISSING_CENTROIDS = 4,
  SPEX_STATUS_MALFORMED_TREE = 5,
  SPEX_STATUS_IO = 6,
  SPEX_STATUS_PANIC = 7,
} SpexStatus;

typedef enum SpexAlgorithm {
  SPEX_ALGORITHM_SPEX_CLIQUE = 0,
  SPEX_ALGORITHM_SPEX_KNN = 1,
  SPEX_ALGORITHM_CART = 2,
  SPEX_ALGORITHM_IMM = 3,
  SPEX_ALGORITHM_EMN = 4,
} SpexAlgorithm;

// Opaque point set.
typedef struct SpexDataset SpexDataset;

// Opaque fitted tree.
typedef struct SpexTree SpexTree;

// Options for [`spex_fit`]. Zero `leaves` means one leaf per reference
// cluster. Without labels, a positive `kmeans_k` builds the reference with
// k-means (`restarts`, `seed`).
typedef struct SpexFitOptions {
  enum SpexAlgorithm algorithm;
  size_t leaves;
  size_t kappa;
  // IMM diametrical pairs under l1 instead of l2.
  bool l1_norm;
  size_t kmeans_k;
  size_t restarts;
  uint64_t seed;
} SpexFitOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread. The pointer stays valid
// until the next failing call on the same thread.
const char *spex_last_error(void);

// Copies `n * d` row-major values into a new dataset.
//
// # Safety
// `values` must point to `n * d` readable doubles and `out` must be writable.
enum SpexStatus spex_dataset_new(const double *values,
                                 size_t n,
                                 size_t d,
                                 struct SpexDataset **out);

// # Safety
// `ds` must come from [`spex_dataset_new`] and not be used afterwards.
void spex_dataset_free(struct SpexDataset *ds);

// # Safety
// `ds` must be a live dataset or null.
size_t spex_dataset_n(const struct SpexDataset *ds);

// # Safety
// `ds` must be a live dataset or null.
size_t spex_dataset_d(const struct SpexDataset *ds);

// Fits a tree. `labels` may be null (with `labels_len` 0) when
// `opts.kmeans_k` is positive or the algorithm is the kNN variant.
//
// # Safety
// `ds` must be live; `labels` must point to `labels_len` readable values;
// `opts` and `out` must be valid.
enum SpexStatus spex_fit(const struct SpexDataset *ds,
                         const size_t *labels,
                         size_t labels_len,
                         const struct SpexFitOptions *opts,
                         struct SpexTree **out);

// # Safety
// `tree` must come from this library and not be used afterwards.
void spex_tree_free(struct SpexTree *tree);

// # Safety
// `tree` must be a live tree or null.
size_t spex_tree_leaf_count(const struct SpexTree *tree);

// Writes the cluster of every row of `ds` into `out` (`out_len >= n`).
//
// # Safety
// `tree`, `ds` must be live; `out` must point to `out_len` writable values.
enum SpexStatus spex_tree_assign(const struct SpexTree *tree,
                                 const struct SpexDataset *ds,
                                 size_t *out,
                                 size_t out_len);

// Serializes a tree; release the string with [`spex_string_free`].
//
// # Safety
// `tree` must be live and `out` writable.
enum SpexStatus spex_tree_to_json(const struct SpexTree *tree, char **out);

// # Safety
// `json` must be a nul-terminated string and `out` writable.
enum SpexStatus spex_tree_from_json(const char *json, struct SpexTree **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void spex_string_free(char *s);

// Adjusted Rand index of two labelings of `n` points.
//
// # Safety
// `a` and `b` must point to `n` readable values and `out` must be writable.
enum SpexStatus spex_ari(const size_t *a, const size_t *b, size_t n, double *out);

// Adjusted mutual information of two labelings of `n` points.
//
// # Safety
// `a` and `b` must point to `n` readable values and `out` must be writable.
enum SpexStatus spex_ami(const size_t *a, const size_t *b, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPEX_H */
