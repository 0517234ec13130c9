#ifndef RDTF_RDTF_H
#define RDTF_RDTF_H

#include <stddef.h>

#if defined(RDTF_BUILDING_LIBRARY)
#define RDTF_API __attribute__((visibility("default")))
#else
#define RDTF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rdtf_status {
  RDTF_OK = 0,
  RDTF_INVALID_ARGUMENT = 1,
  RDTF_GRID_MISMATCH = 2,
  RDTF_NOT_POSITIVE_DEFINITE = 3,
  RDTF_CFL = 4,
  RDTF_RESOLUTION_FLOOR = 5,
  RDTF_INSUFFICIENT_RANGE = 6,
  RDTF_IO = 7,
  RDTF_CONFIG = 8,
  RDTF_CHECK_FAILED = 9,
  RDTF_INTERNAL = 10
} rdtf_status;

typedef struct rdtf_metric rdtf_metric;
typedef struct rdtf_scalar rdtf_scalar;
typedef struct rdtf_trajectory rdtf_trajectory;

typedef struct rdtf_grid_params {
  int dim;             /* 2 or 3 */
  double half_width;   /* box [-L, L]^n */
  int points;          /* nodes per axis, odd */
  double collar_width; /* flat boundary collar */
} rdtf_grid_params;

typedef struct rdtf_cone_params {
  double center[3];
  double sigma;
  double amplitude;
  double p;
  int direction; /* 0 = identity, 1 = e11 */
  double bump_inner;
  double bump_outer;
} rdtf_cone_params;

/* Message of the last failing call on this thread; never NULL. */
RDTF_API const char* rdtf_last_error(void);
RDTF_API const char* rdtf_version(void);
RDTF_API const char* rdtf_status_name(rdtf_status status);

RDTF_API void rdtf_cone_defaults(rdtf_cone_params* out);

RDTF_API rdtf_status rdtf_metric_flat(const rdtf_grid_params* grid, rdtf_metric** out);
RDTF_API rdtf_status rdtf_metric_cone(const rdtf_grid_params* grid, const rdtf_cone_params* cone, rdtf_metric** out);
RDTF_API rdtf_status rdtf_metric_load(const char* path, rdtf_metric** out);
RDTF_API rdtf_status rdtf_metric_save(const rdtf_metric* g, const char* path);
RDTF_API rdtf_status rdtf_metric_save_csv(const rdtf_metric* g, const char* path);
RDTF_API rdtf_status rdtf_metric_node_count(const rdtf_metric* g, size_t* out);
/* Copies the n x n matrix at `node` into out[dim*dim], row-major. */
RDTF_API rdtf_status rdtf_metric_get(const rdtf_metric* g, size_t node, double* out);
RDTF_API void rdtf_metric_free(rdtf_metric* g);

RDTF_API rdtf_status rdtf_scalar_curvature(const rdtf_metric* g, rdtf_scalar** out);
RDTF_API rdtf_status rdtf_scalar_size(const rdtf_scalar* f, size_t* out);
RDTF_API rdtf_status rdtf_scalar_data(const rdtf_scalar* f, const double** out);
RDTF_API void rdtf_scalar_free(rdtf_scalar* f);

RDTF_API rdtf_status rdtf_c0_distance(const rdtf_metric* a, const rdtf_metric* b, double* out);

/* Flows g0 to t_end with `snapshots` stored slices t_end 2^{-k/per_octave}. */
RDTF_API rdtf_status rdtf_flow_run(const rdtf_metric* g0, double t_end, double sigma, int snapshots, int per_octave,
                                   rdtf_trajectory** out);
RDTF_API rdtf_status rdtf_trajectory_size(const rdtf_trajectory* tr, size_t* out);
RDTF_API rdtf_status rdtf_trajectory_time(const rdtf_trajectory* tr, size_t index, double* out);
/* Fresh metric for slice `index`; caller frees. */
RDTF_API rdtf_status rdtf_trajectory_metric(const rdtf_trajectory* tr, size_t index, rdtf_metric** out);
RDTF_API rdtf_status rdtf_trajectory_save(const rdtf_trajectory* tr, const char* dir);
RDTF_API rdtf_status rdtf_trajectory_load(const char* dir, rdtf_trajectory** out);
RDTF_API void rdtf_trajectory_free(rdtf_trajectory* tr);

RDTF_API rdtf_status rdtf_config_validate(const char* path);
/* Runs every experiment of the config. `output_root` may be NULL. `passed`
   receives 1 when every experiment passed. */
RDTF_API rdtf_status rdtf_run_config(const char* path, const char* output_root, int* passed);
/* Writes the experiment table into buf (NUL-terminated, truncated to len).
   `needed` receives the full size including the terminator. */
RDTF_API rdtf_status rdtf_list_experiments(char* buf, size_t len, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif
