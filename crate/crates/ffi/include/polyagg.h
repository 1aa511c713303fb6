#ifndef POLYAGG_H
#define POLYAGG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PolyaggStatus {
  POLYAGG_STATUS_OK = 0,
  POLYAGG_STATUS_NULL_POINTER = 1,
  POLYAGG_STATUS_INVALID_ARGUMENT = 2,
  POLYAGG_STATUS_PARSE = 3,
  POLYAGG_STATUS_IO = 4,
  POLYAGG_STATUS_NUMERICAL = 5,
  POLYAGG_STATUS_PANIC = 6,
} PolyaggStatus;

/**
 * Opaque polygonal mesh.
 */
typedef struct PolyaggMesh PolyaggMesh;

/**
 * Opaque fracture network.
 */
typedef struct PolyaggNetwork PolyaggNetwork;

typedef struct PolyaggQuality {
  double rho1;
  double rho2;
  double rho3;
  double rho4;
  double rho;
} PolyaggQuality;

typedef struct PolyaggAgglomerationStats {
  size_t cells_before;
  size_t cells_after;
  int64_t energy_before;
  int64_t energy_after;
  size_t cycles;
} PolyaggAgglomerationStats;

typedef struct PolyaggSolveReport {
  size_t cells;
  size_t dofs;
  size_t nnz;
  double err_l2;
  double err_h1;
  /**
   * NaN when no exact solution is known.
   */
  double rel_h1;
} PolyaggSolveReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *polyagg_last_error(void);

/**
 * Quality scores of one polygon given by `n` counter-clockwise vertices.
 *
 * # Safety
 * `xs` and `ys` point to `n` readable doubles; `out` is writable.
 */
enum PolyaggStatus polyagg_polygon_quality(const double *xs,
                                           const double *ys,
                                           size_t n,
                                           struct PolyaggQuality *out);

/**
 * Builds a mesh from vertex coordinates and cells in CSR form: cell `c`
 * has vertices `cell_vertices[cell_offsets[c] .. cell_offsets[c + 1]]`.
 *
 * # Safety
 * `xs`, `ys` hold `num_vertices` doubles, `cell_offsets` holds `num_cells + 1`
 * entries and `cell_vertices` holds `cell_offsets[num_cells]` entries; `out` is writable.
 */
enum PolyaggStatus polyagg_mesh_new(const double *xs,
                                    const double *ys,
                                    size_t num_vertices,
                                    const size_t *cell_offsets,
                                    const size_t *cell_vertices,
                                    size_t num_cells,
                                    struct PolyaggMesh **out);

/**
 * Reads a mesh in the polyagg text format.
 *
 * # Safety
 * `path` is a NUL-terminated string; `out` is writable.
 */
enum PolyaggStatus polyagg_mesh_read(const char *path, struct PolyaggMesh **out);

/**
 * # Safety
 * `mesh` is a live handle; `path` is a NUL-terminated string.
 */
enum PolyaggStatus polyagg_mesh_write(const struct PolyaggMesh *mesh, const char *path);

/**
 * # Safety
 * `mesh` is null or a handle not yet freed.
 */
void polyagg_mesh_free(struct PolyaggMesh *mesh);

/**
 * Number of cells, 0 for a null handle.
 *
 * # Safety
 * `mesh` is null or a live handle.
 */
size_t polyagg_mesh_num_cells(const struct PolyaggMesh *mesh);

/**
 * # Safety
 * `mesh` is null or a live handle.
 */
size_t polyagg_mesh_num_vertices(const struct PolyaggMesh *mesh);

/**
 * Writes the combined score of every cell into `out` (length `len` ≥ cells).
 *
 * # Safety
 * `mesh` is a live handle; `out` points to `len` writable doubles.
 */
enum PolyaggStatus polyagg_mesh_quality(const struct PolyaggMesh *mesh, double *out, size_t len);

/**
 * Agglomerates `mesh` into a new handle. `sc_mode` is 0 for potts, 1 for literal.
 *
 * # Safety
 * `mesh` is a live handle; `out` is writable; `stats` is null or writable.
 */
enum PolyaggStatus polyagg_mesh_agglomerate(const struct PolyaggMesh *mesh,
                                            double lambda,
                                            uint32_t sc_mode_id,
                                            size_t max_cycles,
                                            struct PolyaggMesh **out,
                                            struct PolyaggAgglomerationStats *stats);

/**
 * Solves `-Δu = f` for a built-in manufactured solution (`linear`,
 * `quadratic`, `cubic`, `sin`) with Dirichlet data on the whole boundary.
 *
 * # Safety
 * `mesh` is a live handle; `solution` is a NUL-terminated string; `out` is writable.
 */
enum PolyaggStatus polyagg_mesh_solve(const struct PolyaggMesh *mesh,
                                      uint32_t k,
                                      const char *solution,
                                      struct PolyaggSolveReport *out);

/**
 * Loads a network: `builtin:network1` or a path to a network file.
 *
 * # Safety
 * `spec` is a NUL-terminated string; `out` is writable.
 */
enum PolyaggStatus polyagg_network_load(const char *spec, struct PolyaggNetwork **out);

/**
 * # Safety
 * `net` is null or a handle not yet freed.
 */
void polyagg_network_free(struct PolyaggNetwork *net);

/**
 * # Safety
 * `net` is null or a live handle.
 */
size_t polyagg_network_num_fractures(const struct PolyaggNetwork *net);

/**
 * Runs the full pipeline with maximum triangle area `area`.
 *
 * # Safety
 * `net` is a live handle; `out` is writable.
 */
enum PolyaggStatus polyagg_network_solve(const struct PolyaggNetwork *net,
                                         double area,
                                         double lambda,
                                         uint32_t k,
                                         struct PolyaggSolveReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYAGG_H */
