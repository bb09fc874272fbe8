#ifndef GLBLOCKS_H
#define GLBLOCKS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum GlbStatus {
  GLB_STATUS_OK = 0,
  GLB_STATUS_NULL_POINTER = 1,
  GLB_STATUS_INVALID_UTF8 = 2,
  GLB_STATUS_INVALID_INPUT = 3,
  GLB_STATUS_COMPUTATION_FAILED = 4,
  GLB_STATUS_VERIFICATION_FAILED = 5,
  GLB_STATUS_PANIC = 6,
} GlbStatus;

/**
 * Opaque handle to a block of gl(m|n).
 */
typedef struct GlbBlock GlbBlock;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null if none.
 * The caller owns the string and frees it with [`glb_string_free`].
 */
char *glb_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library that has not
 * been freed yet.
 */
void glb_string_free(char *s);

/**
 * Creates a block handle from a key such as `"mu=0;nu=2:1;t=1"`.
 *
 * # Safety
 * `key` must be a NUL-terminated string and `out` valid for a pointer write.
 */
enum GlbStatus glb_block_new(uintptr_t m, uintptr_t n, const char *key, struct GlbBlock **out);

/**
 * Releases a block handle.
 *
 * # Safety
 * `block` must be null or a handle from [`glb_block_new`] not yet freed.
 */
void glb_block_free(struct GlbBlock *block);

/**
 * Atypicality `t` of the block, or `-1` for a null handle.
 *
 * # Safety
 * `block` must be null or a live handle.
 */
int64_t glb_block_atypicality(const struct GlbBlock *block);

/**
 * Cartan entry `[P(lambda) : L(kappa)]` as a decimal string.
 *
 * # Safety
 * `block` must be a live handle, `lambda` and `kappa` NUL-terminated
 * compositions, and `out` valid for a pointer write.
 */
enum GlbStatus glb_cartan_entry(const struct GlbBlock *block,
                                const char *lambda,
                                const char *kappa,
                                char **out);

/**
 * Graded Cartan entry as a JSON object mapping exponents to coefficients.
 *
 * # Safety
 * Same contract as [`glb_cartan_entry`].
 */
enum GlbStatus glb_graded_cartan(const struct GlbBlock *block,
                                 const char *lambda,
                                 const char *kappa,
                                 char **out);

/**
 * Number of simples in the projective cover of `lambda`, as a decimal string.
 *
 * # Safety
 * `lambda` must be NUL-terminated and `out` valid for a pointer write.
 */
enum GlbStatus glb_h_count(const char *lambda, char **out);

/**
 * Dual canonical basis vector on rank-`rank` tensor space as
 * `{"terms":[{"key":[..],"coeff":{..}}]}`.
 *
 * # Safety
 * `signs` and `key` must be NUL-terminated and `out` valid for a pointer write.
 */
enum GlbStatus glb_dual_canonical(uintptr_t rank, const char *signs, const char *key, char **out);

/**
 * Runs the verification suite (`"quick"` or `"full"`) and writes the JSON
 * report. Returns [`GlbStatus::VerificationFailed`] if any criterion fails.
 *
 * # Safety
 * `profile` must be NUL-terminated and `out` valid for a pointer write.
 */
enum GlbStatus glb_verify(const char *profile, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GLBLOCKS_H */
