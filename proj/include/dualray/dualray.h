/* C interface to the dual-view synthesis pipeline. All functions return a
 * dr_status; on failure dr_last_error() holds a message for the calling
 * thread. The library never prints on success paths except where a command
 * documents its own logging. */

#ifndef DUALRAY_H
#define DUALRAY_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dr_status {
    DR_OK = 0,
    DR_ERR_CONFIG = 2,
    DR_ERR_DATA = 3,
    DR_ERR_NUMERIC = 4
} dr_status;

/* Library and file-format versions as a JSON object. Static storage. */
const char* dr_version_json(void);

/* Message of the most recent failure on this thread; "" when none. */
const char* dr_last_error(void);

/* Runs one pipeline command: gen-data, train, sample, eval, warp,
 * project-gcd or pluecker. config_json uses the documented schema; unknown
 * keys are rejected. */
dr_status dr_run(const char* command, const char* config_json);

/* Image metrics over row-major interleaved float pixels in [0, 1]. */
dr_status dr_psnr(const float* a, const float* b, int height, int width, int channels,
                  double* out_db);
dr_status dr_ssim(const float* a, const float* b, int height, int width, int channels,
                  double* out);

/* Opaque camera trajectory. poses16: per frame 16 row-major doubles
 * (camera-to-world); intrinsics4: per frame fx, fy, cx, cy. */
typedef struct dr_trajectory dr_trajectory;

dr_trajectory* dr_trajectory_create(const double* poses16, const double* intrinsics4,
                                    int frames);
void dr_trajectory_destroy(dr_trajectory* traj);

/* Re-expresses both trajectories relative to the target's first pose (which
 * becomes identity) and divides translations by `normalization`; pass 0 to
 * use the largest camera-center norm after canonicalization. */
dr_status dr_canonicalize_pair(dr_trajectory* target, dr_trajectory* input,
                               double normalization);

/* Copies pose `frame` out as 16 row-major doubles. */
dr_status dr_trajectory_pose(const dr_trajectory* traj, int frame, double* out16);

/* Ray map of the whole trajectory into a caller buffer of
 * frames*height*width*6 floats: unit direction then moment per pixel. */
dr_status dr_pluecker_map(const dr_trajectory* traj, int height, int width, float* out);

/* Azimuth, elevation, radius deltas (target minus input) read at the anchor
 * frame; anchor 0 = middle, 1 = last. */
dr_status dr_gcd_delta(const dr_trajectory* target, const dr_trajectory* input, int anchor,
                       double out3[3]);

/* Fixed spectral codec over [-1, 1] videos. encode: (t, h, w) are pixel
 * dims, t % 4 == 0 and h, w % 8 == 0; latent holds (t/4)*(h/8)*(w/8)*16
 * floats. decode: (t, h, w) are latent dims; video holds (4t)*(8h)*(8w)*3. */
dr_status dr_codec_encode(const float* video, int t, int h, int w, float* latent);
dr_status dr_codec_decode(const float* latent, int t, int h, int w, float* video);

#ifdef __cplusplus
}
#endif

#endif /* DUALRAY_H */
