/* Generated accelerator interface. Do not edit. */
#ifndef ACCEL_H
#define ACCEL_H

#include <stdint.h>

typedef int8_t act_t;
typedef int8_t weight_t;
typedef int32_t acc_t;

#define TILE_W 16
#define TILE_H 16
#define TILE_C 8
#define PF 4
#define ACT_CLIP_MAX 0 /* 0 = unbounded */

act_t accel_clip(acc_t v);
void load_tile(const act_t* src, long offset, act_t* dst, long count);
void store_tile(const act_t* src, act_t* dst, long offset, long count);
void load_weights(const weight_t* src, long offset, weight_t* dst, long count);

void ip_conv3x3(const act_t* in, const weight_t* w, act_t* out, int in_c, int out_c);
void ip_dwconv5x5(const act_t* in, const weight_t* w, act_t* out, int in_c, int out_c);
void ip_normalization(const act_t* in, const weight_t* w, act_t* out, int in_c, int out_c);
void ip_activation(const act_t* in, const weight_t* w, act_t* out, int in_c, int out_c);

void accel_top(const act_t* fmap_in, act_t* fmap_out, const weight_t* weights);

#endif /* ACCEL_H */
