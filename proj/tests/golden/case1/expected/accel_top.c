/* Generated accelerator top. Do not edit. */
#include "accel.h"

static act_t tile_buf_a[2048]; /* on-chip BRAM, 2048 bytes */
static act_t tile_buf_b[2048]; /* on-chip BRAM, 2048 bytes */
static weight_t weight_buf[792]; /* on-chip BRAM, 792 bytes */
static act_t fmap_edge_1[131072]; /* off-chip DRAM, 131072 bytes */

act_t accel_clip(acc_t v)
{
    if (v < 0) {
        v = 0;
    }
#if ACT_CLIP_MAX > 0
    if (v > ACT_CLIP_MAX) {
        v = ACT_CLIP_MAX;
    }
#endif
    return (act_t)v;
}

void load_tile(const act_t* src, long offset, act_t* dst, long count)
{
    /* #pragma HLS pipeline II=1 */
    for (long i = 0; i < count; ++i) {
        dst[i] = src[offset + i];
    }
}

void store_tile(const act_t* src, act_t* dst, long offset, long count)
{
    /* #pragma HLS pipeline II=1 */
    for (long i = 0; i < count; ++i) {
        dst[offset + i] = src[i];
    }
}

void load_weights(const weight_t* src, long offset, weight_t* dst, long count)
{
    /* #pragma HLS pipeline II=1 */
    for (long i = 0; i < count; ++i) {
        dst[i] = src[offset + i];
    }
}

void accel_top(const act_t* fmap_in, act_t* fmap_out, const weight_t* weights)
{
    /* #pragma HLS interface m_axi port=fmap_in,fmap_out,weights */

    /* group 0: tile-pipelined, 64 tiles */
    load_weights(weights, 0, weight_buf + 0, 9216); /* layer 0 */
    load_weights(weights, 9216, weight_buf + 576, 800); /* layer 1 */
    load_weights(weights, 10016, weight_buf + 776, 64); /* layer 2 */
    load_weights(weights, 10080, weight_buf + 792, 0); /* layer 3 */
    for (long t = 0; t < 64; ++t) {
        /* #pragma HLS dataflow */
        load_tile(fmap_in, t * 2048, tile_buf_a, 2048);
        /* layer 0: conv3x3, 64x64x32 -> 64x64x32 */
        ip_conv3x3(tile_buf_a, weight_buf + 0, tile_buf_b, 32, 32);
        /* layer 1: dwconv5x5, 64x64x32 -> 64x64x32 */
        ip_dwconv5x5(tile_buf_b, weight_buf + 576, tile_buf_a, 32, 32);
        /* layer 2: normalization, 64x64x32 -> 64x64x32 */
        ip_normalization(tile_buf_a, weight_buf + 776, tile_buf_b, 32, 32);
        /* layer 3: activation, 64x64x32 -> 64x64x32 */
        ip_activation(tile_buf_b, weight_buf + 792, tile_buf_a, 32, 32);
        store_tile(tile_buf_a, fmap_edge_1, t * 2048, 2048);
    }

    /* group 1: tile-pipelined, 64 tiles */
    load_weights(weights, 10080, weight_buf + 0, 9216); /* layer 4 */
    load_weights(weights, 19296, weight_buf + 576, 800); /* layer 5 */
    load_weights(weights, 20096, weight_buf + 776, 64); /* layer 6 */
    load_weights(weights, 20160, weight_buf + 792, 0); /* layer 7 */
    for (long t = 0; t < 64; ++t) {
        /* #pragma HLS dataflow */
        load_tile(fmap_edge_1, t * 2048, tile_buf_a, 2048);
        /* layer 4: conv3x3, 64x64x32 -> 64x64x32 */
        ip_conv3x3(tile_buf_a, weight_buf + 0, tile_buf_b, 32, 32);
        /* layer 5: dwconv5x5, 64x64x32 -> 64x64x32 */
        ip_dwconv5x5(tile_buf_b, weight_buf + 576, tile_buf_a, 32, 32);
        /* layer 6: normalization, 64x64x32 -> 64x64x32 */
        ip_normalization(tile_buf_a, weight_buf + 776, tile_buf_b, 32, 32);
        /* layer 7: activation, 64x64x32 -> 64x64x32 */
        ip_activation(tile_buf_b, weight_buf + 792, tile_buf_a, 32, 32);
        store_tile(tile_buf_a, fmap_out, t * 2048, 2048);
    }
}
