/* Generated accelerator top. Do not edit. */
#include "accel.h"

static act_t tile_buf_a[2048]; /* on-chip BRAM, 4096 bytes */
static act_t tile_buf_b[2048]; /* on-chip BRAM, 4096 bytes */
static weight_t weight_buf[280]; /* on-chip BRAM, 280 bytes */
static act_t fmap_ping[131072]; /* off-chip DRAM, 262144 bytes */
static act_t fmap_pong[49152]; /* off-chip DRAM, 98304 bytes */

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
    load_weights(weights, 0, weight_buf + 0, 1024); /* layer 0 */
    load_weights(weights, 1024, weight_buf + 64, 800); /* layer 1 */
    load_weights(weights, 1824, weight_buf + 264, 64); /* layer 2 */
    load_weights(weights, 1888, weight_buf + 280, 0); /* layer 3 */
    for (long t = 0; t < 64; ++t) {
        /* #pragma HLS dataflow */
        load_tile(fmap_in, t * 2048, tile_buf_a, 2048);
        /* layer 0: conv1x1, 64x64x32 -> 64x64x32 */
        ip_conv1x1(tile_buf_a, weight_buf + 0, tile_buf_b, 32, 32);
        /* layer 1: dwconv5x5, 64x64x32 -> 64x64x32 */
        ip_dwconv5x5(tile_buf_b, weight_buf + 64, tile_buf_a, 32, 32);
        /* layer 2: normalization, 64x64x32 -> 64x64x32 */
        ip_normalization(tile_buf_a, weight_buf + 264, tile_buf_b, 32, 32);
        /* layer 3: activation, 64x64x32 -> 64x64x32 */
        ip_activation(tile_buf_b, weight_buf + 280, tile_buf_a, 32, 32);
        store_tile(tile_buf_a, fmap_ping, t * 2048, 2048);
    }

    /* group 1: tile-pipelined, 24 tiles */
    load_weights(weights, 1888, weight_buf + 0, 2304); /* layer 4 */
    load_weights(weights, 4192, weight_buf + 64, 1200); /* layer 5 */
    load_weights(weights, 5392, weight_buf + 264, 96); /* layer 6 */
    load_weights(weights, 5488, weight_buf + 280, 0); /* layer 7 */
    for (long t = 0; t < 24; ++t) {
        /* #pragma HLS dataflow */
        load_tile(fmap_ping, t * 2048, tile_buf_a, 2048);
        /* layer 4: conv1x1, 32x32x48 -> 32x32x48 */
        ip_conv1x1(tile_buf_a, weight_buf + 0, tile_buf_b, 48, 48);
        /* layer 5: dwconv5x5, 32x32x48 -> 32x32x48 */
        ip_dwconv5x5(tile_buf_b, weight_buf + 64, tile_buf_a, 48, 48);
        /* layer 6: normalization, 32x32x48 -> 32x32x48 */
        ip_normalization(tile_buf_a, weight_buf + 264, tile_buf_b, 48, 48);
        /* layer 7: activation, 32x32x48 -> 32x32x48 */
        ip_activation(tile_buf_b, weight_buf + 280, tile_buf_a, 48, 48);
        store_tile(tile_buf_a, fmap_pong, t * 2048, 2048);
    }

    /* group 2: tile-pipelined, 32 tiles */
    load_weights(weights, 5488, weight_buf + 0, 4096); /* layer 8 */
    load_weights(weights, 9584, weight_buf + 64, 1600); /* layer 9 */
    load_weights(weights, 11184, weight_buf + 264, 128); /* layer 10 */
    load_weights(weights, 11312, weight_buf + 280, 0); /* layer 11 */
    for (long t = 0; t < 32; ++t) {
        /* #pragma HLS dataflow */
        load_tile(fmap_pong, t * 2048, tile_buf_a, 2048);
        /* layer 8: conv1x1, 32x32x64 -> 32x32x64 */
        ip_conv1x1(tile_buf_a, weight_buf + 0, tile_buf_b, 64, 64);
        /* layer 9: dwconv5x5, 32x32x64 -> 32x32x64 */
        ip_dwconv5x5(tile_buf_b, weight_buf + 64, tile_buf_a, 64, 64);
        /* layer 10: normalization, 32x32x64 -> 32x32x64 */
        ip_normalization(tile_buf_a, weight_buf + 264, tile_buf_b, 64, 64);
        /* layer 11: activation, 32x32x64 -> 32x32x64 */
        ip_activation(tile_buf_b, weight_buf + 280, tile_buf_a, 64, 64);
        store_tile(tile_buf_a, fmap_out, t * 2048, 2048);
    }
}
