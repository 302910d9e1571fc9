/* Generated IP template instance: dwconv5x5, PF=4. Do not edit. */
#include "accel.h"

/* One output tile per call; zero padding at the tile border. */
void ip_dwconv5x5(const act_t* in, const weight_t* w, act_t* out, int in_c, int out_c)
{
    for (int oy = 0; oy < TILE_H; ++oy) {
        for (int ox = 0; ox < TILE_W; ++ox) {
            for (int oc = 0; oc < out_c; ++oc) {
                /* #pragma HLS unroll factor=PF */
                acc_t acc = 0;
                for (int ky = 0; ky < 5; ++ky) {
                    for (int kx = 0; kx < 5; ++kx) {
                        int iy = oy + ky - 2;
                        int ix = ox + kx - 2;
                        if (iy < 0 || iy >= TILE_H || ix < 0 || ix >= TILE_W) {
                            continue;
                        }
                        acc += (acc_t)in[(iy * TILE_W + ix) * in_c + oc] *
                               (acc_t)w[(ky * 5 + kx) * out_c + oc];
                    }
                }
                out[(oy * TILE_W + ox) * out_c + oc] = accel_clip(acc);
            }
        }
    }
}
