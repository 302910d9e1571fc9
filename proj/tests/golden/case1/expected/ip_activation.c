/* Generated IP template instance: activation, PF=4. Do not edit. */
#include "accel.h"

/* One output tile per call; zero padding at the tile border. */
void ip_activation(const act_t* in, const weight_t* w, act_t* out, int in_c, int out_c)
{
    for (int oy = 0; oy < TILE_H; ++oy) {
        for (int ox = 0; ox < TILE_W; ++ox) {
            for (int oc = 0; oc < out_c; ++oc) {
                /* #pragma HLS pipeline II=1 */
                out[(oy * TILE_W + ox) * out_c + oc] =
                    accel_clip((acc_t)in[(oy * TILE_W + ox) * in_c + oc]);
            }
        }
    }
}
