#include <cstddef>

#include "growthcast/kernels/conv.hpp"

// Naive textbook loops with explicit bounds checks. Intentionally structured
// differently from the parallel kernels so they can serve as an oracle.

namespace growthcast::kernels::serial {

void conv2d_forward(const double* in, const double* w, const double* bias, double* out,
                    const ConvDims& d) {
    for (int oc = 0; oc < d.cout; ++oc)
        for (int oy = 0; oy < d.hout; ++oy)
            for (int ox = 0; ox < d.wout; ++ox) {
                double acc = bias ? bias[oc] : 0.0;
                for (int ic = 0; ic < d.cin; ++ic)
                    for (int ky = 0; ky < d.k; ++ky)
                        for (int kx = 0; kx < d.k; ++kx) {
                            int iy = oy * d.stride + ky - d.pad;
                            int ix = ox * d.stride + kx - d.pad;
                            if (iy < 0 || iy >= d.hin || ix < 0 || ix >= d.win) continue;
                            acc += w[((std::size_t(oc) * d.cin + ic) * d.k + ky) * d.k + kx] *
                                   in[(std::size_t(ic) * d.hin + iy) * d.win + ix];
                        }
                out[(std::size_t(oc) * d.hout + oy) * d.wout + ox] = acc;
            }
}

void conv2d_backward_input(const double* dout, const double* w, double* din, const ConvDims& d) {
    for (std::size_t i = 0; i < std::size_t(d.cin) * d.hin * d.win; ++i) din[i] = 0.0;
    for (int oc = 0; oc < d.cout; ++oc)
        for (int oy = 0; oy < d.hout; ++oy)
            for (int ox = 0; ox < d.wout; ++ox) {
                double g = dout[(std::size_t(oc) * d.hout + oy) * d.wout + ox];
                for (int ic = 0; ic < d.cin; ++ic)
                    for (int ky = 0; ky < d.k; ++ky)
                        for (int kx = 0; kx < d.k; ++kx) {
                            int iy = oy * d.stride + ky - d.pad;
                            int ix = ox * d.stride + kx - d.pad;
                            if (iy < 0 || iy >= d.hin || ix < 0 || ix >= d.win) continue;
                            din[(std::size_t(ic) * d.hin + iy) * d.win + ix] +=
                                g * w[((std::size_t(oc) * d.cin + ic) * d.k + ky) * d.k + kx];
                        }
            }
}

void conv2d_backward_weights(const double* in, const double* dout, double* dw, double* dbias,
                             const ConvDims& d) {
    for (int oc = 0; oc < d.cout; ++oc)
        for (int oy = 0; oy < d.hout; ++oy)
            for (int ox = 0; ox < d.wout; ++ox) {
                double g = dout[(std::size_t(oc) * d.hout + oy) * d.wout + ox];
                if (dbias) dbias[oc] += g;
                for (int ic = 0; ic < d.cin; ++ic)
                    for (int ky = 0; ky < d.k; ++ky)
                        for (int kx = 0; kx < d.k; ++kx) {
                            int iy = oy * d.stride + ky - d.pad;
                            int ix = ox * d.stride + kx - d.pad;
                            if (iy < 0 || iy >= d.hin || ix < 0 || ix >= d.win) continue;
                            dw[((std::size_t(oc) * d.cin + ic) * d.k + ky) * d.k + kx] +=
                                g * in[(std::size_t(ic) * d.hin + iy) * d.win + ix];
                        }
            }
}

}  // namespace growthcast::kernels::serial
