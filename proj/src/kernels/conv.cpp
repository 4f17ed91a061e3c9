#include "growthcast/kernels/conv.hpp"

#include <algorithm>
#include <cstddef>

#include "growthcast/common.hpp"

namespace growthcast::kernels {

namespace {

// First index >= 0 with index*stride + k_off - pad >= 0.
inline int lo_index(int k_off, int pad, int stride) {
    int need = pad - k_off;
    return need <= 0 ? 0 : (need + stride - 1) / stride;
}

// One past the last index with index*stride + k_off - pad <= limit - 1.
inline int hi_index(int k_off, int pad, int stride, int limit, int count) {
    int rhs = limit - 1 - k_off + pad;
    if (rhs < 0) return 0;
    return std::min(count, rhs / stride + 1);
}

}  // namespace

ConvDims conv_dims(int cin, int hin, int win, int cout, int k, int stride, int pad) {
    ConvDims d{cin, hin, win, cout, k, stride, pad, 0, 0};
    d.hout = (hin + 2 * pad - k) / stride + 1;
    d.wout = (win + 2 * pad - k) / stride + 1;
    if (d.hout <= 0 || d.wout <= 0)
        throw ConfigError("convolution output would be empty (input " + std::to_string(hin) + "x" +
                          std::to_string(win) + ", kernel " + std::to_string(k) + ")");
    return d;
}

void conv2d_forward(const double* in, const double* w, const double* bias, double* out,
                    const ConvDims& d) {
    const std::size_t out_plane = std::size_t(d.hout) * d.wout;
    const std::size_t in_plane = std::size_t(d.hin) * d.win;
#pragma omp parallel for schedule(static)
    for (int oc = 0; oc < d.cout; ++oc) {
        double* outp = out + oc * out_plane;
        const double b = bias ? bias[oc] : 0.0;
        std::fill(outp, outp + out_plane, b);
        for (int ic = 0; ic < d.cin; ++ic) {
            const double* inp = in + ic * in_plane;
            for (int ky = 0; ky < d.k; ++ky) {
                const int oy_lo = lo_index(ky, d.pad, d.stride);
                const int oy_hi = hi_index(ky, d.pad, d.stride, d.hin, d.hout);
                for (int kx = 0; kx < d.k; ++kx) {
                    const double wv = w[((std::size_t(oc) * d.cin + ic) * d.k + ky) * d.k + kx];
                    const int ox_lo = lo_index(kx, d.pad, d.stride);
                    const int ox_hi = hi_index(kx, d.pad, d.stride, d.win, d.wout);
                    for (int oy = oy_lo; oy < oy_hi; ++oy) {
                        const double* inrow = inp + std::size_t(oy * d.stride + ky - d.pad) * d.win;
                        double* outrow = outp + std::size_t(oy) * d.wout;
                        const int base = kx - d.pad;
                        for (int ox = ox_lo; ox < ox_hi; ++ox)
                            outrow[ox] += wv * inrow[ox * d.stride + base];
                    }
                }
            }
        }
    }
}

void conv2d_backward_input(const double* dout, const double* w, double* din, const ConvDims& d) {
    const std::size_t out_plane = std::size_t(d.hout) * d.wout;
    const std::size_t in_plane = std::size_t(d.hin) * d.win;
#pragma omp parallel for schedule(static)
    for (int ic = 0; ic < d.cin; ++ic) {
        double* dinp = din + ic * in_plane;
        std::fill(dinp, dinp + in_plane, 0.0);
        for (int oc = 0; oc < d.cout; ++oc) {
            const double* doutp = dout + oc * out_plane;
            for (int ky = 0; ky < d.k; ++ky) {
                const int oy_lo = lo_index(ky, d.pad, d.stride);
                const int oy_hi = hi_index(ky, d.pad, d.stride, d.hin, d.hout);
                for (int kx = 0; kx < d.k; ++kx) {
                    const double wv = w[((std::size_t(oc) * d.cin + ic) * d.k + ky) * d.k + kx];
                    const int ox_lo = lo_index(kx, d.pad, d.stride);
                    const int ox_hi = hi_index(kx, d.pad, d.stride, d.win, d.wout);
                    for (int oy = oy_lo; oy < oy_hi; ++oy) {
                        double* dinrow = dinp + std::size_t(oy * d.stride + ky - d.pad) * d.win;
                        const double* doutrow = doutp + std::size_t(oy) * d.wout;
                        const int base = kx - d.pad;
                        for (int ox = ox_lo; ox < ox_hi; ++ox)
                            dinrow[ox * d.stride + base] += wv * doutrow[ox];
                    }
                }
            }
        }
    }
}

void conv2d_backward_weights(const double* in, const double* dout, double* dw, double* dbias,
                             const ConvDims& d) {
    const std::size_t out_plane = std::size_t(d.hout) * d.wout;
    const std::size_t in_plane = std::size_t(d.hin) * d.win;
#pragma omp parallel for collapse(2) schedule(static)
    for (int oc = 0; oc < d.cout; ++oc) {
        for (int ic = 0; ic < d.cin; ++ic) {
            const double* doutp = dout + oc * out_plane;
            const double* inp = in + ic * in_plane;
            for (int ky = 0; ky < d.k; ++ky) {
                const int oy_lo = lo_index(ky, d.pad, d.stride);
                const int oy_hi = hi_index(ky, d.pad, d.stride, d.hin, d.hout);
                for (int kx = 0; kx < d.k; ++kx) {
                    const int ox_lo = lo_index(kx, d.pad, d.stride);
                    const int ox_hi = hi_index(kx, d.pad, d.stride, d.win, d.wout);
                    const int base = kx - d.pad;
                    double acc = 0.0;
                    for (int oy = oy_lo; oy < oy_hi; ++oy) {
                        const double* inrow = inp + std::size_t(oy * d.stride + ky - d.pad) * d.win;
                        const double* doutrow = doutp + std::size_t(oy) * d.wout;
                        for (int ox = ox_lo; ox < ox_hi; ++ox)
                            acc += doutrow[ox] * inrow[ox * d.stride + base];
                    }
                    dw[((std::size_t(oc) * d.cin + ic) * d.k + ky) * d.k + kx] += acc;
                }
            }
        }
    }
    if (dbias) {
#pragma omp parallel for schedule(static)
        for (int oc = 0; oc < d.cout; ++oc) {
            const double* doutp = dout + oc * out_plane;
            double acc = 0.0;
            for (std::size_t i = 0; i < out_plane; ++i) acc += doutp[i];
            dbias[oc] += acc;
        }
    }
}

}  // namespace growthcast::kernels
