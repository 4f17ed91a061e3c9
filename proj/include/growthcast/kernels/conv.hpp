#pragma once

namespace growthcast::kernels {

// Geometry of one 2-D convolution. Layouts: input [cin, hin, win], weights
// [cout, cin, k, k], output [cout, hout, wout], all row-major doubles.
struct ConvDims {
    int cin, hin, win;
    int cout, k, stride, pad;
    int hout, wout;
};

ConvDims conv_dims(int cin, int hin, int win, int cout, int k, int stride, int pad);

// out[oc,oy,ox] = bias[oc] + sum_{ic,ky,kx} w[oc,ic,ky,kx] * in[ic, oy*s+ky-p, ox*s+kx-p].
// bias may be null. Parallel over output elements; every element has exactly
// one writer, so results are bitwise independent of the thread count.
void conv2d_forward(const double* in, const double* w, const double* bias, double* out,
                    const ConvDims& d);

// din (gather form, parallel over input elements).
void conv2d_backward_input(const double* dout, const double* w, double* din, const ConvDims& d);

// Accumulates into dw [cout, cin, k, k] and optionally dbias [cout]. Parallel
// over weight elements; the reduction over positions stays inside one thread.
void conv2d_backward_weights(const double* in, const double* dout, double* dw, double* dbias,
                             const ConvDims& d);

// Plain single-threaded reference implementations, kept for kernel tests and
// the benchmark target.
namespace serial {
void conv2d_forward(const double* in, const double* w, const double* bias, double* out,
                    const ConvDims& d);
void conv2d_backward_input(const double* dout, const double* w, double* din, const ConvDims& d);
void conv2d_backward_weights(const double* in, const double* dout, double* dw, double* dbias,
                             const ConvDims& d);
}  // namespace serial

}  // namespace growthcast::kernels
