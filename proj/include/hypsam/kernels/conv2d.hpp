#pragma once

#include <cstdint>

#include "hypsam/core/tensor.hpp"

// Direct 2-D convolution kernels (cross-correlation, NCHW). The omp versions
// parallelize over independent output slices so results are identical for any
// thread count; kern::ref holds the naive serial implementations used as test
// oracles and as the benchmark baseline.
namespace hypsam::kern {

struct ConvDims {
    int B, Ci, H, W;   // input
    int Co, kh, kw;    // kernel
    int stride, pad;
    int Ho, Wo;        // output

    static ConvDims make(int B, int Ci, int H, int W, int Co, int kh, int kw, int stride,
                         int pad) {
        ConvDims d{B, Ci, H, W, Co, kh, kw, stride, pad, 0, 0};
        d.Ho = (H + 2 * pad - kh) / stride + 1;
        d.Wo = (W + 2 * pad - kw) / stride + 1;
        return d;
    }
};

template <class T>
void conv2d_fwd(const T* x, const T* w, const T* bias, T* y, const ConvDims& d) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < d.B; ++b) {
        for (int co = 0; co < d.Co; ++co) {
            const T* wc = w + static_cast<int64_t>(co) * d.Ci * d.kh * d.kw;
            T* yc = y + (static_cast<int64_t>(b) * d.Co + co) * d.Ho * d.Wo;
            for (int ho = 0; ho < d.Ho; ++ho) {
                for (int wo = 0; wo < d.Wo; ++wo) {
                    T acc = bias ? bias[co] : T(0);
                    int ih0 = ho * d.stride - d.pad;
                    int iw0 = wo * d.stride - d.pad;
                    for (int ci = 0; ci < d.Ci; ++ci) {
                        const T* xc = x + (static_cast<int64_t>(b) * d.Ci + ci) * d.H * d.W;
                        const T* wk = wc + static_cast<int64_t>(ci) * d.kh * d.kw;
                        for (int r = 0; r < d.kh; ++r) {
                            int ih = ih0 + r;
                            if (ih < 0 || ih >= d.H) continue;
                            for (int c = 0; c < d.kw; ++c) {
                                int iw = iw0 + c;
                                if (iw < 0 || iw >= d.W) continue;
                                acc += xc[static_cast<int64_t>(ih) * d.W + iw] * wk[r * d.kw + c];
                            }
                        }
                    }
                    yc[static_cast<int64_t>(ho) * d.Wo + wo] = acc;
                }
            }
        }
    }
}

// dx[b,ci,ih,iw] = sum over (co,r,c) with ho*stride-pad+r == ih etc.
template <class T>
void conv2d_dgrad(const T* dy, const T* w, T* dx, const ConvDims& d) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < d.B; ++b) {
        for (int ci = 0; ci < d.Ci; ++ci) {
            T* dxc = dx + (static_cast<int64_t>(b) * d.Ci + ci) * d.H * d.W;
            for (int ih = 0; ih < d.H; ++ih) {
                for (int iw = 0; iw < d.W; ++iw) {
                    T acc = T(0);
                    for (int r = 0; r < d.kh; ++r) {
                        int hs = ih + d.pad - r;
                        if (hs % d.stride != 0) continue;
                        int ho = hs / d.stride;
                        if (ho < 0 || ho >= d.Ho) continue;
                        for (int c = 0; c < d.kw; ++c) {
                            int ws = iw + d.pad - c;
                            if (ws % d.stride != 0) continue;
                            int wo = ws / d.stride;
                            if (wo < 0 || wo >= d.Wo) continue;
                            for (int co = 0; co < d.Co; ++co) {
                                acc += dy[((static_cast<int64_t>(b) * d.Co + co) * d.Ho + ho) *
                                              d.Wo +
                                          wo] *
                                       w[((static_cast<int64_t>(co) * d.Ci + ci) * d.kh + r) *
                                             d.kw +
                                         c];
                            }
                        }
                    }
                    dxc[static_cast<int64_t>(ih) * d.W + iw] += acc;
                }
            }
        }
    }
}

template <class T>
void conv2d_wgrad(const T* x, const T* dy, T* dw, T* dbias, const ConvDims& d) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int co = 0; co < d.Co; ++co) {
        for (int ci = 0; ci < d.Ci; ++ci) {
            for (int r = 0; r < d.kh; ++r) {
                for (int c = 0; c < d.kw; ++c) {
                    T acc = T(0);
                    for (int b = 0; b < d.B; ++b) {
                        const T* xc = x + (static_cast<int64_t>(b) * d.Ci + ci) * d.H * d.W;
                        const T* dyc =
                            dy + (static_cast<int64_t>(b) * d.Co + co) * d.Ho * d.Wo;
                        for (int ho = 0; ho < d.Ho; ++ho) {
                            int ih = ho * d.stride - d.pad + r;
                            if (ih < 0 || ih >= d.H) continue;
                            for (int wo = 0; wo < d.Wo; ++wo) {
                                int iw = wo * d.stride - d.pad + c;
                                if (iw < 0 || iw >= d.W) continue;
                                acc += xc[static_cast<int64_t>(ih) * d.W + iw] *
                                       dyc[static_cast<int64_t>(ho) * d.Wo + wo];
                            }
                        }
                    }
                    dw[((static_cast<int64_t>(co) * d.Ci + ci) * d.kh + r) * d.kw + c] += acc;
                }
            }
        }
    }
    if (dbias) {
#pragma omp parallel for schedule(static)
        for (int co = 0; co < d.Co; ++co) {
            T acc = T(0);
            for (int b = 0; b < d.B; ++b) {
                const T* dyc = dy + (static_cast<int64_t>(b) * d.Co + co) * d.Ho * d.Wo;
                for (int64_t i = 0; i < static_cast<int64_t>(d.Ho) * d.Wo; ++i) acc += dyc[i];
            }
            dbias[co] += acc;
        }
    }
}

// Per-sample weight variants: w[b,co,ci,kh,kw]. Used by the dynamic
// convolution where every batch item carries its own assembled kernel.
template <class T>
void conv2d_fwd_ps(const T* x, const T* w, T* y, const ConvDims& d) {
    int64_t wstride = static_cast<int64_t>(d.Co) * d.Ci * d.kh * d.kw;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < d.B; ++b) {
        ConvDims d1 = d;
        d1.B = 1;
        conv2d_fwd(x + static_cast<int64_t>(b) * d.Ci * d.H * d.W, w + b * wstride,
                   static_cast<const T*>(nullptr),
                   y + static_cast<int64_t>(b) * d.Co * d.Ho * d.Wo, d1);
    }
}

template <class T>
void conv2d_dgrad_ps(const T* dy, const T* w, T* dx, const ConvDims& d) {
    int64_t wstride = static_cast<int64_t>(d.Co) * d.Ci * d.kh * d.kw;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < d.B; ++b) {
        ConvDims d1 = d;
        d1.B = 1;
        conv2d_dgrad(dy + static_cast<int64_t>(b) * d.Co * d.Ho * d.Wo, w + b * wstride,
                     dx + static_cast<int64_t>(b) * d.Ci * d.H * d.W, d1);
    }
}

template <class T>
void conv2d_wgrad_ps(const T* x, const T* dy, T* dw, const ConvDims& d) {
    int64_t wstride = static_cast<int64_t>(d.Co) * d.Ci * d.kh * d.kw;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < d.B; ++b) {
        ConvDims d1 = d;
        d1.B = 1;
        conv2d_wgrad(x + static_cast<int64_t>(b) * d.Ci * d.H * d.W,
                     dy + static_cast<int64_t>(b) * d.Co * d.Ho * d.Wo, dw + b * wstride,
                     static_cast<T*>(nullptr), d1);
    }
}

namespace ref {

// Naive serial convolution, kept as the correctness oracle.
template <class T>
void conv2d_fwd(const T* x, const T* w, const T* bias, T* y, const ConvDims& d) {
    for (int b = 0; b < d.B; ++b)
        for (int co = 0; co < d.Co; ++co)
            for (int ho = 0; ho < d.Ho; ++ho)
                for (int wo = 0; wo < d.Wo; ++wo) {
                    T acc = bias ? bias[co] : T(0);
                    for (int ci = 0; ci < d.Ci; ++ci)
                        for (int r = 0; r < d.kh; ++r)
                            for (int c = 0; c < d.kw; ++c) {
                                int ih = ho * d.stride - d.pad + r;
                                int iw = wo * d.stride - d.pad + c;
                                if (ih < 0 || ih >= d.H || iw < 0 || iw >= d.W) continue;
                                acc += x[((static_cast<int64_t>(b) * d.Ci + ci) * d.H + ih) *
                                             d.W +
                                         iw] *
                                       w[((static_cast<int64_t>(co) * d.Ci + ci) * d.kh + r) *
                                             d.kw +
                                         c];
                            }
                    y[((static_cast<int64_t>(b) * d.Co + co) * d.Ho + ho) * d.Wo + wo] = acc;
                }
}

}  // namespace ref

}  // namespace hypsam::kern
