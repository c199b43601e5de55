#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

// Bilinear resize on NCHW planes, half-pixel centers (align_corners=false).
namespace hypsam::kern {

struct BilinearTap {
    int i0, i1;
    double f;  // weight of i1
};

inline BilinearTap bilinear_tap(int o, int in_size, int out_size) {
    double scale = static_cast<double>(in_size) / out_size;
    double src = (o + 0.5) * scale - 0.5;
    if (src < 0) src = 0;
    double max_src = static_cast<double>(in_size - 1);
    if (src > max_src) src = max_src;
    int i0 = static_cast<int>(std::floor(src));
    int i1 = std::min(i0 + 1, in_size - 1);
    return {i0, i1, src - i0};
}

template <class T>
void resize_bilinear_fwd(const T* x, T* y, int planes, int H, int W, int Ho, int Wo) {
    if (H == Ho && W == Wo) {
#pragma omp parallel for schedule(static)
        for (int p = 0; p < planes; ++p) {
            const T* xp = x + static_cast<int64_t>(p) * H * W;
            T* yp = y + static_cast<int64_t>(p) * H * W;
            std::copy(xp, xp + static_cast<int64_t>(H) * W, yp);
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (int p = 0; p < planes; ++p) {
        const T* xp = x + static_cast<int64_t>(p) * H * W;
        T* yp = y + static_cast<int64_t>(p) * Ho * Wo;
        for (int oh = 0; oh < Ho; ++oh) {
            BilinearTap th = bilinear_tap(oh, H, Ho);
            for (int ow = 0; ow < Wo; ++ow) {
                BilinearTap tw = bilinear_tap(ow, W, Wo);
                double v00 = xp[static_cast<int64_t>(th.i0) * W + tw.i0];
                double v01 = xp[static_cast<int64_t>(th.i0) * W + tw.i1];
                double v10 = xp[static_cast<int64_t>(th.i1) * W + tw.i0];
                double v11 = xp[static_cast<int64_t>(th.i1) * W + tw.i1];
                double top = v00 + (v01 - v00) * tw.f;
                double bot = v10 + (v11 - v10) * tw.f;
                yp[static_cast<int64_t>(oh) * Wo + ow] = static_cast<T>(top + (bot - top) * th.f);
            }
        }
    }
}

// Scatter transpose of the forward taps; parallel across planes only so the
// per-plane accumulation order is fixed.
template <class T>
void resize_bilinear_bwd(const T* dy, T* dx, int planes, int H, int W, int Ho, int Wo) {
    if (H == Ho && W == Wo) {
#pragma omp parallel for schedule(static)
        for (int p = 0; p < planes; ++p) {
            const T* gp = dy + static_cast<int64_t>(p) * H * W;
            T* dp = dx + static_cast<int64_t>(p) * H * W;
            for (int64_t i = 0; i < static_cast<int64_t>(H) * W; ++i) dp[i] += gp[i];
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (int p = 0; p < planes; ++p) {
        const T* gp = dy + static_cast<int64_t>(p) * Ho * Wo;
        T* dp = dx + static_cast<int64_t>(p) * H * W;
        for (int oh = 0; oh < Ho; ++oh) {
            BilinearTap th = bilinear_tap(oh, H, Ho);
            for (int ow = 0; ow < Wo; ++ow) {
                BilinearTap tw = bilinear_tap(ow, W, Wo);
                double g = gp[static_cast<int64_t>(oh) * Wo + ow];
                dp[static_cast<int64_t>(th.i0) * W + tw.i0] +=
                    static_cast<T>(g * (1 - th.f) * (1 - tw.f));
                dp[static_cast<int64_t>(th.i0) * W + tw.i1] +=
                    static_cast<T>(g * (1 - th.f) * tw.f);
                dp[static_cast<int64_t>(th.i1) * W + tw.i0] +=
                    static_cast<T>(g * th.f * (1 - tw.f));
                dp[static_cast<int64_t>(th.i1) * W + tw.i1] += static_cast<T>(g * th.f * tw.f);
            }
        }
    }
}

namespace ref {

template <class T>
void resize_bilinear_fwd(const T* x, T* y, int planes, int H, int W, int Ho, int Wo) {
    for (int p = 0; p < planes; ++p) {
        const T* xp = x + static_cast<int64_t>(p) * H * W;
        T* yp = y + static_cast<int64_t>(p) * Ho * Wo;
        for (int oh = 0; oh < Ho; ++oh)
            for (int ow = 0; ow < Wo; ++ow) {
                BilinearTap th = bilinear_tap(oh, H, Ho);
                BilinearTap tw = bilinear_tap(ow, W, Wo);
                double top = xp[static_cast<int64_t>(th.i0) * W + tw.i0] * (1 - tw.f) +
                             xp[static_cast<int64_t>(th.i0) * W + tw.i1] * tw.f;
                double bot = xp[static_cast<int64_t>(th.i1) * W + tw.i0] * (1 - tw.f) +
                             xp[static_cast<int64_t>(th.i1) * W + tw.i1] * tw.f;
                yp[static_cast<int64_t>(oh) * Wo + ow] =
                    static_cast<T>(top * (1 - th.f) + bot * th.f);
            }
    }
}

}  // namespace ref

}  // namespace hypsam::kern
