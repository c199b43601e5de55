#include "hypsam/data/prepare.hpp"

#include "hypsam/kernels/resize.hpp"

namespace hypsam::data {

Tensor<float> image_to_tensor(const Image8& img, int size, const std::array<double, 3>& mean,
                              const std::array<double, 3>& stddev) {
    // planar [0,1] planes first, then one bilinear pass per channel
    Tensor<double> planes(Shape{3, img.h, img.w});
    for (int ch = 0; ch < 3; ++ch)
        for (int y = 0; y < img.h; ++y)
            for (int x = 0; x < img.w; ++x)
                planes[(static_cast<int64_t>(ch) * img.h + y) * img.w + x] =
                    img.at(y, x, ch) / 255.0;
    Tensor<double> resized(Shape{3, size, size});
    kern::resize_bilinear_fwd(planes.ptr(), resized.ptr(), 3, img.h, img.w, size, size);
    Tensor<float> out(Shape{3, size, size});
    for (int ch = 0; ch < 3; ++ch) {
        int64_t off = static_cast<int64_t>(ch) * size * size;
        for (int64_t i = 0; i < static_cast<int64_t>(size) * size; ++i)
            out[off + i] = static_cast<float>((resized[off + i] - mean[ch]) / stddev[ch]);
    }
    return out;
}

TensorPair prepare(const RgbtSample& sample, int size, const std::array<double, 3>& mean,
                   const std::array<double, 3>& stddev) {
    TensorPair tp;
    tp.size = size;
    tp.rgb = image_to_tensor(sample.rgb, size, mean, stddev);
    tp.thermal = image_to_tensor(sample.thermal, size, mean, stddev);
    return tp;
}

BinMask resize_mask_nearest(const BinMask& m, int h, int w) {
    BinMask out(h, w);
    for (int y = 0; y < h; ++y) {
        int sy = std::min(m.h - 1, static_cast<int>((y + 0.5) * m.h / h));
        for (int x = 0; x < w; ++x) {
            int sx = std::min(m.w - 1, static_cast<int>((x + 0.5) * m.w / w));
            out.at(y, x) = m.at(sy, sx);
        }
    }
    return out;
}

SalMap resize_map_bilinear(const SalMap& m, int h, int w) {
    if (m.h == h && m.w == w) return m;
    SalMap out(h, w);
    kern::resize_bilinear_fwd(m.data.data(), out.data.data(), 1, m.h, m.w, h, w);
    return out;
}

}  // namespace hypsam::data
