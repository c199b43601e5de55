#include "hypsam/data/augment.hpp"

#include <cmath>

#include "hypsam/core/rng.hpp"

namespace hypsam::data {

namespace {

Image8 flip_h(const Image8& img) {
    Image8 out(img.h, img.w, img.c);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int ch = 0; ch < img.c; ++ch) out.at(y, x, ch) = img.at(y, img.w - 1 - x, ch);
    return out;
}

BinMask flip_h(const BinMask& m) {
    BinMask out(m.h, m.w);
    for (int y = 0; y < m.h; ++y)
        for (int x = 0; x < m.w; ++x) out.at(y, x) = m.at(y, m.w - 1 - x);
    return out;
}

// inverse-map rotation about the image center; bilinear for images, nearest
// for masks, zero fill outside
Image8 rotate(const Image8& img, double deg) {
    double rad = deg * M_PI / 180.0;
    double cs = std::cos(rad), sn = std::sin(rad);
    double cy = (img.h - 1) / 2.0, cx = (img.w - 1) / 2.0;
    Image8 out(img.h, img.w, img.c);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            double dy = y - cy, dx = x - cx;
            double sy = cy + (sn * dx + cs * dy);
            double sx = cx + (cs * dx - sn * dy);
            int y0 = static_cast<int>(std::floor(sy)), x0 = static_cast<int>(std::floor(sx));
            double fy = sy - y0, fx = sx - x0;
            for (int ch = 0; ch < img.c; ++ch) {
                auto sample = [&](int yy, int xx) -> double {
                    if (yy < 0 || yy >= img.h || xx < 0 || xx >= img.w) return 0.0;
                    return img.at(yy, xx, ch);
                };
                double v = sample(y0, x0) * (1 - fy) * (1 - fx) +
                           sample(y0, x0 + 1) * (1 - fy) * fx +
                           sample(y0 + 1, x0) * fy * (1 - fx) + sample(y0 + 1, x0 + 1) * fy * fx;
                out.at(y, x, ch) = static_cast<uint8_t>(std::lround(std::min(255.0, std::max(0.0, v))));
            }
        }
    return out;
}

BinMask rotate(const BinMask& m, double deg) {
    double rad = deg * M_PI / 180.0;
    double cs = std::cos(rad), sn = std::sin(rad);
    double cy = (m.h - 1) / 2.0, cx = (m.w - 1) / 2.0;
    BinMask out(m.h, m.w);
    for (int y = 0; y < m.h; ++y)
        for (int x = 0; x < m.w; ++x) {
            double dy = y - cy, dx = x - cx;
            int sy = static_cast<int>(std::lround(cy + (sn * dx + cs * dy)));
            int sx = static_cast<int>(std::lround(cx + (cs * dx - sn * dy)));
            out.at(y, x) = (sy >= 0 && sy < m.h && sx >= 0 && sx < m.w) ? m.at(sy, sx) : 0;
        }
    return out;
}

Image8 crop(const Image8& img, int y0, int x0, int ch_, int cw) {
    Image8 out(ch_, cw, img.c);
    for (int y = 0; y < ch_; ++y)
        for (int x = 0; x < cw; ++x)
            for (int c = 0; c < img.c; ++c) out.at(y, x, c) = img.at(y0 + y, x0 + x, c);
    return out;
}

BinMask crop(const BinMask& m, int y0, int x0, int ch_, int cw) {
    BinMask out(ch_, cw);
    for (int y = 0; y < ch_; ++y)
        for (int x = 0; x < cw; ++x) out.at(y, x) = m.at(y0 + y, x0 + x);
    return out;
}

}  // namespace

RgbtSample augment(const RgbtSample& sample, uint64_t rng_seed, const AugmentParams& p) {
    Rng rng(rng_seed);
    RgbtSample out = sample;

    // draw the whole transform up front so the stream layout is stable
    bool do_flip = rng.uniform() < p.flip_p;
    double angle = p.max_rotate_deg > 0 ? rng.uniform(-p.max_rotate_deg, p.max_rotate_deg) : 0.0;
    double ratio = p.crop_lo < 1.0 ? rng.uniform(p.crop_lo, 1.0) : 1.0;
    int ch = std::max(1, static_cast<int>(std::lround(ratio * sample.rgb.h)));
    int cw = std::max(1, static_cast<int>(std::lround(ratio * sample.rgb.w)));
    int y0 = rng.uniform_int(0, sample.rgb.h - ch);
    int x0 = rng.uniform_int(0, sample.rgb.w - cw);

    if (do_flip) {
        out.rgb = flip_h(out.rgb);
        out.thermal = flip_h(out.thermal);
        if (out.has_gt) out.gt = flip_h(out.gt);
    }
    if (angle != 0.0) {
        out.rgb = rotate(out.rgb, angle);
        out.thermal = rotate(out.thermal, angle);
        if (out.has_gt) out.gt = rotate(out.gt, angle);
    }
    if (ch != sample.rgb.h || cw != sample.rgb.w) {
        out.rgb = crop(out.rgb, y0, x0, ch, cw);
        out.thermal = crop(out.thermal, y0, x0, ch, cw);
        if (out.has_gt) out.gt = crop(out.gt, y0, x0, ch, cw);
    }
    return out;
}

}  // namespace hypsam::data
