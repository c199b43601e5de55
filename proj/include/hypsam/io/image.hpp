#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hypsam {

// 8-bit interleaved RGB image
struct Image8 {
    int h = 0, w = 0, c = 0;
    std::vector<uint8_t> data;

    Image8() = default;
    Image8(int h_, int w_, int c_, uint8_t fill = 0)
        : h(h_), w(w_), c(c_), data(static_cast<size_t>(h_) * w_ * c_, fill) {}

    uint8_t& at(int y, int x, int ch) {
        return data[(static_cast<size_t>(y) * w + x) * c + ch];
    }
    uint8_t at(int y, int x, int ch) const {
        return data[(static_cast<size_t>(y) * w + x) * c + ch];
    }
    bool empty() const { return data.empty(); }
};

// binary map, values 0/1
struct BinMask {
    int h = 0, w = 0;
    std::vector<uint8_t> data;

    BinMask() = default;
    BinMask(int h_, int w_, uint8_t fill = 0)
        : h(h_), w(w_), data(static_cast<size_t>(h_) * w_, fill) {}

    uint8_t& at(int y, int x) { return data[static_cast<size_t>(y) * w + x]; }
    uint8_t at(int y, int x) const { return data[static_cast<size_t>(y) * w + x]; }
    int64_t count() const {
        int64_t n = 0;
        for (uint8_t v : data) n += v;
        return n;
    }
    bool empty() const { return data.empty(); }
};

// real-valued saliency map in [0,1]
struct SalMap {
    int h = 0, w = 0;
    std::vector<double> data;

    SalMap() = default;
    SalMap(int h_, int w_, double fill = 0.0)
        : h(h_), w(w_), data(static_cast<size_t>(h_) * w_, fill) {}

    double& at(int y, int x) { return data[static_cast<size_t>(y) * w + x]; }
    double at(int y, int x) const { return data[static_cast<size_t>(y) * w + x]; }
};

inline SalMap mask_to_map(const BinMask& m) {
    SalMap s(m.h, m.w);
    for (size_t i = 0; i < m.data.size(); ++i) s.data[i] = m.data[i] ? 1.0 : 0.0;
    return s;
}

namespace io {

bool file_exists(const std::string& path);

// Decodes as 3-channel RGB (single-channel sources are replicated).
// Throws MissingFile / CorruptImage.
Image8 imread_rgb(const std::string& path);

// Decodes as 8-bit grayscale scaled to [0,1].
SalMap imread_gray01(const std::string& path);

// Grayscale thresholded at > 127 into {0,1}.
BinMask imread_mask(const std::string& path);

void imwrite_gray01(const std::string& path, const SalMap& map);
void imwrite_rgb(const std::string& path, const Image8& img);

}  // namespace io
}  // namespace hypsam
