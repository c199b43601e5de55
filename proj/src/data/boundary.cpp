#include "hypsam/data/boundary.hpp"

#include <cmath>
#include <deque>

namespace hypsam::data {

namespace {

// Sobel magnitude of the 0/255 rendering of the binary map.
void sobel_magnitude(const BinMask& m, std::vector<double>& mag) {
    mag.assign(m.data.size(), 0.0);
    auto px = [&](int y, int x) -> double {
        y = std::min(std::max(y, 0), m.h - 1);
        x = std::min(std::max(x, 0), m.w - 1);
        return m.at(y, x) ? 255.0 : 0.0;
    };
#pragma omp parallel for schedule(static)
    for (int y = 0; y < m.h; ++y)
        for (int x = 0; x < m.w; ++x) {
            double gx = px(y - 1, x + 1) + 2 * px(y, x + 1) + px(y + 1, x + 1) -
                        px(y - 1, x - 1) - 2 * px(y, x - 1) - px(y + 1, x - 1);
            double gy = px(y + 1, x - 1) + 2 * px(y + 1, x) + px(y + 1, x + 1) -
                        px(y - 1, x - 1) - 2 * px(y - 1, x) - px(y - 1, x + 1);
            mag[static_cast<size_t>(y) * m.w + x] = std::sqrt(gx * gx + gy * gy);
        }
}

// weak pixels survive if 8-connected to a strong pixel
void hysteresis(const std::vector<double>& mag, int h, int w, double low, double high,
                std::vector<uint8_t>& edge) {
    edge.assign(mag.size(), 0);
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mag[static_cast<size_t>(y) * w + x] > high) {
                edge[static_cast<size_t>(y) * w + x] = 1;
                queue.emplace_back(y, x);
            }
    while (!queue.empty()) {
        auto [y, x] = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                int ny = y + dy, nx = x + dx;
                if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                size_t i = static_cast<size_t>(ny) * w + nx;
                if (!edge[i] && mag[i] >= low) {
                    edge[i] = 1;
                    queue.emplace_back(ny, nx);
                }
            }
    }
}

}  // namespace

BoundaryLabel decouple_boundary(const BinMask& gt, double low, double high, int dilate_radius) {
    std::vector<double> mag;
    sobel_magnitude(gt, mag);
    std::vector<uint8_t> edge;
    hysteresis(mag, gt.h, gt.w, low, high, edge);

    // restrict edges to the foreground side of the transition
    for (size_t i = 0; i < edge.size(); ++i)
        if (!gt.data[i]) edge[i] = 0;

    BoundaryLabel out;
    out.boundary = BinMask(gt.h, gt.w);
    out.content = BinMask(gt.h, gt.w);
    int r = dilate_radius;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < gt.h; ++y)
        for (int x = 0; x < gt.w; ++x) {
            if (!gt.at(y, x)) continue;
            uint8_t hit = 0;
            for (int dy = -r; dy <= r && !hit; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    int ny = y + dy, nx = x + dx;
                    if (ny < 0 || ny >= gt.h || nx < 0 || nx >= gt.w) continue;
                    if (edge[static_cast<size_t>(ny) * gt.w + nx]) {
                        hit = 1;
                        break;
                    }
                }
            out.boundary.at(y, x) = hit;
            out.content.at(y, x) = hit ? 0 : 1;
        }
    return out;
}

}  // namespace hypsam::data
