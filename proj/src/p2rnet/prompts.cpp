#include "hypsam/p2rnet/prompts.hpp"

#include <algorithm>
#include <deque>

#include "hypsam/core/errors.hpp"

namespace hypsam::p2r {

BinMask binarize(const SalMap& coarse, double threshold) {
    BinMask out(coarse.h, coarse.w);
    for (size_t i = 0; i < coarse.data.size(); ++i)
        out.data[i] = coarse.data[i] > threshold ? 1 : 0;
    return out;
}

namespace {

// 8-connected components; fills labels (-1 for background) and one raw box
// per component in discovery order
std::vector<Box> label_components(const BinMask& mask, std::vector<int32_t>& label) {
    label.assign(mask.data.size(), -1);
    std::vector<Box> boxes;
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < mask.h; ++y)
        for (int x = 0; x < mask.w; ++x) {
            size_t i = static_cast<size_t>(y) * mask.w + x;
            if (!mask.data[i] || label[i] >= 0) continue;
            int32_t id = static_cast<int32_t>(boxes.size());
            Box b{x, y, x, y, 0};
            label[i] = id;
            queue.emplace_back(y, x);
            while (!queue.empty()) {
                auto [cy, cx] = queue.front();
                queue.pop_front();
                ++b.area;
                b.x0 = std::min(b.x0, cx);
                b.x1 = std::max(b.x1, cx);
                b.y0 = std::min(b.y0, cy);
                b.y1 = std::max(b.y1, cy);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int ny = cy + dy, nx = cx + dx;
                        if (ny < 0 || ny >= mask.h || nx < 0 || nx >= mask.w) continue;
                        size_t ni = static_cast<size_t>(ny) * mask.w + nx;
                        if (mask.data[ni] && label[ni] < 0) {
                            label[ni] = id;
                            queue.emplace_back(ny, nx);
                        }
                    }
            }
            boxes.push_back(b);
        }
    return boxes;
}

}  // namespace

std::vector<Box> extract_boxes(const BinMask& mask, int64_t min_area) {
    std::vector<int32_t> label;
    std::vector<Box> boxes = label_components(mask, label);
    boxes.erase(std::remove_if(boxes.begin(), boxes.end(),
                               [min_area](const Box& b) { return b.area < min_area; }),
                boxes.end());
    std::stable_sort(boxes.begin(), boxes.end(),
                     [](const Box& a, const Box& b) { return a.area > b.area; });
    return boxes;
}

HybridPrompt build_prompts(const SalMap& coarse, const Image8& image, double threshold,
                           int64_t min_area) {
    if (coarse.h != image.h || coarse.w != image.w)
        throw ShapeMismatch("build_prompts: coarse map and image sizes differ");
    HybridPrompt p;
    p.mask = binarize(coarse, threshold);

    std::vector<int32_t> label;
    std::vector<Box> all = label_components(p.mask, label);
    std::vector<uint8_t> keep(all.size(), 0);
    p.boxes.clear();
    for (size_t i = 0; i < all.size(); ++i)
        if (all[i].area >= min_area) {
            keep[i] = 1;
            p.boxes.push_back(all[i]);
        }
    if (p.boxes.empty()) throw EmptyPrompt("no component survives the area filter");
    std::stable_sort(p.boxes.begin(), p.boxes.end(),
                     [](const Box& a, const Box& b) { return a.area > b.area; });

    // drop filtered noise components from the dense prompt as well
    for (size_t i = 0; i < p.mask.data.size(); ++i)
        if (p.mask.data[i] && !keep[static_cast<size_t>(label[i])]) p.mask.data[i] = 0;
    p.image = image;
    return p;
}

}  // namespace hypsam::p2r
