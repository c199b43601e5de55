#pragma once

#include <vector>

#include "hypsam/io/image.hpp"

namespace hypsam::p2r {

// S_t = [coarse > T]
BinMask binarize(const SalMap& coarse, double threshold);

struct Box {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive pixel coords, x0<=x1, y0<=y1
    int64_t area = 0;                    // component area, not box area

    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
};

// One tight box per 8-connected component with area >= min_area, ordered by
// descending component area.
std::vector<Box> extract_boxes(const BinMask& mask, int64_t min_area);

struct HybridPrompt {
    BinMask mask;            // binarized S_t
    std::vector<Box> boxes;  // per surviving component
    Image8 image;            // the selected-modality image
};

// binarize + extract_boxes; throws EmptyPrompt when nothing survives min_area
HybridPrompt build_prompts(const SalMap& coarse, const Image8& image, double threshold,
                           int64_t min_area);

}  // namespace hypsam::p2r
