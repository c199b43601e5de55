#pragma once

#include "hypsam/io/image.hpp"

namespace hypsam::data {

struct BoundaryLabel {
    BinMask boundary;
    BinMask content;
};

// Splits a binary label into a boundary band and the remaining content.
// Edge pixels come from hysteresis-thresholded Sobel magnitude of the 0/255
// label restricted to the foreground, then dilated by dilate_radius (still
// clipped to the foreground). boundary and content partition the foreground.
BoundaryLabel decouple_boundary(const BinMask& gt, double low = 100.0, double high = 200.0,
                                int dilate_radius = 2);

}  // namespace hypsam::data
