#pragma once

#include <array>

#include "hypsam/core/tensor.hpp"
#include "hypsam/data/dataset.hpp"

namespace hypsam::data {

struct TensorPair {
    Tensor<float> rgb;      // [3,S,S]
    Tensor<float> thermal;  // [3,S,S]
    int size = 0;
};

// standard pretrained-backbone channel statistics, used for both modalities
inline constexpr std::array<double, 3> kNormMean{0.485, 0.456, 0.406};
inline constexpr std::array<double, 3> kNormStd{0.229, 0.224, 0.225};

// bilinear resize to size x size, scale to [0,1], then (x - mean) / std
TensorPair prepare(const RgbtSample& sample, int size,
                   const std::array<double, 3>& mean = kNormMean,
                   const std::array<double, 3>& stddev = kNormStd);

Tensor<float> image_to_tensor(const Image8& img, int size, const std::array<double, 3>& mean,
                              const std::array<double, 3>& stddev);

BinMask resize_mask_nearest(const BinMask& m, int h, int w);
SalMap resize_map_bilinear(const SalMap& m, int h, int w);

}  // namespace hypsam::data
