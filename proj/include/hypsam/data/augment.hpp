#pragma once

#include <cstdint>

#include "hypsam/data/dataset.hpp"

namespace hypsam::data {

struct AugmentParams {
    double flip_p = 0.5;
    double max_rotate_deg = 10.0;
    double crop_lo = 0.8;  // crop ratio drawn uniformly from [crop_lo, 1]
};

// One jointly sampled geometric transform (flip / rotate / crop) applied to
// rgb, thermal and gt alike. Deterministic for a fixed seed; identity
// parameters (flip_p=0, max_rotate_deg=0, crop_lo=1) are a pixelwise no-op.
RgbtSample augment(const RgbtSample& sample, uint64_t rng_seed, const AugmentParams& params);

inline RgbtSample augment(const RgbtSample& sample, uint64_t rng_seed, double flip_p,
                          double max_rotate_deg, double crop_ratio) {
    return augment(sample, rng_seed, AugmentParams{flip_p, max_rotate_deg, crop_ratio});
}

}  // namespace hypsam::data
