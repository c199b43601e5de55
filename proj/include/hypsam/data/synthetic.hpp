#pragma once

#include <cstdint>
#include <string>

#include "hypsam/data/dataset.hpp"

// Synthetic square/disk RGB-T pairs for desk-scale training runs, demos and
// tests. Objects are visible in both modalities with the thermal channel
// carrying the stronger contrast.
namespace hypsam::data {

struct SynthOptions {
    int count = 64;
    int size = 64;
    uint64_t seed = 1;
    double noise = 6.0;
};

RgbtSample make_synthetic_sample(uint64_t seed, int size, double noise = 6.0);

// writes <root>/<split>/{RGB,T,GT}/ PNGs and appends <root>/attributes.csv
void write_synthetic_dataset(const std::string& root, const std::string& split,
                             const SynthOptions& opts);

}  // namespace hypsam::data
