#pragma once

#include <cstdint>
#include <string>

#include "hypsam/nn/modules.hpp"

namespace hypsam::nn {

// Manifest carried by every weight archive; checked against the run config
// before weights are restored.
struct CheckpointMeta {
    std::string backbone;
    int channels = 64;
    int kernels = 4;
    int ksize = 3;
    int resolution = 384;
};

void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const ParamRegistry& reg);

// Restores every tensor in reg; throws CheckpointIncompatible on any missing
// name or shape mismatch, MissingFile if the archive does not exist.
CheckpointMeta load_checkpoint(const std::string& path, ParamRegistry& reg);

CheckpointMeta peek_checkpoint(const std::string& path);

}  // namespace hypsam::nn
