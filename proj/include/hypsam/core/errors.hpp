#pragma once

#include <stdexcept>
#include <string>

namespace hypsam {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define HYPSAM_DEFINE_ERROR(Name)                                        \
    struct Name : Error {                                                \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

HYPSAM_DEFINE_ERROR(MissingFile);
HYPSAM_DEFINE_ERROR(ShapeMismatch);
HYPSAM_DEFINE_ERROR(CorruptImage);
HYPSAM_DEFINE_ERROR(BackboneWeightsMissing);
HYPSAM_DEFINE_ERROR(ScorerUnavailable);
HYPSAM_DEFINE_ERROR(EmptyPrompt);
HYPSAM_DEFINE_ERROR(BackendUnavailable);
HYPSAM_DEFINE_ERROR(PromptRejected);
HYPSAM_DEFINE_ERROR(UnknownStrategy);
HYPSAM_DEFINE_ERROR(ConfigInvalid);
HYPSAM_DEFINE_ERROR(DatasetMissing);
HYPSAM_DEFINE_ERROR(ResourceError);
HYPSAM_DEFINE_ERROR(CheckpointIncompatible);
HYPSAM_DEFINE_ERROR(NameMismatch);
HYPSAM_DEFINE_ERROR(MalformedReport);
HYPSAM_DEFINE_ERROR(EmptyDataset);

#undef HYPSAM_DEFINE_ERROR

}  // namespace hypsam
