#pragma once

#include <string>

#include "hypsam/data/dataset.hpp"
#include "hypsam/p2rnet/quality.hpp"
#include "hypsam/p2rnet/segmenter.hpp"

namespace hypsam::p2r {

enum class RefineKind { max, add, weighted_add, morphological };

struct RefineStrategy {
    RefineKind kind = RefineKind::max;
    double weight = 0.5;  // weighted_add only
    int se_radius = 3;    // morphological only
};

RefineStrategy parse_strategy(const std::string& name);  // throws UnknownStrategy
std::string to_string(const RefineStrategy& s);

// max:          S_r = max(S_t, S_g)
// add:          S_r = clip(S_t + S_g, 0, 1)
// weighted_add: S_r = clip(w*S_t + (1-w)*S_g, 0, 1)
// morphological: max fusion followed by grayscale closing with a disk SE
SalMap refine(const SalMap& st, const SalMap& sg, const RefineStrategy& strategy);

struct P2rConfig {
    SelectorConfig selector;
    double bin_thresh = 0.5;
    double min_area_frac = 0.001;  // of image pixels
    RefineStrategy strategy;
    bool refine_raw_coarse = false;  // Eq-style default refines the binarized map
    std::string backend = "hist";
    std::string scorer = "stats";
    bool emit_point_prompts = false;  // centroid emission for the ablation harness
};

struct PipelineLog {
    std::string name;
    std::string modality;
    double s_alpha = 0, s_beta = 0;
    int boxes = 0;
    std::string strategy;
    bool fallback = false;
    std::string note;
};

// select_modality -> build_prompts -> segment -> refine. Any EmptyPrompt /
// BackendUnavailable / ScorerUnavailable degrades to the coarse map
// unchanged, with the reason logged.
SalMap run_pipeline(const data::RgbtSample& sample, const SalMap& coarse, const P2rConfig& cfg,
                    QualityScorer& scorer, SegmenterBackend& backend,
                    PipelineLog* log = nullptr);

// centroids of the prompt components, used only by the ablation harness
std::vector<std::pair<int, int>> point_prompts(const HybridPrompt& prompt);

}  // namespace hypsam::p2r
