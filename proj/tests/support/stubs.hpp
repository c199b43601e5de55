#pragma once

// Test doubles for the p2rnet interfaces.

#include <map>

#include "hypsam/p2rnet/quality.hpp"
#include "hypsam/p2rnet/segmenter.hpp"

namespace testsupport {

// scorer with injected embeddings; image embedding is fixed, text embeddings
// come from a lookup
class StubScorer : public hypsam::p2r::QualityScorer {
public:
    std::vector<double> image_embedding{1, 0, 0, 0};
    std::map<std::string, std::vector<double>> text;

    StubScorer() {
        text["bright"] = {1, 0, 0, 0};
        text["dark"] = {0, 1, 0, 0};
        text["colorful"] = {0, 0, 1, 0};
        text["dull"] = {0, 0, 0, 1};
    }

    std::vector<double> embed_image(const hypsam::Image8&) override { return image_embedding; }
    std::vector<double> embed_text(const std::string& t) override { return text.at(t); }
};

// scorer whose two pair scores are dialed in directly: cos(f,t) values are
// chosen so the Eq-style softmax lands exactly on the requested s values
class FixedScoreScorer : public hypsam::p2r::QualityScorer {
public:
    double s_alpha = 0.5, s_beta = 0.5;

    std::vector<double> embed_image(const hypsam::Image8&) override { return {1, 0}; }
    std::vector<double> embed_text(const std::string& t) override {
        // cosine of {1,0} with {cos a, sin a} = cos a; pick logits whose
        // softmax equals the requested score: s = 1/(1+e^{-(l1-l2)})
        auto logit_pair = [](double s) {
            double d = std::log(s / (1.0 - s));  // l1 - l2
            // cosines must stay in [-1,1]; split the difference
            return std::pair<double, double>{d / 2.0, -d / 2.0};
        };
        auto vec_for = [](double c) {
            return std::vector<double>{c, std::sqrt(std::max(0.0, 1.0 - c * c))};
        };
        if (t == "bright") return vec_for(logit_pair(s_alpha).first);
        if (t == "dark") return vec_for(logit_pair(s_alpha).second);
        if (t == "colorful") return vec_for(logit_pair(s_beta).first);
        if (t == "dull") return vec_for(logit_pair(s_beta).second);
        throw hypsam::ScorerUnavailable("no stub text: " + t);
    }
};

// backend that always reports itself unavailable at load time
class BrokenSegmenter : public hypsam::p2r::SegmenterBackend {
public:
    void load(const std::string&) override {
        throw hypsam::BackendUnavailable("broken backend");
    }
    DecodeResult decode(const Embedding&, const std::optional<hypsam::p2r::Box>&,
                        const hypsam::SalMap*) override {
        throw hypsam::BackendUnavailable("broken backend");
    }
    std::string weights_checksum() const override { return "broken"; }
    std::string name() const override { return "broken"; }
};

// backend that rejects dense prompts but accepts boxes
class BoxOnlySegmenter : public hypsam::p2r::SegmenterBackend {
public:
    int dense_rejections = 0;
    void load(const std::string&) override {}
    DecodeResult decode(const Embedding& emb, const std::optional<hypsam::p2r::Box>& box,
                        const hypsam::SalMap* dense) override {
        if (dense) {
            ++dense_rejections;
            throw hypsam::PromptRejected("box-only backend");
        }
        hypsam::p2r::StubSegmenter stub;
        return stub.decode(emb, box, nullptr);
    }
    std::string weights_checksum() const override { return "boxonly-0"; }
    std::string name() const override { return "boxonly"; }
};

}  // namespace testsupport
