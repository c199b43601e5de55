#pragma once

#include <memory>
#include <optional>
#include <string>

#include "hypsam/p2rnet/prompts.hpp"

namespace hypsam::p2r {

// Frozen promptable-segmentation backend. One query = one optional box plus
// an optional dense mask prompt; the returned mask is at image resolution.
// Backends are named plugins; their weights never change across calls
// (weights_checksum is stable by contract).
class SegmenterBackend {
public:
    virtual ~SegmenterBackend() = default;

    struct Embedding {
        Image8 image;
    };
    struct DecodeResult {
        SalMap mask;
        double confidence = 0;
    };

    // throws BackendUnavailable if required weights are absent
    virtual void load(const std::string& weights_path) = 0;
    virtual Embedding embed(const Image8& image) { return Embedding{image}; }
    virtual DecodeResult decode(const Embedding& emb, const std::optional<Box>& box,
                                const SalMap* dense_mask) = 0;
    virtual std::string weights_checksum() const = 0;
    virtual std::string name() const = 0;
};

// One decode per box (dense mask shared), masks unioned by pixelwise max.
// Backends that reject the dense pathway (PromptRejected) are retried with
// the box alone; the drop is logged once via warn_out when given.
SalMap segment(const HybridPrompt& prompt, SegmenterBackend& backend,
               std::string* warn_out = nullptr);

// Training-free reference backend: a color-histogram prior seeded by the
// dense prompt inside each box, relaxed by a few smoothing sweeps.
class HistSegmenter : public SegmenterBackend {
public:
    struct Params {
        int bins_per_channel = 8;
        double smoothing = 1.0;
        int blur_iters = 3;
        double margin = 0.10;  // bg ring width relative to the box size
    };

    void load(const std::string& weights_path) override;
    DecodeResult decode(const Embedding& emb, const std::optional<Box>& box,
                        const SalMap* dense_mask) override;
    std::string weights_checksum() const override;
    std::string name() const override { return "hist"; }

private:
    Params params_;
};

// Test backend: echoes the box interior (or the dense mask when no box).
class StubSegmenter : public SegmenterBackend {
public:
    void load(const std::string&) override {}
    DecodeResult decode(const Embedding& emb, const std::optional<Box>& box,
                        const SalMap* dense_mask) override;
    std::string weights_checksum() const override { return "stub-0"; }
    std::string name() const override { return "stub"; }
};

// name in {"hist", "stub"}; throws BackendUnavailable otherwise
std::unique_ptr<SegmenterBackend> make_segmenter(const std::string& name,
                                                 const std::string& weights_path = "");

}  // namespace hypsam::p2r
