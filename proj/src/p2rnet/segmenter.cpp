#include "hypsam/p2rnet/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "hypsam/core/errors.hpp"

namespace hypsam::p2r {

SalMap segment(const HybridPrompt& prompt, SegmenterBackend& backend, std::string* warn_out) {
    if (prompt.boxes.empty()) throw EmptyPrompt("segment: prompt has no boxes");
    SegmenterBackend::Embedding emb = backend.embed(prompt.image);
    SalMap dense = mask_to_map(prompt.mask);
    SalMap out(prompt.image.h, prompt.image.w, 0.0);
    bool dense_ok = true;
    for (const Box& box : prompt.boxes) {
        SegmenterBackend::DecodeResult r;
        if (dense_ok) {
            try {
                r = backend.decode(emb, box, &dense);
            } catch (const PromptRejected&) {
                dense_ok = false;
                if (warn_out)
                    *warn_out = "backend '" + backend.name() +
                                "' rejected the dense mask prompt; boxes only";
                r = backend.decode(emb, box, nullptr);
            }
        } else {
            r = backend.decode(emb, box, nullptr);
        }
        if (r.mask.h != out.h || r.mask.w != out.w)
            throw ShapeMismatch("segment: backend returned a mask at the wrong resolution");
        for (size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = std::max(out.data[i], r.mask.data[i]);
    }
    return out;
}

// ------------------------------------------------------------- HistSegmenter

void HistSegmenter::load(const std::string& weights_path) {
    if (weights_path.empty()) return;  // built-in defaults
    std::ifstream in(weights_path);
    if (!in) throw BackendUnavailable("hist backend params not found: " + weights_path);
    try {
        nlohmann::json j;
        in >> j;
        params_.bins_per_channel = j.value("bins_per_channel", params_.bins_per_channel);
        params_.smoothing = j.value("smoothing", params_.smoothing);
        params_.blur_iters = j.value("blur_iters", params_.blur_iters);
        params_.margin = j.value("margin", params_.margin);
    } catch (const nlohmann::json::exception& e) {
        throw BackendUnavailable(std::string("hist backend params unreadable: ") + e.what());
    }
}

std::string HistSegmenter::weights_checksum() const {
    // FNV-1a over the parameter block; stable across any number of queries
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<uint64_t>(params_.bins_per_channel));
    mix(static_cast<uint64_t>(params_.blur_iters));
    uint64_t s, m;
    std::memcpy(&s, &params_.smoothing, 8);
    std::memcpy(&m, &params_.margin, 8);
    mix(s);
    mix(m);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "hist-%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SegmenterBackend::DecodeResult HistSegmenter::decode(const Embedding& emb,
                                                     const std::optional<Box>& box,
                                                     const SalMap* dense_mask) {
    const Image8& img = emb.image;
    if (img.empty()) throw ShapeMismatch("hist decode: empty image");
    if (!box && !dense_mask) throw PromptRejected("hist backend needs a box or a dense mask");
    if (dense_mask && (dense_mask->h != img.h || dense_mask->w != img.w))
        throw ShapeMismatch("hist decode: dense mask resolution differs from image");

    Box b = box ? *box : Box{0, 0, img.w - 1, img.h - 1, 0};
    b.x0 = std::max(0, b.x0);
    b.y0 = std::max(0, b.y0);
    b.x1 = std::min(img.w - 1, b.x1);
    b.y1 = std::min(img.h - 1, b.y1);

    const int bins = params_.bins_per_channel;
    const int shift = 8 - static_cast<int>(std::round(std::log2(bins)));
    auto bin_of = [&](int y, int x) {
        int r = img.at(y, x, 0) >> shift;
        int g = img.at(y, x, 1) >> shift;
        int bb = img.at(y, x, 2) >> shift;
        return (r * bins + g) * bins + bb;
    };

    std::vector<double> h_fg(static_cast<size_t>(bins) * bins * bins, params_.smoothing);
    std::vector<double> h_bg(h_fg.size(), params_.smoothing);

    // foreground statistics from the dense prompt inside the box (fallback:
    // the central 60% of the box)
    int64_t fg_seeds = 0;
    if (dense_mask) {
        for (int y = b.y0; y <= b.y1; ++y)
            for (int x = b.x0; x <= b.x1; ++x)
                if (dense_mask->at(y, x) > 0.5) {
                    h_fg[static_cast<size_t>(bin_of(y, x))] += 1.0;
                    ++fg_seeds;
                }
    }
    if (fg_seeds == 0) {
        int my = std::max(1, static_cast<int>(0.2 * (b.y1 - b.y0 + 1)));
        int mx = std::max(1, static_cast<int>(0.2 * (b.x1 - b.x0 + 1)));
        for (int y = b.y0 + my; y <= b.y1 - my; ++y)
            for (int x = b.x0 + mx; x <= b.x1 - mx; ++x) {
                h_fg[static_cast<size_t>(bin_of(y, x))] += 1.0;
                ++fg_seeds;
            }
    }

    // background statistics from a ring around the box
    int ry = std::max(2, static_cast<int>(params_.margin * (b.y1 - b.y0 + 1)));
    int rx = std::max(2, static_cast<int>(params_.margin * (b.x1 - b.x0 + 1)));
    int oy0 = std::max(0, b.y0 - ry), oy1 = std::min(img.h - 1, b.y1 + ry);
    int ox0 = std::max(0, b.x0 - rx), ox1 = std::min(img.w - 1, b.x1 + rx);
    int64_t bg_seeds = 0;
    for (int y = oy0; y <= oy1; ++y)
        for (int x = ox0; x <= ox1; ++x) {
            bool in_box = y >= b.y0 && y <= b.y1 && x >= b.x0 && x <= b.x1;
            if (in_box) continue;
            h_bg[static_cast<size_t>(bin_of(y, x))] += 1.0;
            ++bg_seeds;
        }
    if (bg_seeds == 0) {
        // box covers the whole image; use its border pixels
        for (int x = 0; x < img.w; ++x) {
            h_bg[static_cast<size_t>(bin_of(0, x))] += 1.0;
            h_bg[static_cast<size_t>(bin_of(img.h - 1, x))] += 1.0;
            bg_seeds += 2;
        }
    }

    double zf = 0, zb = 0;
    for (size_t i = 0; i < h_fg.size(); ++i) {
        zf += h_fg[i];
        zb += h_bg[i];
    }

    DecodeResult out;
    out.mask = SalMap(img.h, img.w, 0.0);
    for (int y = b.y0; y <= b.y1; ++y)
        for (int x = b.x0; x <= b.x1; ++x) {
            size_t bin = static_cast<size_t>(bin_of(y, x));
            double pf = h_fg[bin] / zf;
            double pb = h_bg[bin] / zb;
            out.mask.at(y, x) = pf / (pf + pb);
        }

    // box-constrained relaxation: plain 3x3 means inside the box
    for (int it = 0; it < params_.blur_iters; ++it) {
        SalMap next = out.mask;
        for (int y = b.y0; y <= b.y1; ++y)
            for (int x = b.x0; x <= b.x1; ++x) {
                double acc = 0;
                int cnt = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int ny = y + dy, nx = x + dx;
                        if (ny < b.y0 || ny > b.y1 || nx < b.x0 || nx > b.x1) continue;
                        acc += out.mask.at(ny, nx);
                        ++cnt;
                    }
                next.at(y, x) = acc / cnt;
            }
        out.mask = std::move(next);
    }

    double conf = 0;
    int64_t npix = 0;
    for (int y = b.y0; y <= b.y1; ++y)
        for (int x = b.x0; x <= b.x1; ++x) {
            conf += std::abs(2.0 * out.mask.at(y, x) - 1.0);
            ++npix;
        }
    out.confidence = npix ? conf / static_cast<double>(npix) : 0.0;
    return out;
}

// ------------------------------------------------------------- StubSegmenter

SegmenterBackend::DecodeResult StubSegmenter::decode(const Embedding& emb,
                                                     const std::optional<Box>& box,
                                                     const SalMap* dense_mask) {
    DecodeResult r;
    r.mask = SalMap(emb.image.h, emb.image.w, 0.0);
    r.confidence = 1.0;
    if (box) {
        for (int y = std::max(0, box->y0); y <= std::min(emb.image.h - 1, box->y1); ++y)
            for (int x = std::max(0, box->x0); x <= std::min(emb.image.w - 1, box->x1); ++x)
                r.mask.at(y, x) = 1.0;
        return r;
    }
    if (dense_mask) {
        r.mask = *dense_mask;
        return r;
    }
    throw PromptRejected("stub backend needs a box or a dense mask");
}

std::unique_ptr<SegmenterBackend> make_segmenter(const std::string& name,
                                                 const std::string& weights_path) {
    std::unique_ptr<SegmenterBackend> b;
    if (name == "hist")
        b = std::make_unique<HistSegmenter>();
    else if (name == "stub")
        b = std::make_unique<StubSegmenter>();
    else
        throw BackendUnavailable("unknown segmenter backend '" + name + "'");
    b->load(weights_path);
    return b;
}

}  // namespace hypsam::p2r
