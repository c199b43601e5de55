#include "hypsam/p2rnet/refine.hpp"

#include <algorithm>
#include <cmath>

#include "hypsam/core/errors.hpp"

namespace hypsam::p2r {

RefineStrategy parse_strategy(const std::string& name) {
    RefineStrategy s;
    if (name == "max")
        s.kind = RefineKind::max;
    else if (name == "add")
        s.kind = RefineKind::add;
    else if (name == "weighted_add")
        s.kind = RefineKind::weighted_add;
    else if (name == "morphological")
        s.kind = RefineKind::morphological;
    else
        throw UnknownStrategy("'" + name + "'");
    return s;
}

std::string to_string(const RefineStrategy& s) {
    switch (s.kind) {
        case RefineKind::max: return "max";
        case RefineKind::add: return "add";
        case RefineKind::weighted_add: return "weighted_add";
        case RefineKind::morphological: return "morphological";
    }
    return "?";
}

namespace {

// grayscale dilation/erosion with a disk structuring element
SalMap disk_morph(const SalMap& in, int radius, bool dilate) {
    SalMap out(in.h, in.w);
    int r2 = radius * radius;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x) {
            double best = dilate ? 0.0 : 1.0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (dy * dy + dx * dx > r2) continue;
                    int ny = y + dy, nx = x + dx;
                    if (ny < 0 || ny >= in.h || nx < 0 || nx >= in.w) continue;
                    double v = in.at(ny, nx);
                    best = dilate ? std::max(best, v) : std::min(best, v);
                }
            out.at(y, x) = best;
        }
    return out;
}

}  // namespace

SalMap refine(const SalMap& st, const SalMap& sg, const RefineStrategy& strategy) {
    if (st.h != sg.h || st.w != sg.w) throw ShapeMismatch("refine: map sizes differ");
    SalMap out(st.h, st.w);
    switch (strategy.kind) {
        case RefineKind::max:
            for (size_t i = 0; i < out.data.size(); ++i)
                out.data[i] = std::max(st.data[i], sg.data[i]);
            break;
        case RefineKind::add:
            for (size_t i = 0; i < out.data.size(); ++i)
                out.data[i] = std::min(1.0, std::max(0.0, st.data[i] + sg.data[i]));
            break;
        case RefineKind::weighted_add: {
            double w = strategy.weight;
            for (size_t i = 0; i < out.data.size(); ++i)
                out.data[i] =
                    std::min(1.0, std::max(0.0, w * st.data[i] + (1.0 - w) * sg.data[i]));
            break;
        }
        case RefineKind::morphological: {
            for (size_t i = 0; i < out.data.size(); ++i)
                out.data[i] = std::max(st.data[i], sg.data[i]);
            out = disk_morph(disk_morph(out, strategy.se_radius, true), strategy.se_radius, false);
            break;
        }
    }
    return out;
}

std::vector<std::pair<int, int>> point_prompts(const HybridPrompt& prompt) {
    std::vector<std::pair<int, int>> pts;
    // centroid of each box's component, approximated by the box centroid of
    // mask pixels inside it
    for (const Box& b : prompt.boxes) {
        double sy = 0, sx = 0;
        int64_t n = 0;
        for (int y = b.y0; y <= b.y1; ++y)
            for (int x = b.x0; x <= b.x1; ++x)
                if (prompt.mask.at(y, x)) {
                    sy += y;
                    sx += x;
                    ++n;
                }
        if (n > 0)
            pts.emplace_back(static_cast<int>(std::lround(sy / n)),
                             static_cast<int>(std::lround(sx / n)));
    }
    return pts;
}

SalMap run_pipeline(const data::RgbtSample& sample, const SalMap& coarse, const P2rConfig& cfg,
                    QualityScorer& scorer, SegmenterBackend& backend, PipelineLog* log) {
    PipelineLog local;
    PipelineLog& lg = log ? *log : local;
    lg.name = sample.name;
    lg.strategy = to_string(cfg.strategy);
    lg.fallback = false;

    if (coarse.h != sample.rgb.h || coarse.w != sample.rgb.w)
        throw ShapeMismatch("run_pipeline: coarse map not aligned to the sample");

    try {
        auto [modality, scores] = select_modality(sample.rgb, sample.thermal, cfg.selector, scorer);
        lg.modality = to_string(modality);
        lg.s_alpha = scores.s_alpha;
        lg.s_beta = scores.s_beta;
        const Image8& image = modality == Modality::rgb ? sample.rgb : sample.thermal;

        int64_t min_area = static_cast<int64_t>(
            std::llround(cfg.min_area_frac * static_cast<double>(coarse.h) * coarse.w));
        HybridPrompt prompt = build_prompts(coarse, image, cfg.bin_thresh, min_area);
        lg.boxes = static_cast<int>(prompt.boxes.size());

        SalMap sg = segment(prompt, backend, &lg.note);
        SalMap base = cfg.refine_raw_coarse ? coarse : mask_to_map(prompt.mask);
        return refine(base, sg, cfg.strategy);
    } catch (const EmptyPrompt& e) {
        lg.fallback = true;
        lg.note = e.what();
    } catch (const BackendUnavailable& e) {
        lg.fallback = true;
        lg.note = e.what();
    } catch (const ScorerUnavailable& e) {
        lg.fallback = true;
        lg.note = e.what();
    }
    return coarse;
}

}  // namespace hypsam::p2r
