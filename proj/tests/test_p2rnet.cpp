#include <doctest.h>

#include <cmath>

#include "hypsam/core/errors.hpp"
#include "hypsam/core/rng.hpp"
#include "hypsam/data/synthetic.hpp"
#include "hypsam/p2rnet/refine.hpp"
#include "support/stubs.hpp"

using namespace hypsam;
using namespace hypsam::p2r;

namespace {

SalMap rand_map(int h, int w, Rng& rng) {
    SalMap m(h, w);
    for (double& v : m.data) v = rng.uniform();
    return m;
}

BinMask rand_mask(int h, int w, Rng& rng, double p = 0.3) {
    BinMask m(h, w);
    for (uint8_t& v : m.data) v = rng.bernoulli(p) ? 1 : 0;
    return m;
}

// flood-fill + min/max scan oracle for box extraction
std::vector<Box> boxes_oracle(const BinMask& mask, int64_t min_area) {
    std::vector<int> lab(mask.data.size(), -1);
    std::vector<Box> out;
    for (int y = 0; y < mask.h; ++y)
        for (int x = 0; x < mask.w; ++x) {
            if (!mask.at(y, x) || lab[static_cast<size_t>(y) * mask.w + x] >= 0) continue;
            std::vector<std::pair<int, int>> stack{{y, x}};
            lab[static_cast<size_t>(y) * mask.w + x] = static_cast<int>(out.size());
            std::vector<std::pair<int, int>> pix;
            while (!stack.empty()) {
                auto [cy, cx] = stack.back();
                stack.pop_back();
                pix.emplace_back(cy, cx);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int ny = cy + dy, nx = cx + dx;
                        if (ny < 0 || ny >= mask.h || nx < 0 || nx >= mask.w) continue;
                        size_t ni = static_cast<size_t>(ny) * mask.w + nx;
                        if (mask.data[ni] && lab[ni] < 0) {
                            lab[ni] = static_cast<int>(out.size());
                            stack.emplace_back(ny, nx);
                        }
                    }
            }
            Box b{mask.w, mask.h, -1, -1, static_cast<int64_t>(pix.size())};
            for (auto [py, px] : pix) {
                b.x0 = std::min(b.x0, px);
                b.x1 = std::max(b.x1, px);
                b.y0 = std::min(b.y0, py);
                b.y1 = std::max(b.y1, py);
            }
            out.push_back(b);
        }
    std::erase_if(out, [min_area](const Box& b) { return b.area < min_area; });
    std::stable_sort(out.begin(), out.end(), [](const Box& a, const Box& b) { return a.area > b.area; });
    return out;
}

bool same_boxes(const std::vector<Box>& a, const std::vector<Box>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].x0 != b[i].x0 || a[i].x1 != b[i].x1 || a[i].y0 != b[i].y0 ||
            a[i].y1 != b[i].y1 || a[i].area != b[i].area)
            return false;
    return true;
}

}  // namespace

TEST_CASE("quality score: symmetry, closed form, cosine extremes") {
    testsupport::StubScorer scorer;
    Image8 img(4, 4, 3, 128);

    scorer.image_embedding = {0.5, 0.5, 0, 0};  // equidistant from bright/dark
    CHECK(quality_score(img, "bright", "dark", scorer) == doctest::Approx(0.5).epsilon(1e-12));

    scorer.image_embedding = {1, 0, 0, 0};  // identical to bright, orthogonal to dark
    double s = quality_score(img, "bright", "dark", scorer);
    CHECK(s == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 1.0)).epsilon(1e-12));

    // strictly increasing in s1, decreasing in s2 over a grid
    testsupport::FixedScoreScorer fs;
    double prev = -1;
    for (double target = 0.15; target < 0.86; target += 0.1) {
        fs.s_alpha = target;
        double got = quality_score(img, "bright", "dark", fs);
        CHECK(got == doctest::Approx(target).epsilon(1e-9));
        CHECK(got > prev);
        prev = got;
    }
}

TEST_CASE("selector: four-region truth table and paper thresholds") {
    SelectorConfig cfg;  // tau=0.01 theta=0.85
    CHECK(cfg.tau == 0.01);
    CHECK(cfg.theta == 0.85);

    // exhaustive truth table on a grid around the thresholds
    for (double sa : {0.001, 0.005, 0.01, 0.02, 0.3, 0.99})
        for (double sb : {0.1, 0.5, 0.84, 0.85, 0.86, 0.99}) {
            Modality got = decide({sa, sb}, cfg);
            Modality want =
                (sa > cfg.tau || sb > cfg.theta) ? Modality::rgb : Modality::thermal;
            CHECK(got == want);
        }

    // spec examples
    CHECK(decide({0.02, 0.0}, cfg) == Modality::rgb);          // first disjunct alone
    CHECK(decide({0.005, 0.5}, cfg) == Modality::thermal);     // both fail
    CHECK(decide({0.005, 0.9}, cfg) == Modality::rgb);         // second disjunct alone
}

TEST_CASE("selector: dark scene routed to thermal via stub scorer") {
    // near-black RGB image; stub scorer aligns its embedding with "dark"/"dull"
    Image8 dark_rgb(16, 16, 3, 4);
    Image8 thermal(16, 16, 3, 150);
    testsupport::StubScorer scorer;
    scorer.image_embedding = {0, 1, 0, 1};  // dark and dull

    SelectorConfig cfg;
    cfg.tau = 0.3;  // a tau inside the reachable score range
    auto [m, scores] = select_modality(dark_rgb, thermal, cfg, scorer);
    CHECK(m == Modality::thermal);
    CHECK(scores.s_alpha < 0.3);
    CHECK(scores.s_beta < 0.85);

    // the stats scorer agrees on a genuinely dark vs bright image
    StatsScorer stats;
    double s_dark = quality_score(dark_rgb, "bright", "dark", stats);
    Image8 bright_rgb(16, 16, 3, 250);
    double s_bright = quality_score(bright_rgb, "bright", "dark", stats);
    CHECK(s_bright > s_dark);
}

TEST_CASE("binarize: trivial and pixel-scan oracle") {
    SalMap zero(6, 6, 0.0);
    CHECK(binarize(zero, 0.5).count() == 0);

    SalMap two(2, 2);
    two.data = {0.2, 0.7, 0.7, 0.2};
    BinMask b = binarize(two, 0.5);
    CHECK(b.data == std::vector<uint8_t>{0, 1, 1, 0});

    Rng rng(61);
    for (int t = 0; t < 20; ++t) {
        SalMap m = rand_map(9, 7, rng);
        double T = rng.uniform();
        BinMask got = binarize(m, T);
        int64_t want = 0;
        for (double v : m.data) want += v > T;
        CHECK(got.count() == want);
    }
}

TEST_CASE("extract_boxes: solid block, empty, flood-fill oracle, tightness") {
    BinMask block(8, 10);
    for (int y = 2; y <= 5; ++y)
        for (int x = 3; x <= 7; ++x) block.at(y, x) = 1;
    auto boxes = extract_boxes(block, 1);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0].x0 == 3);
    CHECK(boxes[0].y0 == 2);
    CHECK(boxes[0].x1 == 7);
    CHECK(boxes[0].y1 == 5);

    CHECK(extract_boxes(BinMask(8, 8), 1).empty());

    Rng rng(62);
    for (int t = 0; t < 100; ++t) {
        BinMask m = rand_mask(16, 16, rng, rng.uniform(0.05, 0.5));
        int64_t min_area = rng.uniform_int(1, 4);
        CHECK(same_boxes(extract_boxes(m, min_area), boxes_oracle(m, min_area)));
    }

    // tightness: shrinking any side of any box excludes >=1 foreground pixel
    for (int t = 0; t < 20; ++t) {
        BinMask m = rand_mask(12, 12, rng, 0.25);
        for (const Box& b : extract_boxes(m, 1)) {
            bool left = false, right = false, top = false, bottom = false;
            for (int y = b.y0; y <= b.y1; ++y) {
                left |= m.at(y, b.x0) != 0;
                right |= m.at(y, b.x1) != 0;
            }
            for (int x = b.x0; x <= b.x1; ++x) {
                top |= m.at(b.y0, x) != 0;
                bottom |= m.at(b.y1, x) != 0;
            }
            CHECK(left);
            CHECK(right);
            CHECK(top);
            CHECK(bottom);
        }
    }
}

TEST_CASE("build_prompts: idempotent on GT, empty prompt, noise filtering") {
    Rng rng(63);
    BinMask gt(32, 32);
    for (int y = 4; y < 16; ++y)
        for (int x = 6; x < 20; ++x) gt.at(y, x) = 1;
    Image8 img(32, 32, 3, 100);
    auto p = build_prompts(mask_to_map(gt), img, 0.5, 1);
    CHECK(p.mask.data == gt.data);
    REQUIRE(p.boxes.size() == 1);
    CHECK(p.boxes[0].x0 == 6);
    CHECK(p.boxes[0].y1 == 15);

    SalMap flat(32, 32, 0.3);
    CHECK_THROWS_AS(build_prompts(flat, img, 0.5, 1), EmptyPrompt);

    // dominant blob plus salt noise; min_area filters the noise
    SalMap noisy = mask_to_map(gt);
    for (int t = 0; t < 12; ++t) {
        int y = rng.uniform_int(20, 31), x = rng.uniform_int(0, 31);
        noisy.at(y, x) = 1.0;
    }
    auto pn = build_prompts(noisy, img, 0.5, 25);
    CHECK(pn.boxes.size() == 1);
    CHECK(pn.boxes[0].area == gt.count());
    // filtered noise leaves the dense prompt too
    CHECK(pn.mask.count() == gt.count());
}

TEST_CASE("segment: stub echo, overlapping boxes union, dense-reject fallback") {
    Image8 img(20, 20, 3, 80);
    BinMask mask(20, 20);
    for (int y = 2; y <= 8; ++y)
        for (int x = 2; x <= 8; ++x) mask.at(y, x) = 1;
    for (int y = 6; y <= 14; ++y)
        for (int x = 6; x <= 14; ++x) mask.at(y, x) = 1;
    HybridPrompt p;
    p.mask = mask;
    p.boxes = {Box{2, 2, 8, 8, 49}, Box{6, 6, 14, 14, 81}};
    p.image = img;

    StubSegmenter stub;
    SalMap sg = segment(p, stub);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x) {
            bool in1 = y >= 2 && y <= 8 && x >= 2 && x <= 8;
            bool in2 = y >= 6 && y <= 14 && x >= 6 && x <= 14;
            CHECK(sg.at(y, x) == ((in1 || in2) ? 1.0 : 0.0));
        }

    testsupport::BoxOnlySegmenter boxonly;
    std::string warn;
    SalMap sg2 = segment(p, boxonly, &warn);
    CHECK(boxonly.dense_rejections == 1);  // dropped once, not per box
    CHECK_FALSE(warn.empty());
    for (size_t i = 0; i < sg.data.size(); ++i) CHECK(sg2.data[i] == sg.data[i]);
}

TEST_CASE("refine: strategies, properties, unknown name") {
    Rng rng(64);
    RefineStrategy mx;  // default max

    SalMap st = rand_map(10, 10, rng);
    SalMap zero(10, 10, 0.0);
    SalMap r = refine(st, zero, mx);
    for (size_t i = 0; i < r.data.size(); ++i) CHECK(r.data[i] == st.data[i]);
    r = refine(st, st, mx);
    for (size_t i = 0; i < r.data.size(); ++i) CHECK(r.data[i] == st.data[i]);

    for (int t = 0; t < 200; ++t) {
        SalMap a = rand_map(6, 6, rng), b = rand_map(6, 6, rng);
        SalMap m1 = refine(a, b, mx);
        SalMap m2 = refine(b, a, mx);                  // commutative
        SalMap m3 = refine(refine(a, b, mx), b, mx);   // idempotent
        for (size_t i = 0; i < m1.data.size(); ++i) {
            CHECK(m1.data[i] == std::max(a.data[i], b.data[i]));  // brute-force elementwise
            CHECK(m1.data[i] >= a.data[i]);
            CHECK(m1.data[i] >= b.data[i]);
            CHECK(m1.data[i] == m2.data[i]);
            CHECK(m3.data[i] == m1.data[i]);
        }
    }

    RefineStrategy add = parse_strategy("add");
    RefineStrategy wadd = parse_strategy("weighted_add");
    wadd.weight = 0.7;
    RefineStrategy morph = parse_strategy("morphological");
    morph.se_radius = 2;
    SalMap a = rand_map(12, 12, rng), b = rand_map(12, 12, rng);
    SalMap radd = refine(a, b, add);
    for (size_t i = 0; i < radd.data.size(); ++i)
        CHECK(radd.data[i] == doctest::Approx(std::min(1.0, a.data[i] + b.data[i])));
    SalMap rw = refine(a, b, wadd);
    for (size_t i = 0; i < rw.data.size(); ++i)
        CHECK(rw.data[i] ==
              doctest::Approx(std::min(1.0, 0.7 * a.data[i] + 0.3 * b.data[i])));
    SalMap rm = refine(a, b, morph);
    for (double v : rm.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // closing fills a small hole in a solid square
    SalMap sq(16, 16, 0.0);
    for (int y = 4; y < 12; ++y)
        for (int x = 4; x < 12; ++x) sq.at(y, x) = 1.0;
    sq.at(8, 8) = 0.0;
    SalMap closed = refine(sq, SalMap(16, 16, 0.0), morph);
    CHECK(closed.at(8, 8) == 1.0);

    CHECK_THROWS_AS(parse_strategy("crf"), UnknownStrategy);
    CHECK_THROWS_AS(refine(SalMap(4, 4), SalMap(5, 5), mx), ShapeMismatch);
}

TEST_CASE("run_pipeline: fallback paths return the coarse map bit-exactly") {
    auto sample = data::make_synthetic_sample(77, 48);
    Rng rng(65);
    SalMap coarse = rand_map(48, 48, rng);
    for (double& v : coarse.data) v *= 0.3;  // nothing above the 0.5 threshold

    P2rConfig cfg;
    testsupport::StubScorer scorer;
    StubSegmenter stub;
    PipelineLog log;
    SalMap out = run_pipeline(sample, coarse, cfg, scorer, stub, &log);
    CHECK(log.fallback);
    CHECK(out.data == coarse.data);

    // broken backend -> coarse unchanged
    SalMap good = mask_to_map(sample.gt);
    testsupport::BrokenSegmenter broken;
    out = run_pipeline(sample, good, cfg, scorer, broken, &log);
    CHECK(log.fallback);
    CHECK(out.data == good.data);

    // stub + max strategy: output dominates the binarized coarse map
    out = run_pipeline(sample, good, cfg, scorer, stub, &log);
    CHECK_FALSE(log.fallback);
    CHECK(log.boxes >= 1);
    BinMask st = binarize(good, cfg.bin_thresh);
    for (size_t i = 0; i < out.data.size(); ++i)
        CHECK(out.data[i] >= (st.data[i] ? 1.0 : 0.0));
}

TEST_CASE("hist backend: frozen weights, segments a synthetic object") {
    auto sample = data::make_synthetic_sample(123, 64, 3.0);
    SalMap coarse = mask_to_map(sample.gt);

    HistSegmenter hist;
    hist.load("");
    std::string before = hist.weights_checksum();
    auto prompt = build_prompts(coarse, sample.thermal, 0.5, 4);
    SalMap sg = segment(prompt, hist);
    std::string after = hist.weights_checksum();
    CHECK(before == after);

    // the recovered mask overlaps the object far better than chance
    int64_t inter = 0, uni = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            bool pg = sg.at(y, x) > 0.5;
            bool gg = sample.gt.at(y, x) != 0;
            inter += pg && gg;
            uni += pg || gg;
        }
    double iou = uni ? static_cast<double>(inter) / uni : 0.0;
    CHECK(iou > 0.5);

    CHECK_THROWS_AS(make_segmenter("vith"), BackendUnavailable);
    CHECK_THROWS_AS(make_segmenter("hist", "/nonexistent/params.json"), BackendUnavailable);
}

TEST_CASE("point prompts come from component centroids") {
    BinMask m(10, 10);
    for (int y = 2; y <= 4; ++y)
        for (int x = 2; x <= 4; ++x) m.at(y, x) = 1;
    HybridPrompt p;
    p.mask = m;
    p.boxes = extract_boxes(m, 1);
    p.image = Image8(10, 10, 3, 0);
    auto pts = point_prompts(p);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].first == 3);
    CHECK(pts[0].second == 3);
}
