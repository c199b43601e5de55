#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "hypsam/core/errors.hpp"
#include "hypsam/core/rng.hpp"
#include "hypsam/data/augment.hpp"
#include "hypsam/data/boundary.hpp"
#include "hypsam/data/dataset.hpp"
#include "hypsam/data/prepare.hpp"
#include "hypsam/data/synthetic.hpp"

namespace fs = std::filesystem;
using namespace hypsam;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("hypsam_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

BinMask rand_mask(int h, int w, Rng& rng, double p = 0.4) {
    BinMask m(h, w);
    for (uint8_t& v : m.data) v = rng.bernoulli(p) ? 1 : 0;
    return m;
}

// inner edge: foreground pixel with a background pixel among its in-bounds
// 8-neighbours; the oracle then grows it with a square of radius r inside fg
BinMask boundary_oracle(const BinMask& gt, int r) {
    BinMask edge(gt.h, gt.w);
    for (int y = 0; y < gt.h; ++y)
        for (int x = 0; x < gt.w; ++x) {
            if (!gt.at(y, x)) continue;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int ny = y + dy, nx = x + dx;
                    if (ny < 0 || ny >= gt.h || nx < 0 || nx >= gt.w) continue;
                    if (!gt.at(ny, nx)) edge.at(y, x) = 1;
                }
        }
    BinMask out(gt.h, gt.w);
    for (int y = 0; y < gt.h; ++y)
        for (int x = 0; x < gt.w; ++x) {
            if (!gt.at(y, x)) continue;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    int ny = y + dy, nx = x + dx;
                    if (ny < 0 || ny >= gt.h || nx < 0 || nx >= gt.w) continue;
                    if (edge.at(ny, nx)) out.at(y, x) = 1;
                }
        }
    return out;
}

}  // namespace

TEST_CASE("dataset: synthetic split round-trips through the loader") {
    TempDir td("dataset");
    data::SynthOptions opts;
    opts.count = 6;
    opts.size = 32;
    data::write_synthetic_dataset(td.path.string(), "train", opts);

    auto names = data::list_split_names(td.path.string(), "train");
    CHECK(names.size() == 6);
    for (const auto& n : names) {
        auto s = data::load_sample(td.path.string(), "train", n);
        CHECK(s.rgb.h == s.thermal.h);
        CHECK(s.rgb.w == s.thermal.w);
        CHECK(s.has_gt);
        CHECK(s.gt.h == s.rgb.h);
        CHECK(s.gt.w == s.rgb.w);
        for (uint8_t v : s.gt.data) CHECK((v == 0 || v == 1));
    }
    CHECK_THROWS_AS(data::load_sample(td.path.string(), "train", "does_not_exist"), MissingFile);
    CHECK_THROWS_AS(data::list_split_names(td.path.string(), "nope"), DatasetMissing);

    auto attrs = data::load_attributes(td.path.string());
    CHECK(attrs.size() == 6);
}

TEST_CASE("dataset: GT binarization at the 128 midpoint") {
    TempDir td("gtbin");
    fs::create_directories(td.path / "s" / "RGB");
    fs::create_directories(td.path / "s" / "T");
    fs::create_directories(td.path / "s" / "GT");
    Image8 img(10, 10, 3, 99);
    io::imwrite_rgb((td.path / "s" / "RGB" / "a.png").string(), img);
    io::imwrite_rgb((td.path / "s" / "T" / "a.png").string(), img);

    // gt with values {0, 200}: foreground = pixels > 127
    Rng rng(3);
    SalMap gt(10, 10);
    int want_fg = 0;
    for (double& v : gt.data) {
        bool hi = rng.bernoulli(0.5);
        v = hi ? 200.0 / 255.0 : 0.0;
        want_fg += hi;
    }
    io::imwrite_gray01((td.path / "s" / "GT" / "a.png").string(), gt);
    auto s = data::load_sample(td.path.string(), "s", "a");
    CHECK(s.gt.count() == want_fg);

    // saturated gt: all 255 -> all ones
    io::imwrite_gray01((td.path / "s" / "GT" / "a.png").string(), SalMap(10, 10, 1.0));
    s = data::load_sample(td.path.string(), "s", "a");
    CHECK(s.gt.count() == 100);
}

TEST_CASE("decouple_boundary: empty, square ring, partition identity") {
    BinMask empty(16, 16);
    auto lbl = data::decouple_boundary(empty);
    CHECK(lbl.boundary.count() == 0);
    CHECK(lbl.content.count() == 0);

    BinMask sq(32, 32);
    for (int y = 10; y < 20; ++y)
        for (int x = 10; x < 20; ++x) sq.at(y, x) = 1;
    auto got = data::decouple_boundary(sq, 100, 200, 1);
    BinMask want = boundary_oracle(sq, 1);
    for (size_t i = 0; i < sq.data.size(); ++i) CHECK(got.boundary.data[i] == want.data[i]);

    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        BinMask gt = rand_mask(24, 24, rng, rng.uniform(0.1, 0.9));
        auto b = data::decouple_boundary(gt);
        for (size_t i = 0; i < gt.data.size(); ++i) {
            CHECK((b.boundary.data[i] & b.content.data[i]) == 0);
            CHECK((b.boundary.data[i] | b.content.data[i]) == gt.data[i]);
        }
    }
}

TEST_CASE("augment: identity params are a no-op, flips are joint, seeds reproduce") {
    auto s = data::make_synthetic_sample(99, 48);
    auto same = data::augment(s, 7, 0.0, 0.0, 1.0);
    CHECK(same.rgb.data == s.rgb.data);
    CHECK(same.thermal.data == s.thermal.data);
    CHECK(same.gt.data == s.gt.data);

    // force a flip: flip_p = 1, no rotation/crop
    auto flipped = data::augment(s, 7, 1.0, 0.0, 1.0);
    for (int y = 0; y < s.rgb.h; ++y)
        for (int x = 0; x < s.rgb.w; ++x) {
            CHECK(flipped.rgb.at(y, x, 0) == s.rgb.at(y, s.rgb.w - 1 - x, 0));
            CHECK(flipped.gt.at(y, x) == s.gt.at(y, s.rgb.w - 1 - x));
        }

    data::AugmentParams p;  // defaults: flip 0.5, rotate 10, crop [0.8,1]
    auto a1 = data::augment(s, 1234, p);
    auto a2 = data::augment(s, 1234, p);
    CHECK(a1.rgb.data == a2.rgb.data);
    CHECK(a1.thermal.data == a2.thermal.data);
    CHECK(a1.gt.data == a2.gt.data);
    // gt stays binary through rotation/crop
    for (uint8_t v : a1.gt.data) CHECK((v == 0 || v == 1));
}

TEST_CASE("prepare: normalization identity, output shape, alignment") {
    // constant image equal to the channel means -> all-zero tensor
    Image8 img(20, 24, 3);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 24; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(y, x, c) = static_cast<uint8_t>(std::lround(data::kNormMean[c] * 255.0));
    data::RgbtSample s;
    s.rgb = img;
    s.thermal = img;
    auto tp = data::prepare(s, 16);
    for (int64_t i = 0; i < tp.rgb.numel(); ++i)
        CHECK(tp.rgb[i] == doctest::Approx(0.0).epsilon(2e-2));  // 8-bit quantization slack

    auto full = data::prepare(s, 384);
    CHECK(full.rgb.shape == Shape{3, 384, 384});
    CHECK(full.thermal.shape == Shape{3, 384, 384});
}
