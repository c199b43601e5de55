#include "hypsam/data/synthetic.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "hypsam/core/rng.hpp"

namespace fs = std::filesystem;

namespace hypsam::data {

namespace {

uint8_t clamp8(double v) {
    return static_cast<uint8_t>(std::min(255.0, std::max(0.0, v)));
}

}  // namespace

RgbtSample make_synthetic_sample(uint64_t seed, int size, double noise) {
    Rng rng(seed);
    RgbtSample s;
    s.name = "synthetic";
    s.rgb = Image8(size, size, 3);
    s.thermal = Image8(size, size, 3);
    s.gt = BinMask(size, size);
    s.has_gt = true;

    // background: smooth RGB gradient between two random colors, dim thermal
    double c0[3], c1[3];
    for (int i = 0; i < 3; ++i) {
        c0[i] = rng.uniform(40, 150);
        c1[i] = rng.uniform(40, 150);
    }
    bool disk = rng.bernoulli(0.5);
    double radius = rng.uniform(0.15, 0.24) * size;
    double cy = rng.uniform(radius + 2, size - radius - 2);
    double cx = rng.uniform(radius + 2, size - radius - 2);
    double obj_rgb[3] = {rng.uniform(160, 250), rng.uniform(160, 250), rng.uniform(160, 250)};
    double t_bg = rng.uniform(40, 70);
    double t_obj = rng.uniform(190, 230);

    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            double fr = static_cast<double>(x) / (size - 1);
            bool inside = disk ? ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= radius * radius)
                               : (std::abs(y - cy) <= radius && std::abs(x - cx) <= radius);
            for (int ch = 0; ch < 3; ++ch) {
                double bg = c0[ch] * (1 - fr) + c1[ch] * fr;
                double v = inside ? obj_rgb[ch] : bg;
                s.rgb.at(y, x, ch) = clamp8(v + rng.normal(0, noise));
            }
            double tv = (inside ? t_obj : t_bg) + rng.normal(0, noise);
            uint8_t t8 = clamp8(tv);
            for (int ch = 0; ch < 3; ++ch) s.thermal.at(y, x, ch) = t8;
            s.gt.at(y, x) = inside ? 1 : 0;
        }

    double area_frac = static_cast<double>(s.gt.count()) / (size * size);
    if (area_frac < 0.12) s.attributes.push_back("SSO");
    if (area_frac > 0.30) s.attributes.push_back("BSO");
    double center_d = std::hypot(cy - size / 2.0, cx - size / 2.0);
    if (center_d < 0.15 * size) s.attributes.push_back("CB");
    return s;
}

void write_synthetic_dataset(const std::string& root, const std::string& split,
                             const SynthOptions& opts) {
    fs::path base = fs::path(root) / split;
    fs::create_directories(base / "RGB");
    fs::create_directories(base / "T");
    fs::create_directories(base / "GT");

    fs::path attr_path = fs::path(root) / "attributes.csv";
    bool fresh = !fs::exists(attr_path);
    std::ofstream attrs(attr_path, std::ios::app);
    if (fresh) attrs << "name,attrs\n";

    for (int i = 0; i < opts.count; ++i) {
        RgbtSample s = make_synthetic_sample(opts.seed * 1000003ULL + i, opts.size, opts.noise);
        char name[32];
        std::snprintf(name, sizeof(name), "%s_%04d", split.c_str(), i);
        s.name = name;
        io::imwrite_rgb((base / "RGB" / (s.name + ".png")).string(), s.rgb);
        io::imwrite_rgb((base / "T" / (s.name + ".png")).string(), s.thermal);
        SalMap gt01 = mask_to_map(s.gt);
        io::imwrite_gray01((base / "GT" / (s.name + ".png")).string(), gt01);
        attrs << s.name << ",";
        for (size_t a = 0; a < s.attributes.size(); ++a)
            attrs << s.attributes[a] << (a + 1 < s.attributes.size() ? ";" : "");
        attrs << "\n";
    }
}

}  // namespace hypsam::data
