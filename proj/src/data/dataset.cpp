#include "hypsam/data/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "hypsam/core/errors.hpp"

namespace fs = std::filesystem;

namespace hypsam::data {

namespace {

const char* kExts[] = {".jpg", ".png", ".bmp", ".jpeg", ".JPG", ".PNG", ".BMP"};

std::string find_by_stem(const fs::path& dir, const std::string& stem) {
    for (const char* ext : kExts) {
        fs::path p = dir / (stem + ext);
        if (fs::exists(p)) return p.string();
    }
    return {};
}

}  // namespace

std::vector<std::string> list_split_names(const std::string& root, const std::string& split) {
    fs::path dir = fs::path(root) / split / "RGB";
    if (!fs::is_directory(dir))
        throw DatasetMissing("no RGB folder under " + (fs::path(root) / split).string());
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::string ext = e.path().extension().string();
        std::string low = ext;
        std::transform(low.begin(), low.end(), low.begin(), ::tolower);
        if (low == ".jpg" || low == ".jpeg" || low == ".png" || low == ".bmp")
            names.push_back(e.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

RgbtSample load_sample(const std::string& root, const std::string& split,
                       const std::string& name) {
    fs::path base = fs::path(root) / split;
    std::string rgb_path = find_by_stem(base / "RGB", name);
    if (rgb_path.empty()) throw MissingFile((base / "RGB" / name).string());
    std::string t_path = find_by_stem(base / "T", name);
    if (t_path.empty()) throw MissingFile((base / "T" / name).string());

    RgbtSample s;
    s.name = name;
    s.rgb = io::imread_rgb(rgb_path);
    s.thermal = io::imread_rgb(t_path);
    if (s.rgb.h != s.thermal.h || s.rgb.w != s.thermal.w)
        throw ShapeMismatch("rgb and thermal sizes differ for " + name);

    if (fs::is_directory(base / "GT")) {
        std::string gt_path = find_by_stem(base / "GT", name);
        if (gt_path.empty()) throw MissingFile((base / "GT" / name).string());
        s.gt = io::imread_mask(gt_path);
        s.has_gt = true;
        if (s.gt.h != s.rgb.h || s.gt.w != s.rgb.w)
            throw ShapeMismatch("gt size differs for " + name);
    }
    return s;
}

std::map<std::string, std::vector<std::string>> load_attributes(const std::string& root) {
    std::map<std::string, std::vector<std::string>> out;
    fs::path p = fs::path(root) / "attributes.csv";
    if (!fs::exists(p)) return out;
    std::ifstream in(p);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {  // header
            first = false;
            continue;
        }
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        std::string name = line.substr(0, comma);
        std::string rest = line.substr(comma + 1);
        std::vector<std::string> tags;
        size_t pos = 0;
        while (pos <= rest.size()) {
            auto semi = rest.find(';', pos);
            std::string tag = rest.substr(pos, semi == std::string::npos ? semi : semi - pos);
            if (!tag.empty()) tags.push_back(tag);
            if (semi == std::string::npos) break;
            pos = semi + 1;
        }
        out[name] = std::move(tags);
    }
    return out;
}

const std::vector<std::string>& canonical_attributes() {
    static const std::vector<std::string> order = {"BSO", "CB", "CIB", "IC", "LI", "MSO", "OF",
                                                   "SSO", "SA", "TC", "BW", "bRGB", "bT"};
    return order;
}

}  // namespace hypsam::data
