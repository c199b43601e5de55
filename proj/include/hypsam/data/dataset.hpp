#pragma once

#include <map>
#include <string>
#include <vector>

#include "hypsam/io/image.hpp"

// Aligned RGB-T dataset layout: <root>/<split>/{RGB,T,GT}/<name>.<ext> with
// ext in {jpg, png, bmp}, names matched stem-wise across folders. The GT
// folder may be absent for inference splits.
namespace hypsam::data {

struct RgbtSample {
    std::string name;
    Image8 rgb;
    Image8 thermal;
    BinMask gt;
    bool has_gt = false;
    std::vector<std::string> attributes;
};

// sorted stems found under <root>/<split>/RGB; DatasetMissing if absent
std::vector<std::string> list_split_names(const std::string& root, const std::string& split);

RgbtSample load_sample(const std::string& root, const std::string& split,
                       const std::string& name);

// optional <root>/attributes.csv with header "name,attrs"; attrs are
// semicolon-separated tags
std::map<std::string, std::vector<std::string>> load_attributes(const std::string& root);

// canonical VT5000 attribute order for report tables
const std::vector<std::string>& canonical_attributes();

}  // namespace hypsam::data
