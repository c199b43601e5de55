#include "hypsam/nn/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <nlohmann/json.hpp>

#include "hypsam/core/errors.hpp"

namespace hypsam::nn {

namespace {

constexpr char kMagic[9] = "HYPSAMCK";

using nlohmann::json;

json meta_to_json(const CheckpointMeta& m) {
    return json{{"backbone", m.backbone},
                {"channels", m.channels},
                {"kernels", m.kernels},
                {"ksize", m.ksize},
                {"resolution", m.resolution}};
}

CheckpointMeta meta_from_json(const json& j) {
    CheckpointMeta m;
    m.backbone = j.at("backbone").get<std::string>();
    m.channels = j.at("channels").get<int>();
    m.kernels = j.at("kernels").get<int>();
    m.ksize = j.at("ksize").get<int>();
    m.resolution = j.at("resolution").get<int>();
    return m;
}

json read_manifest(std::ifstream& in, const std::string& path) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != std::string(kMagic, 8))
        throw CheckpointIncompatible("not a checkpoint archive: " + path);
    uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string buf(len, '\0');
    in.read(buf.data(), static_cast<std::streamsize>(len));
    if (!in) throw CheckpointIncompatible("truncated manifest: " + path);
    return json::parse(buf);
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const ParamRegistry& reg) {
    json manifest;
    manifest["format"] = 1;
    manifest["model"] = meta_to_json(meta);
    json tensors = json::array();
    uint64_t offset = 0;
    auto describe = [&](const std::string& name, const Tensor<real>& t) {
        json e;
        e["name"] = name;
        e["shape"] = t.shape;
        e["offset"] = offset;
        e["numel"] = t.numel();
        offset += static_cast<uint64_t>(t.numel());
        tensors.push_back(e);
    };
    for (const auto& p : reg.params) describe(p.name, p.param->value);
    for (const auto& b : reg.buffers) describe(b.name, *b.buf);
    manifest["tensors"] = tensors;

    std::string mstr = manifest.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint: " + path);
    out.write(kMagic, 8);
    uint64_t len = mstr.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(mstr.data(), static_cast<std::streamsize>(len));
    for (const auto& p : reg.params)
        out.write(reinterpret_cast<const char*>(p.param->value.ptr()),
                  static_cast<std::streamsize>(p.param->value.numel() * sizeof(real)));
    for (const auto& b : reg.buffers)
        out.write(reinterpret_cast<const char*>(b.buf->ptr()),
                  static_cast<std::streamsize>(b.buf->numel() * sizeof(real)));
    if (!out) throw Error("short write on checkpoint: " + path);
}

CheckpointMeta load_checkpoint(const std::string& path, ParamRegistry& reg) {
    if (!std::filesystem::exists(path)) throw MissingFile(path);
    std::ifstream in(path, std::ios::binary);
    json manifest = read_manifest(in, path);
    CheckpointMeta meta = meta_from_json(manifest.at("model"));

    std::streampos data_start = in.tellg();
    std::unordered_map<std::string, std::pair<uint64_t, Shape>> index;
    for (const auto& e : manifest.at("tensors")) {
        index[e.at("name").get<std::string>()] = {e.at("offset").get<uint64_t>(),
                                                  e.at("shape").get<Shape>()};
    }
    auto restore = [&](const std::string& name, Tensor<real>& t) {
        auto it = index.find(name);
        if (it == index.end()) throw CheckpointIncompatible("missing tensor: " + name);
        if (it->second.second != t.shape)
            throw CheckpointIncompatible("shape mismatch for tensor: " + name);
        in.seekg(data_start + static_cast<std::streamoff>(it->second.first * sizeof(real)));
        in.read(reinterpret_cast<char*>(t.ptr()),
                static_cast<std::streamsize>(t.numel() * sizeof(real)));
        if (!in) throw CheckpointIncompatible("truncated data for tensor: " + name);
    };
    for (auto& p : reg.params) restore(p.name, p.param->value);
    for (auto& b : reg.buffers) restore(b.name, *b.buf);
    return meta;
}

CheckpointMeta peek_checkpoint(const std::string& path) {
    if (!std::filesystem::exists(path)) throw MissingFile(path);
    std::ifstream in(path, std::ios::binary);
    return meta_from_json(read_manifest(in, path).at("model"));
}

}  // namespace hypsam::nn
