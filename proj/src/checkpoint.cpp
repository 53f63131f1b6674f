// Copyright 2026 The msgan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msgan/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "msgan/common.hpp"

namespace msgan {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw NotFoundError("cannot write " + path);
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("missing file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json schedule_to_json(const ScaleSchedule& s) {
    json j;
    j["sizes"] = json::array();
    for (const auto& hw : s.sizes) j["sizes"].push_back({hw[0], hw[1]});
    j["r"] = s.r;
    j["min_size_px"] = s.min_size_px;
    j["max_size_px"] = s.max_size_px;
    return j;
}

ScaleSchedule schedule_from_json(const json& j) {
    ScaleSchedule s;
    for (const auto& hw : j.at("sizes"))
        s.sizes.push_back({hw.at(0).get<int>(), hw.at(1).get<int>()});
    s.r = j.at("r").get<double>();
    s.min_size_px = j.at("min_size_px").get<int>();
    s.max_size_px = j.at("max_size_px").get<int>();
    return s;
}

// Block parameter naming inside archives: <net>.b<idx>.{w,b,bn_g,bn_b}
void collect_net(const std::string& prefix, const NetParams& net,
                 std::vector<std::pair<std::string, Tensor>>& out) {
    for (size_t i = 0; i < net.blocks.size(); ++i) {
        const auto& blk = net.blocks[i];
        const std::string base = prefix + ".b" + std::to_string(i) + ".";
        out.emplace_back(base + "w", blk.w->value);
        out.emplace_back(base + "b", blk.b->value);
        if (blk.has_bn) {
            out.emplace_back(base + "bn_g", blk.bn_gamma->value);
            out.emplace_back(base + "bn_b", blk.bn_beta->value);
        }
    }
}

void restore_net(const std::string& prefix, const std::map<std::string, Tensor>& archive,
                 NetParams& net) {
    for (size_t i = 0; i < net.blocks.size(); ++i) {
        auto& blk = net.blocks[i];
        const std::string base = prefix + ".b" + std::to_string(i) + ".";
        auto fetch = [&](const std::string& name) -> const Tensor& {
            auto it = archive.find(name);
            if (it == archive.end())
                throw NotFoundError("tensor archive is missing " + name);
            return it->second;
        };
        auto assign = [&](ad::Var& var, const std::string& name) {
            const Tensor& t = fetch(name);
            if (!t.same_shape(var->value))
                throw InvalidInputError("tensor " + name + " has unexpected shape");
            var->value = t;
        };
        assign(blk.w, base + "w");
        assign(blk.b, base + "b");
        if (blk.has_bn) {
            assign(blk.bn_gamma, base + "bn_g");
            assign(blk.bn_beta, base + "bn_b");
        }
    }
}

NetSpec spec_for_scale(const RunConfig& cfg, int scale_index, int coarsest) {
    NetSpec spec;
    spec.n_blocks = cfg.model.n_blocks;
    spec.base_channels = cfg.model.base_channels;
    spec.kernel = cfg.model.kernel;
    spec.image_channels = 3;
    spec.scale_index = scale_index;
    spec.scale_gap = coarsest - scale_index;
    return spec;
}

}  // namespace

void save_tensor_archive(const std::string& stem,
                         const std::vector<std::pair<std::string, Tensor>>& tensors) {
    json sidecar;
    sidecar["format"] = "msgan-tensor-archive";
    sidecar["version"] = 1;
    sidecar["byte_order"] = "little";
    sidecar["tensors"] = json::array();

    std::ofstream bin(stem + ".bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw NotFoundError("cannot write " + stem + ".bin");
    std::int64_t offset = 0;
    for (const auto& [name, t] : tensors) {
        json entry;
        entry["name"] = name;
        entry["shape"] = t.shape();
        entry["dtype"] = "f64";
        entry["offset"] = offset;
        entry["count"] = t.numel();
        sidecar["tensors"].push_back(entry);
        bin.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.numel() * sizeof(double)));
        offset += t.numel();
    }
    bin.close();
    write_file(stem + ".json", sidecar.dump(2) + "\n");
}

std::map<std::string, Tensor> load_tensor_archive(const std::string& stem) {
    json sidecar;
    try {
        sidecar = json::parse(read_file(stem + ".json"));
    } catch (const json::parse_error& e) {
        throw InvalidInputError(stem + ".json is not valid JSON: " + std::string(e.what()));
    }
    if (sidecar.value("format", "") != "msgan-tensor-archive")
        throw InvalidInputError(stem + ".json is not a tensor archive sidecar");

    const std::string raw = read_file(stem + ".bin");
    std::map<std::string, Tensor> out;
    for (const auto& entry : sidecar.at("tensors")) {
        const std::string name = entry.at("name").get<std::string>();
        std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
        const std::int64_t offset = entry.at("offset").get<std::int64_t>();
        const std::int64_t count = entry.at("count").get<std::int64_t>();
        if ((offset + count) * static_cast<std::int64_t>(sizeof(double)) >
            static_cast<std::int64_t>(raw.size()))
            throw InvalidInputError(stem + ".bin is shorter than its sidecar claims");
        std::vector<double> data(static_cast<size_t>(count));
        std::memcpy(data.data(), raw.data() + offset * sizeof(double),
                    static_cast<size_t>(count) * sizeof(double));
        out.emplace(name, Tensor::from_data(std::move(shape), std::move(data)));
    }
    return out;
}

std::string fingerprint_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_manifest(const std::string& dir, const CheckpointManifest& m) {
    json j;
    j["format_version"] = m.format_version;
    j["image_fingerprint"] = m.image_fingerprint;
    j["image_file"] = m.image_file;
    j["schedule"] = schedule_to_json(m.schedule);
    j["config"] = json::parse(config_to_json_text(m.config));
    j["scales"] = json::array();
    for (const auto& s : m.scales) {
        json e;
        e["index"] = s.index;
        e["params"] = s.params_stem;
        e["noise"] = s.noise_stem;
        e["sigma"] = s.sigma;
        e["kappa_final"] = s.kappa_final;
        j["scales"].push_back(e);
    }
    j["decision_log"] = m.decision_log;
    j["bound_report"] = m.bound_report;
    j["training_log"] = m.training_log;
    write_file((fs::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

bool manifest_exists(const std::string& dir) {
    return fs::exists(fs::path(dir) / "manifest.json");
}

CheckpointManifest load_manifest(const std::string& dir) {
    const std::string path = (fs::path(dir) / "manifest.json").string();
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw InvalidInputError(path + " is not valid JSON: " + std::string(e.what()));
    }
    CheckpointManifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1)
        throw InvalidInputError("unsupported checkpoint format_version in " + path);
    m.image_fingerprint = j.at("image_fingerprint").get<std::string>();
    m.image_file = j.at("image_file").get<std::string>();
    m.schedule = schedule_from_json(j.at("schedule"));
    m.config = config_from_json_text(j.at("config").dump());
    for (const auto& e : j.at("scales")) {
        CheckpointManifest::ScaleEntry s;
        s.index = e.at("index").get<int>();
        s.params_stem = e.at("params").get<std::string>();
        s.noise_stem = e.at("noise").get<std::string>();
        s.sigma = e.at("sigma").get<double>();
        s.kappa_final = e.at("kappa_final").get<double>();
        m.scales.push_back(s);
    }
    m.decision_log = j.at("decision_log").get<std::string>();
    m.bound_report = j.at("bound_report").get<std::string>();
    m.training_log = j.at("training_log").get<std::string>();
    return m;
}

CheckpointManifest::ScaleEntry save_scale(const std::string& dir, int index,
                                          const TrainedScale& scale) {
    char name[32];
    std::snprintf(name, sizeof(name), "scale_%02d", index);
    fs::create_directories(fs::path(dir) / name);

    CheckpointManifest::ScaleEntry entry;
    entry.index = index;
    entry.params_stem = std::string(name) + "/params";
    entry.noise_stem = std::string(name) + "/noise";
    entry.sigma = scale.sigma;
    entry.kappa_final = scale.kappa_final;

    std::vector<std::pair<std::string, Tensor>> params;
    collect_net("g", scale.g, params);
    collect_net("d", scale.d, params);
    save_tensor_archive((fs::path(dir) / entry.params_stem).string(), params);
    save_tensor_archive((fs::path(dir) / entry.noise_stem).string(),
                        {{"z_fixed", scale.z_fixed}});
    return entry;
}

std::map<int, TrainedScale> load_scales(const std::string& dir,
                                        const CheckpointManifest& m) {
    const int coarsest = m.schedule.num_downsamplings();
    std::map<int, TrainedScale> scales;
    Rng dummy(0);  // shapes only; values are overwritten from the archive
    for (const auto& e : m.scales) {
        if (e.index < 0 || e.index > coarsest)
            throw InvalidInputError("manifest scale index out of range");
        TrainedScale ts;
        const NetSpec spec = spec_for_scale(m.config, e.index, coarsest);
        ts.g = make_generator(spec, dummy);
        ts.d = make_discriminator(spec, dummy);
        auto params = load_tensor_archive((fs::path(dir) / e.params_stem).string());
        restore_net("g", params, ts.g);
        restore_net("d", params, ts.d);
        auto noise = load_tensor_archive((fs::path(dir) / e.noise_stem).string());
        auto it = noise.find("z_fixed");
        if (it == noise.end())
            throw NotFoundError("noise archive lacks z_fixed: " + e.noise_stem);
        ts.z_fixed = it->second;
        ts.sigma = e.sigma;
        ts.kappa_final = e.kappa_final;
        scales.emplace(e.index, std::move(ts));
    }
    // trained scales must form a contiguous coarsest-first run
    int expect = coarsest;
    for (auto it = scales.rbegin(); it != scales.rend(); ++it, --expect)
        if (it->first != expect)
            throw InvalidInputError("checkpoint has a gap in trained scales");
    return scales;
}

Ladder load_ladder(const std::string& dir) {
    if (!manifest_exists(dir)) throw NotFoundError("no manifest.json under " + dir);
    CheckpointManifest m = load_manifest(dir);
    Ladder ladder;
    ladder.schedule = m.schedule;
    ladder.config = m.config;
    if (static_cast<int>(m.scales.size()) != m.schedule.num_levels())
        throw InvalidInputError("checkpoint is incomplete: " +
                                std::to_string(m.scales.size()) + " of " +
                                std::to_string(m.schedule.num_levels()) +
                                " scales trained");
    auto by_index = load_scales(dir, m);
    ladder.scales.resize(by_index.size());
    for (auto& [index, ts] : by_index) ladder.scales[static_cast<size_t>(index)] = std::move(ts);
    return ladder;
}

}  // namespace msgan
