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

#include "msgan/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>

#include "msgan/common.hpp"

namespace msgan {

namespace {

using nlohmann::json;

// One registry drives file parsing, serialization and CLI overrides so keys
// cannot drift apart.
struct Key {
    std::function<json(const RunConfig&)> get;
    std::function<void(RunConfig&, const json&)> set;
};

const std::map<std::string, Key>& registry() {
    static const std::map<std::string, Key> keys = [] {
        std::map<std::string, Key> k;
        auto add = [&k](const std::string& name, std::function<json(const RunConfig&)> get,
                        std::function<void(RunConfig&, const json&)> set) {
            k[name] = Key{std::move(get), std::move(set)};
        };

#define MSGAN_KEY(NAME, FIELD, TYPE)                                              \
    add(NAME, [](const RunConfig& c) { return json(c.FIELD); },                   \
        [](RunConfig& c, const json& v) { c.FIELD = v.get<TYPE>(); })

        MSGAN_KEY("pyramid.min_size_px", pyramid.min_size_px, int);
        MSGAN_KEY("pyramid.max_size_px", pyramid.max_size_px, int);
        MSGAN_KEY("pyramid.r_target", pyramid.r_target, double);
        MSGAN_KEY("model.n_blocks", model.n_blocks, int);
        MSGAN_KEY("model.base_channels", model.base_channels, int);
        MSGAN_KEY("model.kernel", model.kernel, int);
        MSGAN_KEY("losses.alpha_rec", losses.alpha_rec, double);
        MSGAN_KEY("losses.lambda_gp", losses.lambda_gp, double);
        MSGAN_KEY("attack.radius", attack.radius, double);
        MSGAN_KEY("attack.alpha", attack.step_alpha, double);
        MSGAN_KEY("attack.steps", attack.steps, int);
        MSGAN_KEY("attack.kappa_window", attack.kappa_window, int);
        MSGAN_KEY("attack.kappa_floor", attack.kappa_floor, double);
        MSGAN_KEY("attack.w_sigma_refresh", attack.w_sigma_refresh, int);
        MSGAN_KEY("trainer.lr_g", trainer.lr_g, double);
        MSGAN_KEY("trainer.lr_d", trainer.lr_d, double);
        MSGAN_KEY("trainer.adam_beta1", trainer.adam_beta1, double);
        MSGAN_KEY("trainer.adam_beta2", trainer.adam_beta2, double);
        MSGAN_KEY("trainer.iters_per_scale", trainer.iters_per_scale, int);
        MSGAN_KEY("trainer.d_steps", trainer.d_steps, int);
        MSGAN_KEY("trainer.g_steps", trainer.g_steps, int);
        MSGAN_KEY("trainer.seed", trainer.seed, std::uint64_t);
        MSGAN_KEY("trainer.log_every", trainer.log_every, int);
        MSGAN_KEY("trainer.bound_every", trainer.bound_every, int);
        MSGAN_KEY("trainer.noise_amp_factor", trainer.noise_amp_factor, double);
        MSGAN_KEY("trainer.noise_amp_floor", trainer.noise_amp_floor, double);
        MSGAN_KEY("bounds.gamma", bounds.gamma, double);
        MSGAN_KEY("bounds.beta", bounds.beta, double);
#undef MSGAN_KEY

        add("attack.mode",
            [](const RunConfig& c) { return json(to_string(c.attack.mode)); },
            [](RunConfig& c, const json& v) {
                c.attack.mode = attack_mode_from_string(v.get<std::string>());
            });
        add("attack.site",
            [](const RunConfig& c) { return json(to_string(c.attack.site)); },
            [](RunConfig& c, const json& v) {
                c.attack.site = attack_site_from_string(v.get<std::string>());
            });
        return k;
    }();
    return keys;
}

}  // namespace

void RunConfig::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(pyramid.min_size_px >= 8, "pyramid.min_size_px must be >= 8");
    require(pyramid.max_size_px >= pyramid.min_size_px,
            "pyramid.max_size_px must be >= min_size_px");
    require(pyramid.r_target > 1.0, "pyramid.r_target must exceed 1");
    require(model.n_blocks >= 3, "model.n_blocks must be >= 3");
    require(model.base_channels >= 1, "model.base_channels must be >= 1");
    require(model.kernel >= 1 && model.kernel % 2 == 1, "model.kernel must be odd");
    require(losses.alpha_rec >= 0.0 && std::isfinite(losses.alpha_rec),
            "losses.alpha_rec must be finite and non-negative");
    require(losses.lambda_gp >= 0.0 && std::isfinite(losses.lambda_gp),
            "losses.lambda_gp must be finite and non-negative");
    require(attack.radius > 0.0, "attack.radius must be positive");
    require(attack.step_alpha > 0.0, "attack.alpha must be positive");
    require(attack.steps >= 1, "attack.steps must be >= 1");
    require(attack.kappa_window >= 1, "attack.kappa_window must be >= 1");
    require(attack.w_sigma_refresh >= 1, "attack.w_sigma_refresh must be >= 1");
    require(trainer.lr_g > 0.0 && trainer.lr_d > 0.0, "learning rates must be positive");
    require(trainer.iters_per_scale >= 0, "trainer.iters_per_scale must be >= 0");
    require(trainer.d_steps >= 1 && trainer.g_steps >= 1, "step counts must be >= 1");
    require(trainer.log_every >= 1 && trainer.bound_every >= 1,
            "logging cadences must be >= 1");
    require(bounds.gamma > 0.0, "bounds.gamma must be positive");
    require(bounds.beta > 0.0 && bounds.beta < 1.0, "bounds.beta must lie in (0,1)");
}

RunConfig config_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    RunConfig cfg;
    const auto& reg = registry();
    for (const auto& [key, value] : doc.items()) {
        auto it = reg.find(key);
        if (it == reg.end()) throw ConfigError("unknown config key: " + key);
        try {
            it->second.set(cfg, value);
        } catch (const json::exception& e) {
            throw ConfigError("bad value for " + key + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json_text(const RunConfig& cfg) {
    json doc = json::object();
    for (const auto& [key, accessor] : registry()) doc[key] = accessor.get(cfg);
    return doc.dump(2);
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("config file not found: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json_text(text);
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto& reg = registry();
    auto it = reg.find(key);
    if (it == reg.end()) throw ConfigError("unknown config key: " + key);
    json v;
    try {
        v = json::parse(value);  // numbers / booleans
    } catch (const json::parse_error&) {
        v = json(value);  // bare strings (e.g. attack.mode=adaptive)
    }
    try {
        it->second.set(cfg, v);
    } catch (const json::exception& e) {
        throw ConfigError("bad value for " + key + ": " + e.what());
    }
    cfg.validate();
}

}  // namespace msgan
