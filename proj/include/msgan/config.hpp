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

#pragma once

#include <cstdint>
#include <string>

#include "msgan/attacks.hpp"
#include "msgan/losses.hpp"

namespace msgan {

struct PyramidConfig {
    int min_size_px = 25;
    int max_size_px = 250;
    double r_target = 4.0 / 3.0;
};

struct ModelConfig {
    int n_blocks = 5;
    int base_channels = 32;
    int kernel = 3;
};

struct TrainerConfig {
    double lr_g = 1e-4;
    double lr_d = 4e-4;  // TTUR: faster critic
    double adam_beta1 = 0.5;
    double adam_beta2 = 0.999;
    int iters_per_scale = 2000;
    int d_steps = 3;
    int g_steps = 3;
    std::uint64_t seed = 0;
    int log_every = 50;
    int bound_every = 500;
    double noise_amp_factor = 0.1;
    double noise_amp_floor = 1e-4;
};

struct BoundsConfig {
    double gamma = 1.0;  // margin
    double beta = 0.05;  // confidence
};

/// Whole-run configuration; serialized into checkpoint manifests as a flat
/// dotted-key JSON document. CLI flags override file values.
struct RunConfig {
    PyramidConfig pyramid;
    ModelConfig model;
    LossWeights losses;
    AttackConfig attack;
    TrainerConfig trainer;
    BoundsConfig bounds;

    void validate() const;  // throws ConfigError
};

RunConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const RunConfig& cfg);
RunConfig load_config_file(const std::string& path);

/// Apply one "dotted.key=value" override.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace msgan
