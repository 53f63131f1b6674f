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

#include <map>
#include <string>
#include <vector>

#include "msgan/config.hpp"
#include "msgan/model.hpp"
#include "msgan/pyramid.hpp"

namespace msgan {

// Parameter files are a portable binary tensor archive: `<stem>.bin` holds
// raw little-endian f64 data and `<stem>.json` is a sidecar listing
// name/shape/dtype/offset per tensor. Saving the same tensors twice is
// byte-identical.

void save_tensor_archive(const std::string& stem,
                         const std::vector<std::pair<std::string, Tensor>>& tensors);
std::map<std::string, Tensor> load_tensor_archive(const std::string& stem);

/// A trained scale: generator/discriminator stacks, fixed noise map and
/// noise amplitude, plus the final kappa estimate recorded for the bound
/// recomputation path.
struct TrainedScale {
    NetParams g;
    NetParams d;
    Tensor z_fixed;  // (C,H,W)
    double sigma = 1.0;
    double kappa_final = 0.0;
};

/// Everything inference needs, reconstucted from a checkpoint directory.
struct Ladder {
    ScaleSchedule schedule;
    RunConfig config;
    std::vector<TrainedScale> scales;  // index = scale index, 0 (finest) .. N

    int coarsest() const { return static_cast<int>(scales.size()) - 1; }
};

struct CheckpointManifest {
    int format_version = 1;
    std::string image_fingerprint;  // fnv1a64 over decoded pixels
    std::string image_file = "input.png";
    ScaleSchedule schedule;
    RunConfig config;
    // per-scale archive stems relative to the checkpoint dir, coarsest first
    struct ScaleEntry {
        int index = 0;
        std::string params_stem;
        std::string noise_stem;
        double sigma = 1.0;
        double kappa_final = 0.0;
    };
    std::vector<ScaleEntry> scales;
    std::string decision_log = "decisions.csv";
    std::string bound_report = "bounds.csv";
    std::string training_log = "training.csv";
};

void save_manifest(const std::string& dir, const CheckpointManifest& m);
CheckpointManifest load_manifest(const std::string& dir);
bool manifest_exists(const std::string& dir);

/// Persist one trained scale under `dir` and return its manifest entry.
CheckpointManifest::ScaleEntry save_scale(const std::string& dir, int index,
                                          const TrainedScale& scale);

/// Load the full ladder (all scales listed in the manifest). Missing files
/// fail fast with the path named.
Ladder load_ladder(const std::string& dir);

/// Load whatever scales the manifest lists, keyed by scale index; they must
/// form a contiguous coarsest-first run (resume support).
std::map<int, TrainedScale> load_scales(const std::string& dir,
                                        const CheckpointManifest& m);

std::string fingerprint_hex(std::uint64_t h);

}  // namespace msgan
