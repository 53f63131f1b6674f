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

#include "msgan/tensor.hpp"

namespace msgan {

/// Decode PNG/JPEG into a (3,H,W) tensor in [-1,1]; grayscale inputs are
/// replicated across channels.
Tensor load_image(const std::string& path);

/// Encode to PNG (8-bit RGB); values are clamped to [-1,1] first.
void save_image(const std::string& path, const Tensor& image);

/// Fingerprint over the decoded 8-bit pixels, stable across re-encodes.
std::uint64_t image_fingerprint(const Tensor& image);

/// [-1,1] <-> [0,255] mappings used at the I/O boundary.
double to_byte_scale(double v);
double from_byte_scale(double v);

}  // namespace msgan
