// Copyright 2026 The tamp Authors. All Rights Reserved.
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

#include <filesystem>
#include <optional>

#include "tamp/tensor.hpp"

namespace tamp::io {

/// Tensor file: 16-byte magic ("TAMPDT01" then eight NUL bytes), a one-line
/// JSON header {"dims":[...],"dtype":"f64le"[,"delta":Δ]}, '\n', then the
/// row-major payload as little-endian IEEE-754 doubles.
inline constexpr char kTensorMagic[16] = {'T', 'A', 'M', 'P', 'D', 'T', '0', '1', 0, 0, 0, 0, 0, 0, 0, 0};

struct TensorFile {
  DenseTensor tensor;
  std::optional<double> delta;
};

void write_tensor(const std::filesystem::path& path, const DenseTensor& tensor,
                  std::optional<double> delta = std::nullopt);
TensorFile read_tensor(const std::filesystem::path& path);

/// factors_mode<α>.csv for α = 1..p, one row per index, r columns.
std::filesystem::path factor_file(const std::filesystem::path& dir, int mode);
void write_factors(const std::filesystem::path& dir, const FactorSet& factors);
/// Reads p files from `dir`; all must share the rank.
FactorSet read_factors(const std::filesystem::path& dir, const TensorShape& shape);

void write_matrix_csv(const std::filesystem::path& path, const RowMatrix& m);
RowMatrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace tamp::io
