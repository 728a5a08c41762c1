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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tamp/kernels.hpp"

namespace tamp {

/// Factor matrices are stored row-major so that the r-vector x_{αi} of
/// one node is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Shape of an order-p tensor with its geometric-mean bookkeeping:
/// N = (∏ N_α)^{1/p} and n_α = N_α / N, so that ∏ n_α = 1.
class TensorShape {
 public:
  TensorShape() = default;

  int order() const { return static_cast<int>(dims_.size()); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(int mode) const { return dims_[static_cast<std::size_t>(mode)]; }

  /// Geometric mean N of the mode sizes.
  double n_geo() const { return n_geo_; }
  /// n_α = N_α / N.
  double ratio(int mode) const { return ratios_[static_cast<std::size_t>(mode)]; }
  const std::vector<double>& ratios() const { return ratios_; }

  /// Total number of entries ∏ N_α.
  std::size_t size() const { return size_; }
  /// Row-major strides (last index fastest).
  const std::vector<std::size_t>& strides() const { return strides_; }

  /// N^{-(p-1)/2}, the scale of one entry of the low-rank signal.
  double signal_scale() const;

  bool operator==(const TensorShape& other) const { return dims_ == other.dims_; }

 private:
  friend TensorShape make_shape(std::vector<std::size_t> dims);

  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::vector<double> ratios_;
  double n_geo_ = 0.0;
  std::size_t size_ = 0;
};

/// Throws Error(kInvalidShape) for an empty list, a zero dimension, or
/// order p < 2.
TensorShape make_shape(std::vector<std::size_t> dims);

/// Dense row-major order-p tensor.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(TensorShape shape);
  /// Throws if the value count does not match the shape or a value is not finite.
  DenseTensor(TensorShape shape, std::vector<double> values);

  const TensorShape& shape() const { return shape_; }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  const double* data() const { return values_.data(); }

  double at(std::span<const std::size_t> index) const;

 private:
  TensorShape shape_;
  std::vector<double> values_;
};

/// Per-mode factor matrices; matrix α is N_α × r with entry (i, ρ) = x_{αi}^ρ.
class FactorSet {
 public:
  FactorSet() = default;
  /// All-zero factors.
  FactorSet(TensorShape shape, int rank);
  /// Throws if any matrix has the wrong size or a non-finite entry.
  FactorSet(TensorShape shape, int rank, std::vector<RowMatrix> factors);

  const TensorShape& shape() const { return shape_; }
  int rank() const { return rank_; }
  int order() const { return shape_.order(); }
  const RowMatrix& factor(int mode) const { return factors_[static_cast<std::size_t>(mode)]; }
  RowMatrix& mutable_factor(int mode) { return factors_[static_cast<std::size_t>(mode)]; }
  const std::vector<RowMatrix>& factors() const { return factors_; }

  bool all_finite() const;

 private:
  TensorShape shape_;
  int rank_ = 0;
  std::vector<RowMatrix> factors_;
};

/// Noisy measurement Y = w + √Δ ε.
struct Observation {
  DenseTensor tensor;
  double delta = 1.0;
};

/// Throws Error(kInvalidParameter) unless delta > 0.
Observation make_observation(DenseTensor tensor, double delta);

/// w_a = N^{-(p-1)/2} Σ_ρ ∏_α x_{α i_α}^ρ.
DenseTensor low_rank_tensor(const FactorSet& factors);

/// Y = w + √Δ z with z i.i.d. standard normal drawn from Rng(seed).
Observation add_noise(const DenseTensor& w, double delta, std::uint64_t seed);

/// Row-wise Khatri-Rao product of the factor rows for modes [first, last),
/// returned as (∏ N_β) × r in row-major index order of those modes.
RowMatrix khatri_rao_rows(const FactorSet& factors, int first, int last);

/// The matricized-tensor-times-Khatri-Rao product with mode `mode` excluded:
/// row i, column ρ = Σ_{a: i_mode = i} Y_a ∏_{β≠mode} x_{β i_β}^ρ.
/// Parallel over output rows only, so results do not depend on the
/// worker count.
RowMatrix mttkrp_exclude(const DenseTensor& y, const FactorSet& est, int mode,
                         kernels::Isa isa = kernels::Isa::kAuto);

}  // namespace tamp
