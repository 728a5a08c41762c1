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

#include "tamp/tensor.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tamp/error.hpp"
#include "tamp/rng.hpp"

namespace tamp {

TensorShape make_shape(std::vector<std::size_t> dims) {
  if (dims.empty()) throw Error(ErrorCode::kInvalidShape, "empty dimension list");
  if (dims.size() < 2) throw Error(ErrorCode::kInvalidShape, "tensor order must be at least 2");
  for (std::size_t d : dims)
    if (d == 0) throw Error(ErrorCode::kInvalidShape, "dimensions must be positive");

  TensorShape s;
  s.dims_ = std::move(dims);
  const std::size_t p = s.dims_.size();
  s.strides_.assign(p, 1);
  for (std::size_t a = p - 1; a > 0; --a) s.strides_[a - 1] = s.strides_[a] * s.dims_[a];
  s.size_ = s.strides_[0] * s.dims_[0];

  // Mean of logs keeps ∏ n_α = 1 to rounding regardless of the product's size.
  long double log_sum = 0.0L;
  for (std::size_t d : s.dims_) log_sum += std::log(static_cast<long double>(d));
  const long double mean_log = log_sum / static_cast<long double>(p);
  s.n_geo_ = static_cast<double>(std::exp(mean_log));
  s.ratios_.resize(p);
  for (std::size_t a = 0; a < p; ++a)
    s.ratios_[a] = static_cast<double>(std::exp(std::log(static_cast<long double>(s.dims_[a])) - mean_log));
  return s;
}

double TensorShape::signal_scale() const {
  return std::pow(n_geo_, -0.5 * static_cast<double>(order() - 1));
}

DenseTensor::DenseTensor(TensorShape shape) : shape_(std::move(shape)), values_(shape_.size(), 0.0) {}

DenseTensor::DenseTensor(TensorShape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_.size())
    throw Error(ErrorCode::kInvalidArgument, "tensor has " + std::to_string(values_.size()) +
                                                 " values but shape needs " + std::to_string(shape_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "tensor values must be finite");
}

double DenseTensor::at(std::span<const std::size_t> index) const {
  if (index.size() != static_cast<std::size_t>(shape_.order()))
    throw Error(ErrorCode::kInvalidArgument, "index order mismatch");
  std::size_t offset = 0;
  for (std::size_t a = 0; a < index.size(); ++a) {
    if (index[a] >= shape_.dims()[a]) throw Error(ErrorCode::kInvalidArgument, "index out of range");
    offset += index[a] * shape_.strides()[a];
  }
  return values_[offset];
}

FactorSet::FactorSet(TensorShape shape, int rank) : shape_(std::move(shape)), rank_(rank) {
  if (rank < 1) throw Error(ErrorCode::kInvalidArgument, "rank must be at least 1");
  factors_.reserve(static_cast<std::size_t>(shape_.order()));
  for (int a = 0; a < shape_.order(); ++a)
    factors_.push_back(RowMatrix::Zero(static_cast<Eigen::Index>(shape_.dim(a)), rank));
}

FactorSet::FactorSet(TensorShape shape, int rank, std::vector<RowMatrix> factors)
    : shape_(std::move(shape)), rank_(rank), factors_(std::move(factors)) {
  if (rank < 1) throw Error(ErrorCode::kInvalidArgument, "rank must be at least 1");
  if (factors_.size() != static_cast<std::size_t>(shape_.order()))
    throw Error(ErrorCode::kInvalidArgument, "need one factor matrix per mode");
  for (int a = 0; a < shape_.order(); ++a) {
    const RowMatrix& f = factors_[static_cast<std::size_t>(a)];
    if (f.rows() != static_cast<Eigen::Index>(shape_.dim(a)) || f.cols() != rank)
      throw Error(ErrorCode::kInvalidArgument, "factor matrix " + std::to_string(a) + " has wrong size");
  }
  if (!all_finite()) throw Error(ErrorCode::kInvalidArgument, "factor entries must be finite");
}

bool FactorSet::all_finite() const {
  for (const RowMatrix& f : factors_)
    if (!f.allFinite()) return false;
  return true;
}

Observation make_observation(DenseTensor tensor, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw Error(ErrorCode::kInvalidParameter, "noise variance must be positive");
  return Observation{std::move(tensor), delta};
}

RowMatrix khatri_rao_rows(const FactorSet& factors, int first, int last) {
  const int r = factors.rank();
  RowMatrix kr = RowMatrix::Ones(1, r);
  for (int b = first; b < last; ++b) {
    const RowMatrix& f = factors.factor(b);
    RowMatrix next(kr.rows() * f.rows(), r);
    for (Eigen::Index l = 0; l < kr.rows(); ++l)
      for (Eigen::Index j = 0; j < f.rows(); ++j)
        next.row(l * f.rows() + j) = kr.row(l).cwiseProduct(f.row(j));
    kr = std::move(next);
  }
  return kr;
}

DenseTensor low_rank_tensor(const FactorSet& factors) {
  const TensorShape& shape = factors.shape();
  const int p = shape.order();
  // Row-major layout: entry (l, k) with l over modes 0..p-2 and k over the last mode.
  const RowMatrix left = khatri_rao_rows(factors, 0, p - 1);
  const RowMatrix& last = factors.factor(p - 1);
  RowMatrix w = shape.signal_scale() * (left * last.transpose());
  std::vector<double> values(w.data(), w.data() + w.size());
  return DenseTensor(shape, std::move(values));
}

Observation add_noise(const DenseTensor& w, double delta, std::uint64_t seed) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw Error(ErrorCode::kInvalidParameter, "noise variance must be positive");
  Rng rng(seed);
  const double sd = std::sqrt(delta);
  std::vector<double> values(w.values().begin(), w.values().end());
  for (double& v : values) v += sd * rng.normal();
  return Observation{DenseTensor(w.shape(), std::move(values)), delta};
}

RowMatrix mttkrp_exclude(const DenseTensor& y, const FactorSet& est, int mode, kernels::Isa isa) {
  const TensorShape& shape = y.shape();
  if (!(est.shape() == shape)) throw Error(ErrorCode::kInvalidArgument, "factor shape does not match tensor");
  if (mode < 0 || mode >= shape.order()) throw Error(ErrorCode::kInvalidArgument, "mode out of range");

  const int r = est.rank();
  const RowMatrix left = khatri_rao_rows(est, 0, mode);
  const RowMatrix right = khatri_rao_rows(est, mode + 1, shape.order());
  // Component-major copy so each component's right Khatri-Rao column is contiguous.
  const Eigen::MatrixXd right_cols = right;  // column-major: rank blocks of length `right`

  Eigen::MatrixXd out_cols(static_cast<Eigen::Index>(shape.dim(mode)), r);  // column-major: rank × mid
  kernels::MttkrpProblem problem;
  problem.y = y.data();
  problem.left = static_cast<std::size_t>(left.rows());
  problem.mid = shape.dim(mode);
  problem.right = static_cast<std::size_t>(right.rows());
  problem.rank = r;
  problem.left_kr = left.data();
  problem.right_kr = right_cols.data();
  problem.out = out_cols.data();
  kernels::mttkrp(problem, isa);
  return out_cols;
}

}  // namespace tamp
