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

#include <algorithm>
#include <vector>

#include "tamp/kernels.hpp"

namespace tamp::kernels {

namespace {

// right > 1: each output row i is a sum over l of left_kr[l] ⊙ (Y[l,i,:] · right_kr).
void contract_inner(const MttkrpProblem& p) {
  const auto mid = static_cast<std::ptrdiff_t>(p.mid);
  const std::size_t rank = static_cast<std::size_t>(p.rank);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < mid; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::vector<double> acc(rank, 0.0);
    for (std::size_t l = 0; l < p.left; ++l) {
      const double* row = p.y + (l * p.mid + i) * p.right;
      const double* lkr = p.left_kr + l * rank;
      for (std::size_t c = 0; c < rank; ++c) {
        const double* rkr = p.right_kr + c * p.right;
        double t = 0.0;
        for (std::size_t k = 0; k < p.right; ++k) t += row[k] * rkr[k];
        acc[c] += lkr[c] * t;
      }
    }
    for (std::size_t c = 0; c < rank; ++c) p.out[c * p.mid + i] = acc[c];
  }
}

// right == 1: out[c][i] = right_kr[c] Σ_l left_kr[l][c] Y[l,i], an axpy sweep along i.
void contract_outer(const MttkrpProblem& p) {
  const std::size_t rank = static_cast<std::size_t>(p.rank);
  constexpr std::size_t kChunk = 256;
  const auto chunks = static_cast<std::ptrdiff_t>((p.mid + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ch = 0; ch < chunks; ++ch) {
    const std::size_t begin = static_cast<std::size_t>(ch) * kChunk;
    const std::size_t end = std::min(p.mid, begin + kChunk);
    for (std::size_t c = 0; c < rank; ++c)
      std::fill(p.out + c * p.mid + begin, p.out + c * p.mid + end, 0.0);
    for (std::size_t l = 0; l < p.left; ++l) {
      const double* row = p.y + l * p.mid;
      for (std::size_t c = 0; c < rank; ++c) {
        const double a = p.left_kr[l * rank + c] * p.right_kr[c];
        double* out = p.out + c * p.mid;
        for (std::size_t i = begin; i < end; ++i) out[i] += a * row[i];
      }
    }
  }
}

}  // namespace

void mttkrp_scalar(const MttkrpProblem& problem) {
  if (problem.right > 1)
    contract_inner(problem);
  else
    contract_outer(problem);
}

}  // namespace tamp::kernels
