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

// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher
// after a CPUID check.
#include <immintrin.h>

#include <algorithm>
#include <vector>

#include "tamp/kernels.hpp"

namespace tamp::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Up to four components share one pass over the tensor row.
template <int kBlock>
void dot_block(const double* row, const double* const* rkr, std::size_t n, double* t) {
  __m256d acc[kBlock];
  for (int c = 0; c < kBlock; ++c) acc[c] = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d y = _mm256_loadu_pd(row + k);
    for (int c = 0; c < kBlock; ++c) acc[c] = _mm256_fmadd_pd(y, _mm256_loadu_pd(rkr[c] + k), acc[c]);
  }
  for (int c = 0; c < kBlock; ++c) {
    double s = hsum(acc[c]);
    for (std::size_t kk = k; kk < n; ++kk) s += row[kk] * rkr[c][kk];
    t[c] = s;
  }
}

void contract_inner(const MttkrpProblem& p) {
  const auto mid = static_cast<std::ptrdiff_t>(p.mid);
  const std::size_t rank = static_cast<std::size_t>(p.rank);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < mid; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::vector<double> acc(rank, 0.0);
    double t[4];
    const double* rkr[4];
    for (std::size_t l = 0; l < p.left; ++l) {
      const double* row = p.y + (l * p.mid + i) * p.right;
      const double* lkr = p.left_kr + l * rank;
      for (std::size_t c0 = 0; c0 < rank; c0 += 4) {
        const std::size_t block = std::min<std::size_t>(4, rank - c0);
        for (std::size_t c = 0; c < block; ++c) rkr[c] = p.right_kr + (c0 + c) * p.right;
        switch (block) {
          case 1: dot_block<1>(row, rkr, p.right, t); break;
          case 2: dot_block<2>(row, rkr, p.right, t); break;
          case 3: dot_block<3>(row, rkr, p.right, t); break;
          default: dot_block<4>(row, rkr, p.right, t); break;
        }
        for (std::size_t c = 0; c < block; ++c) acc[c0 + c] += lkr[c0 + c] * t[c];
      }
    }
    for (std::size_t c = 0; c < rank; ++c) p.out[c * p.mid + i] = acc[c];
  }
}

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
        const double as = p.left_kr[l * rank + c] * p.right_kr[c];
        const __m256d a = _mm256_set1_pd(as);
        double* out = p.out + c * p.mid;
        std::size_t i = begin;
        for (; i + 4 <= end; i += 4) {
          const __m256d o = _mm256_loadu_pd(out + i);
          _mm256_storeu_pd(out + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(row + i), o));
        }
        for (; i < end; ++i) out[i] += as * row[i];
      }
    }
  }
}

}  // namespace

void mttkrp_avx2(const MttkrpProblem& problem) {
  if (problem.right > 1)
    contract_inner(problem);
  else
    contract_outer(problem);
}

}  // namespace tamp::kernels
