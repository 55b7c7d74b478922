// Copyright 2026 The cbmdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <immintrin.h>

#include "kernels/kernels_internal.h"

namespace cbmdetect::kernels {
namespace {

double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double DotAvx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4),
                           _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  }
  double s = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

void MatMulAvx2(const double* m, std::size_t n, const double* v,
                std::size_t cols, std::size_t stride, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = m + i * n;
    double* o = out + i * stride;
    std::size_t c = 0;
    // Blocks of 16 columns keep four accumulators live across the j loop.
    for (; c + 16 <= cols; c += 16) {
      __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
      __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        const __m256d w = _mm256_set1_pd(row[j]);
        const double* vj = v + j * stride + c;
        a0 = _mm256_fmadd_pd(w, _mm256_loadu_pd(vj), a0);
        a1 = _mm256_fmadd_pd(w, _mm256_loadu_pd(vj + 4), a1);
        a2 = _mm256_fmadd_pd(w, _mm256_loadu_pd(vj + 8), a2);
        a3 = _mm256_fmadd_pd(w, _mm256_loadu_pd(vj + 12), a3);
      }
      _mm256_storeu_pd(o + c, a0);
      _mm256_storeu_pd(o + c + 4, a1);
      _mm256_storeu_pd(o + c + 8, a2);
      _mm256_storeu_pd(o + c + 12, a3);
    }
    for (; c + 4 <= cols; c += 4) {
      __m256d a0 = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        a0 = _mm256_fmadd_pd(_mm256_set1_pd(row[j]),
                             _mm256_loadu_pd(v + j * stride + c), a0);
      }
      _mm256_storeu_pd(o + c, a0);
    }
    for (; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j * stride + c];
      o[c] = s;
    }
  }
}

int64_t SignedDotI8Avx2(const int8_t* a, const int8_t* s, std::size_t n) {
  const __m256i ones = _mm256_set1_epi8(1);
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = _mm256_setzero_si256();
  std::size_t k = 0;
  std::size_t blocks = 0;
  for (; k + 32 <= n; k += 32, ++blocks) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + k));
    const __m256i vs = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(s + k));
    // a * sign(s) lies in {-1, 0, 1}; shifted by one it is a byte in {0, 1, 2}
    // and SAD against zero sums it exactly.
    const __m256i biased = _mm256_add_epi8(_mm256_sign_epi8(va, vs), ones);
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(biased, zero));
  }
  alignas(32) int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  int64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3] -
                  static_cast<int64_t>(32 * blocks);
  for (; k < n; ++k) total += a[k] * s[k];
  return total;
}

void AxpyAvx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k),
                                            _mm256_loadu_pd(y + k)));
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace

const KernelTable& Avx2Table() {
  static const KernelTable table{"avx2", &DotAvx2, &MatMulAvx2,
                                 &SignedDotI8Avx2, &AxpyAvx2};
  return table;
}

}  // namespace cbmdetect::kernels
