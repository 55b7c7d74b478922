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

#ifndef CBMDETECT_KERNELS_H_
#define CBMDETECT_KERNELS_H_

// Dense arithmetic inner loops used by the recovery solvers and the
// likelihood code. Each kernel has a scalar reference implementation and,
// when the build and the CPU allow it, an AVX2/FMA variant. Active() picks
// one table at first use; CBMDETECT_FORCE_SCALAR=1 in the environment pins
// the scalar table.

#include <cstddef>
#include <cstdint>

namespace cbmdetect::kernels {

struct KernelTable {
  const char* name;

  // sum_k a[k] * b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // out = m * v where m is a dense row-major n x n matrix and v, out are
  // n x cols row-major with row stride `stride` (stride >= cols).
  void (*mat_mul)(const double* m, std::size_t n, const double* v,
                  std::size_t cols, std::size_t stride, double* out);

  // sum_k a[k] * s[k] for a[k] in {-1, 0, +1} and s[k] in {-1, +1}.
  int64_t (*signed_dot_i8)(const int8_t* a, const int8_t* s, std::size_t n);

  // y[k] += alpha * x[k]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& Scalar();

// nullptr when the AVX2 variants were not compiled in or the CPU lacks
// AVX2/FMA.
const KernelTable* Avx2();

const KernelTable& Active();

}  // namespace cbmdetect::kernels

#endif  // CBMDETECT_KERNELS_H_
