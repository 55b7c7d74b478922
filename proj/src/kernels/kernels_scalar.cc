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

#include "kernels/kernels_internal.h"

namespace cbmdetect::kernels {
namespace {

double DotScalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void MatMulScalar(const double* m, std::size_t n, const double* v,
                  std::size_t cols, std::size_t stride, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double* o = out + i * stride;
    for (std::size_t c = 0; c < cols; ++c) o[c] = 0.0;
    const double* row = m + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = row[j];
      if (w == 0.0) continue;
      const double* vj = v + j * stride;
      for (std::size_t c = 0; c < cols; ++c) o[c] += w * vj[c];
    }
  }
}

int64_t SignedDotI8Scalar(const int8_t* a, const int8_t* s, std::size_t n) {
  int64_t acc = 0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * s[k];
  return acc;
}

void AxpyScalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace

const KernelTable& Scalar() {
  static const KernelTable table{"scalar", &DotScalar, &MatMulScalar,
                                 &SignedDotI8Scalar, &AxpyScalar};
  return table;
}

}  // namespace cbmdetect::kernels
