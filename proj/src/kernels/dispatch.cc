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

#include <cstdlib>
#include <cstring>

#include "kernels/kernels_internal.h"

namespace cbmdetect::kernels {
namespace {

bool CpuHasAvx2Fma() {
#if defined(CBMDETECT_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool ForceScalar() {
  const char* env = std::getenv("CBMDETECT_FORCE_SCALAR");
  return env != nullptr && std::strcmp(env, "0") != 0 && *env != '\0';
}

}  // namespace

#if !defined(CBMDETECT_HAVE_AVX2)
const KernelTable& Avx2Table() { return Scalar(); }
#endif

const KernelTable* Avx2() {
  static const bool supported = CpuHasAvx2Fma();
  return supported ? &Avx2Table() : nullptr;
}

const KernelTable& Active() {
  static const KernelTable* table = [] {
    const KernelTable* simd = Avx2();
    return (simd != nullptr && !ForceScalar()) ? simd : &Scalar();
  }();
  return *table;
}

}  // namespace cbmdetect::kernels
