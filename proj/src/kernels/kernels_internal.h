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

#ifndef CBMDETECT_KERNELS_KERNELS_INTERNAL_H_
#define CBMDETECT_KERNELS_KERNELS_INTERNAL_H_

#include "cbmdetect/kernels.h"

namespace cbmdetect::kernels {

// Defined in kernels_avx2.cc, which is the only translation unit compiled
// with -mavx2 -mfma. Callers must check the CPU first.
const KernelTable& Avx2Table();

}  // namespace cbmdetect::kernels

#endif  // CBMDETECT_KERNELS_KERNELS_INTERNAL_H_
