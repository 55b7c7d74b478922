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

#ifndef CBMDETECT_RNG_H_
#define CBMDETECT_RNG_H_

#include <cstdint>
#include <limits>

namespace cbmdetect {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Keyed hash of up to three counters. Every random draw in the library is
// derived from one of these keys, so results never depend on evaluation order
// or thread scheduling.
constexpr uint64_t HashKey(uint64_t seed, uint64_t a, uint64_t b = 0,
                           uint64_t c = 0) {
  uint64_t h = Mix64(seed ^ 0x6a09e667f3bcc908ULL);
  h = Mix64(h ^ a);
  h = Mix64(h ^ (b + 0x3c6ef372fe94f82bULL));
  return Mix64(h ^ (c + 0xa54ff53a5f1d36f1ULL));
}

// Maps the top 53 bits to [0, 1).
constexpr double ToUnit(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform draw for the unordered pair (i, j) under `seed`.
constexpr double EdgeUniform(uint64_t seed, uint64_t i, uint64_t j) {
  return ToUnit(HashKey(seed, i, j, 0x45444745ULL));
}

// Counter-based generator: the k-th output is HashKey(key, k). Cheap to copy,
// and Split() derives independent child streams.
class CounterRng {
 public:
  using result_type = uint64_t;

  explicit CounterRng(uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return HashKey(key_, counter_++, 0x52ULL); }

  // [0, 1)
  double Uniform() { return ToUnit((*this)()); }

  // (0, 1)
  double UniformOpen() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  CounterRng Split(uint64_t tag) const {
    return CounterRng(HashKey(key_, tag, 0x53504c4954ULL));
  }

  uint64_t key() const { return key_; }
  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace cbmdetect

#endif  // CBMDETECT_RNG_H_
