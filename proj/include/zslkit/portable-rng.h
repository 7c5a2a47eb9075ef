// zslkit/portable-rng.h

// Copyright 2026  zslkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#ifndef ZSLKIT_PORTABLE_RNG_H_
#define ZSLKIT_PORTABLE_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace zsl {

// Seedable generator whose output is identical on every platform.
//
// The engine is std::mt19937_64, whose sequence is fixed by the C++ standard.
// The standard distributions are implementation-defined, so every derived
// quantity is computed here from the raw 64-bit words:
//   Uniform01()   = (word >> 11) * 2^-53
//   Below(n)      = rejection sampling on the largest multiple of n
//   Normal()      = Box-Muller on two Uniform01() draws (cached pair)
//   Shuffle()     = Fisher-Yates from the back, using Below()
// Sub-streams are derived with DeriveSeed(), a SplitMix64 finalizer.
class PortableRng {
 public:
  explicit PortableRng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  double Uniform01();
  /// Uniform integer in [0, n). n must be positive.
  uint64_t Below(uint64_t n);
  double Normal();

  template <class T>
  void Shuffle(std::vector<T> *v) {
    for (size_t i = v->size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Below(i));
      std::swap((*v)[i - 1], (*v)[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Mixes a base seed with a stream index into an independent seed.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

}  // namespace zsl

#endif  // ZSLKIT_PORTABLE_RNG_H_
