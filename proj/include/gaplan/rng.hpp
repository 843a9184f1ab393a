// Copyright 2026 The gaplan Authors
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

#ifndef GAPLAN_RNG_HPP_
#define GAPLAN_RNG_HPP_

#include <cstdint>
#include <random>

namespace gaplan
{

// Deterministic uniform generator. std::uniform_real_distribution is
// implementation-defined, so the engine output is mapped to doubles by hand:
// identical seeds give identical streams on every platform.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform01() { return (engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  std::uint64_t next_u64() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent per-cycle seeds from a
/// single run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gaplan

#endif  // GAPLAN_RNG_HPP_
