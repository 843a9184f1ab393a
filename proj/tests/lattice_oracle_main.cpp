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

// Recomputes the exhaustive lattice minimum for the frozen GA benchmark
// instance and prints the constants to paste into
// tests/support/lattice_instance.hpp.

#include <chrono>
#include <cstdio>

#include "support/lattice_instance.hpp"

int main()
{
  using namespace gaplan::testing;
  const LatticeProblem problem = make_lattice_problem();
  const auto t0 = std::chrono::steady_clock::now();
  const LatticeResult result = lattice_search(problem);
  const double secs =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::printf("lattice points per gene: %d\n", kLatticePointsPerGene);
  std::printf("evaluations: %d\n",
              kLatticePointsPerGene * kLatticePointsPerGene * kLatticePointsPerGene *
                kLatticePointsPerGene);
  std::printf("elapsed: %.2f s\n", secs);
  std::printf("kFrozenLatticeMinCost = %.17g;\n", result.min_cost);
  std::printf("kFrozenLatticeArgmin{%.17g, %.17g, %.17g, %.17g};\n", result.argmin.a1,
              result.argmin.b1, result.argmin.a2, result.argmin.b2);
  return 0;
}
