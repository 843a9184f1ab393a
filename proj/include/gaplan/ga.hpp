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

#ifndef GAPLAN_GA_HPP_
#define GAPLAN_GA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gaplan/cost.hpp"
#include "gaplan/rng.hpp"
#include "gaplan/vehicle.hpp"

namespace gaplan
{

// A candidate encodes both input channels as linear ramps over the horizon:
// u1[k] = a1*k + b1, u2[k] = a2*k + b2.
struct Candidate
{
  double a1 = 0.0;
  double b1 = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
};

struct GaConfig
{
  int n_pop = 40;   // >= 11: 1 elite + 9 variational + >= 1 random
  int n_gen = 25;
  double var = 0.10;            // relative variation of the seeded intercepts
  double lim_u1 = 0.5;          // search-space input limits (coincident with
  double lim_u2 = 5000.0;       // the input bounds)
  double beta_th = 0.9;         // mutation fires when beta >= beta_th
  double alpha_mut_low = -0.2;  // multiplicative mutation range
  double alpha_mut_high = 0.2;
  std::uint64_t rng_seed = 0;
  bool perturb_slopes = false;  // variational seeding of the a-genes too

  void validate() const
  {
    if (n_pop < 11) {
      throw std::invalid_argument("GaConfig: n_pop must be >= 11");
    }
    if (n_gen < 1) {
      throw std::invalid_argument("GaConfig: n_gen must be >= 1");
    }
    if (beta_th < 0.0 || beta_th > 1.0) {
      throw std::invalid_argument("GaConfig: beta_th must lie in [0, 1]");
    }
    if (alpha_mut_low > alpha_mut_high) {
      throw std::invalid_argument("GaConfig: empty mutation range");
    }
    if (!(var >= 0.0) || !(lim_u1 > 0.0) || !(lim_u2 > 0.0)) {
      throw std::invalid_argument("GaConfig: var/lim_u must be non-negative/positive");
    }
  }
};

struct GaSolution
{
  Candidate best;
  double best_cost = std::numeric_limits<double>::max();
  std::vector<ControlInput> input_sequence;
  std::vector<double> fitness_history;    // best fitness per generation
  std::vector<double> mean_cost_history;  // mean population cost per generation
};

inline void decode_into(const Candidate & c, std::span<ControlInput> out)
{
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].u1 = c.a1 * static_cast<double>(k) + c.b1;
    out[k].u2 = c.a2 * static_cast<double>(k) + c.b2;
  }
}

inline std::vector<ControlInput> decode(const Candidate & c, int n_steps)
{
  if (n_steps < 1) {
    throw std::invalid_argument("decode: need at least one step");
  }
  std::vector<ControlInput> seq(n_steps);
  decode_into(c, seq);
  return seq;
}

/// Re-anchors a previous cycle's ramp by one control step.
inline Candidate shift_warm_start(const Candidate & c)
{
  return {c.a1, c.b1 + c.a1, c.a2, c.b2 + c.a2};
}

namespace detail
{
/// Relative perturbation with an additive floor so a zero gene still explores.
inline double perturb(double value, int e, double var, double lim)
{
  if (std::abs(value) < 1e-9) {
    return value + e * 0.02 * lim;
  }
  return value * (1.0 + e * var);
}

/// Slots out[1..9]: all combinations of {-var, 0, +var} applied to the
/// intercepts of `seed` (outer loop over b1, inner over b2).
inline void fill_variational(
  std::vector<Candidate> & out, const Candidate & seed, const GaConfig & cfg)
{
  std::size_t slot = 1;
  for (int e1 = -1; e1 <= 1; ++e1) {
    for (int e2 = -1; e2 <= 1; ++e2) {
      Candidate c = seed;
      c.b1 = perturb(seed.b1, e1, cfg.var, cfg.lim_u1);
      c.b2 = perturb(seed.b2, e2, cfg.var, cfg.lim_u2);
      if (cfg.perturb_slopes) {
        c.a1 = perturb(seed.a1, e1, cfg.var, cfg.lim_u1);
        c.a2 = perturb(seed.a2, e2, cfg.var, cfg.lim_u2);
      }
      out[slot++] = c;
    }
  }
}
}  // namespace detail

/// Initial population: warm start (or the zero candidate), nine variational
/// neighbours of it, and random candidates drawn inside the search box. A
/// random ramp interpolates between a start value and an end value both
/// sampled in [-lim, +lim], so the whole decoded sequence stays inside the
/// box.
inline std::vector<Candidate> init_population(
  const std::optional<Candidate> & prev, const GaConfig & cfg, const HorizonSpec & horizon,
  Rng & rng)
{
  std::vector<Candidate> pop(cfg.n_pop);
  pop[0] = prev.value_or(Candidate{});
  detail::fill_variational(pop, pop[0], cfg);
  const double n = horizon.n;
  for (int i = 10; i < cfg.n_pop; ++i) {
    Candidate c;
    c.b1 = rng.uniform(-1.0, 1.0) * cfg.lim_u1;
    c.a1 = (rng.uniform(-1.0, 1.0) * cfg.lim_u1 - c.b1) / n;
    c.b2 = rng.uniform(-1.0, 1.0) * cfg.lim_u2;
    c.a2 = (rng.uniform(-1.0, 1.0) * cfg.lim_u2 - c.b2) / n;
    pop[i] = c;
  }
  return pop;
}

/// Reciprocal fitness; the cost is strictly positive so this is finite.
inline double candidate_fitness(double cost) { return 1.0 / std::max(cost, 1e-300); }

inline double fitness(const Candidate & c, const VehicleState & x0, const CostContext & ctx)
{
  std::vector<ControlInput> seq(ctx.horizon.n);
  decode_into(c, seq);
  return candidate_fitness(total_cost(x0, seq, ctx));
}

/// Roulette-wheel selection: `count` i.i.d. draws with probability
/// proportional to fitness share.
inline std::vector<int> roulette_select(std::span<const double> fitnesses, int count, Rng & rng)
{
  if (fitnesses.empty()) {
    throw std::invalid_argument("roulette_select: empty population");
  }
  std::vector<double> cum(fitnesses.size());
  std::partial_sum(fitnesses.begin(), fitnesses.end(), cum.begin());
  const double total = cum.back();
  std::vector<int> picked(count);
  for (int i = 0; i < count; ++i) {
    const double r = rng.uniform01();
    if (!(total > 0.0) || !std::isfinite(total)) {
      picked[i] = std::min<int>(static_cast<int>(r * fitnesses.size()), fitnesses.size() - 1);
      continue;
    }
    const auto it = std::upper_bound(cum.begin(), cum.end(), r * total);
    picked[i] = std::min<int>(it - cum.begin(), fitnesses.size() - 1);
  }
  return picked;
}

/// Builds the next population: elitism in slot 0, variational neighbours of
/// the best in slots 1..9, then pairwise continuous crossover of the parents.
inline std::vector<Candidate> crossover(
  std::span<const Candidate> parents, const Candidate & best, const GaConfig & cfg, Rng & rng)
{
  const int n_children = cfg.n_pop - 10;
  if (static_cast<int>(parents.size()) < n_children) {
    throw std::invalid_argument("crossover: not enough parents");
  }
  std::vector<Candidate> next(cfg.n_pop);
  next[0] = best;
  detail::fill_variational(next, best, cfg);

  int filled = 10;
  std::size_t pi = 0;
  while (filled < cfg.n_pop) {
    const Candidate & p1 = parents[pi % parents.size()];
    const Candidate & p2 = parents[(pi + 1) % parents.size()];
    pi += 2;
    Candidate c1;
    Candidate c2;
    const auto blend = [&rng](double x1, double x2, double & y1, double & y2) {
      const double alpha = rng.uniform01();
      y1 = alpha * x1 + (1.0 - alpha) * x2;
      y2 = (1.0 - alpha) * x1 + alpha * x2;
    };
    blend(p1.a1, p2.a1, c1.a1, c2.a1);
    blend(p1.b1, p2.b1, c1.b1, c2.b1);
    blend(p1.a2, p2.a2, c1.a2, c2.a2);
    blend(p1.b2, p2.b2, c1.b2, c2.b2);
    next[filled++] = c1;
    if (filled < cfg.n_pop) {
      next[filled++] = c2;
    }
  }
  return next;
}

/// Multiplicative threshold mutation; slot 0 (the elite) is never touched.
inline void mutate(std::vector<Candidate> & pop, const GaConfig & cfg, Rng & rng)
{
  const auto maybe_mutate = [&](double & gene) {
    const double beta = rng.uniform01();
    if (beta >= cfg.beta_th) {
      gene *= 1.0 + rng.uniform(cfg.alpha_mut_low, cfg.alpha_mut_high);
    }
  };
  for (std::size_t i = 1; i < pop.size(); ++i) {
    maybe_mutate(pop[i].a1);
    maybe_mutate(pop[i].b1);
    maybe_mutate(pop[i].a2);
    maybe_mutate(pop[i].b2);
  }
}

/// One full GA solve. Deterministic for a given seed: the single RNG stream
/// is consumed in a fixed order (init randoms, then per generation the
/// selection draws, crossover alphas, mutation betas/alphas).
inline GaSolution solve(
  const VehicleState & x0, const std::optional<Candidate> & prev, const CostContext & ctx,
  const GaConfig & cfg)
{
  cfg.validate();
  Rng rng(cfg.rng_seed);
  std::vector<Candidate> pop = init_population(prev, cfg, ctx.horizon, rng);

  GaSolution sol;
  sol.fitness_history.reserve(cfg.n_gen);
  sol.mean_cost_history.reserve(cfg.n_gen);

  std::vector<double> costs(cfg.n_pop);
  std::vector<double> fits(cfg.n_pop);
  std::vector<ControlInput> seq(ctx.horizon.n);

  const int n_children = cfg.n_pop - 10;
  const int n_parents = 2 * ((n_children + 1) / 2);

  for (int gen = 0; gen < cfg.n_gen; ++gen) {
    int best_idx = 0;
    double mean = 0.0;
    for (int i = 0; i < cfg.n_pop; ++i) {
      decode_into(pop[i], seq);
      costs[i] = total_cost(x0, seq, ctx);
      fits[i] = candidate_fitness(costs[i]);
      mean += costs[i];
      if (costs[i] < costs[best_idx]) {
        best_idx = i;
      }
    }
    if (costs[best_idx] < sol.best_cost) {
      sol.best_cost = costs[best_idx];
      sol.best = pop[best_idx];
    }
    sol.fitness_history.push_back(fits[best_idx]);
    sol.mean_cost_history.push_back(mean / cfg.n_pop);

    const std::vector<int> idx = roulette_select(fits, n_parents, rng);
    std::vector<Candidate> parents(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      parents[i] = pop[idx[i]];
    }
    pop = crossover(parents, pop[best_idx], cfg, rng);
    mutate(pop, cfg, rng);
  }

  sol.input_sequence = decode(sol.best, ctx.horizon.n);
  return sol;
}

}  // namespace gaplan

#endif  // GAPLAN_GA_HPP_
