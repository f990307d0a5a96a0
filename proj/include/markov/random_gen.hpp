#pragma once

#include <cstdint>
#include <random>

#include "markov/dist.hpp"
#include "markov/kernel.hpp"
#include "markov/machine.hpp"

namespace markov {

/// Deterministic helpers on top of mt19937_64. The standard distribution
/// adaptors are implementation defined, so sampling goes through these
/// instead; results are identical across platforms for a fixed seed.
std::mt19937_64 seeded_rng(std::uint64_t seed);

/// Derives the engine for one trial of a batch; trials can then run in any
/// order (or in parallel) without changing their draws.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Uniform integer in [0, n), n >= 1, by rejection.
int rand_int(std::mt19937_64& rng, int n);

/// Uniform double in [0, 1).
double rand_unit(std::mt19937_64& rng);

/// Standard normal via Box-Muller.
double rand_normal(std::mt19937_64& rng);

/// Random distribution with rational weights (denominator `grain`), full support.
Dist random_dist(std::mt19937_64& rng, const SetPtr& carrier, int grain = 100);

Kernel random_kernel(std::mt19937_64& rng, const SetPtr& source, const SetPtr& target,
                     int grain = 100);

/// Draws an index from a rational distribution.
int sample_dist(std::mt19937_64& rng, const Dist& d);

MealyMachine random_mealy_machine(std::mt19937_64& rng, const SetPtr& inputs,
                                  const SetPtr& outputs, const SetPtr& states, int grain = 100);

/// Transition built as emission(o | state) times a next-state distribution
/// that may depend on everything, so the comb condition holds by construction.
CombMachine random_comb_machine(std::mt19937_64& rng, const SetPtr& inputs,
                                const SetPtr& outputs, const SetPtr& states, int grain = 100);

/// Comb machine whose next state is a function of (input, state, output).
UnifilarMachine random_unifilar_machine(std::mt19937_64& rng, const SetPtr& inputs,
                                        const SetPtr& outputs, const SetPtr& states,
                                        int grain = 100);

}  // namespace markov
