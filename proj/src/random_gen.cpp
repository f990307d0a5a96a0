#include "markov/random_gen.hpp"

#include <cmath>
#include <map>
#include <variant>

#include "markov/errors.hpp"

namespace markov {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(trial)));
}

int rand_int(std::mt19937_64& rng, int n) {
    if (n <= 0) throw std::invalid_argument("rand_int needs a positive bound");
    std::uint64_t un = static_cast<std::uint64_t>(n);
    std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % un;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return static_cast<int>(draw % un);
}

double rand_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double rand_normal(std::mt19937_64& rng) {
    double u1 = 1.0 - rand_unit(rng);
    double u2 = rand_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

Dist random_dist(std::mt19937_64& rng, const SetPtr& carrier, int grain) {
    int k = carrier->size();
    int total = std::max(grain, k);
    std::vector<int> counts(static_cast<std::size_t>(k), 1);
    for (int extra = 0; extra < total - k; ++extra)
        counts[static_cast<std::size_t>(rand_int(rng, k))] += 1;
    std::map<int, Rat> weights;
    for (int i = 0; i < k; ++i)
        weights[i] = Rat(counts[static_cast<std::size_t>(i)], total);
    return make_dist(carrier, weights);
}

Kernel random_kernel(std::mt19937_64& rng, const SetPtr& source, const SetPtr& target,
                     int grain) {
    std::vector<Dist> rows;
    rows.reserve(static_cast<std::size_t>(source->size()));
    for (int i = 0; i < source->size(); ++i) rows.push_back(random_dist(rng, target, grain));
    return make_kernel(source, target, std::move(rows));
}

int sample_dist(std::mt19937_64& rng, const Dist& d) {
    double u = rand_unit(rng);
    double cum = 0.0;
    int last = -1;
    for (const auto& [idx, w] : d.w) {
        cum += static_cast<double>(w);
        last = idx;
        if (u < cum) return idx;
    }
    return last;
}

MealyMachine random_mealy_machine(std::mt19937_64& rng, const SetPtr& inputs,
                                  const SetPtr& outputs, const SetPtr& states, int grain) {
    SetPtr source = FinSet::product(inputs, states);
    SetPtr target = FinSet::product(outputs, states);
    return MealyMachine{inputs, outputs, states, random_kernel(rng, source, target, grain)};
}

CombMachine random_comb_machine(std::mt19937_64& rng, const SetPtr& inputs,
                                const SetPtr& outputs, const SetPtr& states, int grain) {
    SetPtr source = FinSet::product(inputs, states);
    SetPtr target = FinSet::product(outputs, states);
    std::vector<Dist> emissions;
    for (int s = 0; s < states->size(); ++s) emissions.push_back(random_dist(rng, outputs, grain));
    std::vector<Dist> rows;
    for (int src = 0; src < source->size(); ++src) {
        auto [i, s] = source->unpair(src);
        (void)i;
        std::map<int, Rat> weights;
        for (int o = 0; o < outputs->size(); ++o) {
            Dist next = random_dist(rng, states, grain);
            for (const auto& [sp, w] : next.w)
                weights[target->pair_index(o, sp)] =
                    emissions[static_cast<std::size_t>(s)].prob(o) * w;
        }
        rows.push_back(make_dist(target, weights));
    }
    MealyMachine m{inputs, outputs, states, make_kernel(source, target, std::move(rows))};
    return std::get<CombMachine>(check_comb(m));
}

UnifilarMachine random_unifilar_machine(std::mt19937_64& rng, const SetPtr& inputs,
                                        const SetPtr& outputs, const SetPtr& states, int grain) {
    SetPtr source = FinSet::product(inputs, states);
    SetPtr target = FinSet::product(outputs, states);
    std::vector<Dist> emissions;
    for (int s = 0; s < states->size(); ++s) emissions.push_back(random_dist(rng, outputs, grain));
    std::vector<Dist> rows;
    for (int src = 0; src < source->size(); ++src) {
        auto [i, s] = source->unpair(src);
        (void)i;
        std::map<int, Rat> weights;
        for (int o = 0; o < outputs->size(); ++o) {
            int next = rand_int(rng, states->size());
            weights[target->pair_index(o, next)] = emissions[static_cast<std::size_t>(s)].prob(o);
        }
        rows.push_back(make_dist(target, weights));
    }
    MealyMachine m{inputs, outputs, states, make_kernel(source, target, std::move(rows))};
    return make_unifilar(std::get<CombMachine>(check_comb(m)));
}

}  // namespace markov
