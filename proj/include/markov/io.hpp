#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "markov/gauss.hpp"
#include "markov/machine.hpp"
#include "markov/transducer.hpp"

namespace markov {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Parses a file as JSON; wraps failures into ParseError with the path.
Json parse_json_file(const std::string& path);

enum class MachineKind { mealy, comb, unifilar };

std::string kind_to_string(MachineKind kind);
MachineKind kind_from_string(const std::string& text);

/// A machine as loaded from a spec file. `comb` / `unifilar` are populated
/// when the declared kind supports them; loading fails if the declared kind's
/// invariant does not hold.
struct LoadedMachine {
    MachineKind kind = MachineKind::mealy;
    std::string name;
    MealyMachine mealy;
    std::optional<CombMachine> comb;
    std::optional<UnifilarMachine> unifilar;
};

LoadedMachine machine_from_json(const Json& j);
LoadedMachine load_machine(const std::string& path);

/// Schema "v1": version, kind, name, label lists, transition entries
/// {input, state, output, next_state, prob} with rationals as "p/q" strings,
/// and the readout for comb and unifilar machines. Entry order is fixed by
/// the label lists, so serialization is byte-deterministic.
Json machine_to_json(const LoadedMachine& m);

/// Distribution as an object label -> "p/q", positive entries only.
Json dist_to_json(const Dist& d);
Dist dist_from_json(const SetPtr& carrier, const Json& j);

Json process_to_json(const ControlledProcess& p);
ControlledProcess process_from_json(const Json& j);

struct KalmanSystem {
    GaussMorphism step;  // state -> (state, observation)
    KalmanState prior;
    int obs_dim = 0;
};

KalmanSystem kalman_system_from_json(const Json& j);
KalmanSystem load_kalman_system(const std::string& path);
Json kalman_system_to_json(const KalmanSystem& sys);

std::vector<Eigen::VectorXd> observations_from_json(const Json& j, int obs_dim);
std::vector<Eigen::VectorXd> load_observations(const std::string& path, int obs_dim);

/// "uniform" or comma-separated rationals in state order (must sum to 1).
Dist parse_prior(const std::string& text, const SetPtr& states);

/// Comma-separated labels resolved against `set`.
std::vector<int> parse_labels(const std::string& text, const SetPtr& set);

}  // namespace markov
