#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "markov/errors.hpp"
#include "markov/filtering.hpp"
#include "markov/io.hpp"
#include "markov/random_gen.hpp"
#include "markov/transducer.hpp"

namespace {

using namespace markov;

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file(out_path, content);
}

/// Wraps a plain Mealy machine so the filtering code (which never touches the
/// readout under Wiring::mealy) can run on it; comb and unifilar machines are
/// passed through with their genuine readout.
CombMachine as_comb_model(const LoadedMachine& lm) {
    if (lm.comb) return *lm.comb;
    Kernel em = mealy_emission(lm.mealy);
    Kernel readout = make_kernel(lm.mealy.states, lm.mealy.outputs, [&](int s) {
        return em.row(em.source->pair_index(0, s));
    });
    return CombMachine{lm.mealy, readout};
}

Wiring wiring_of(const LoadedMachine& lm) {
    return lm.kind == MachineKind::mealy ? Wiring::mealy : Wiring::comb;
}

int run_filter(const std::string& machine_file, const std::string& prior_text,
               const std::string& inputs_text, const std::string& outputs_text,
               const std::string& out_path) {
    LoadedMachine lm = load_machine(machine_file);
    CombMachine model = as_comb_model(lm);
    Belief belief = parse_prior(prior_text, lm.mealy.states);
    std::vector<int> outputs = parse_labels(outputs_text, lm.mealy.outputs);
    std::vector<int> inputs;
    if (inputs_text.empty()) {
        if (lm.mealy.inputs->size() != 1)
            throw ParseError("--inputs is required when the machine has more than one input");
        inputs.assign(outputs.size(), 0);
    } else {
        inputs = parse_labels(inputs_text, lm.mealy.inputs);
    }
    if (inputs.size() != outputs.size())
        throw ParseError("--inputs and --outputs must have the same length");

    BeliefMachine bm = build_filter(model);
    bool mealy = wiring_of(lm) == Wiring::mealy;
    std::string trace;
    for (std::size_t t = 0; t < outputs.size(); ++t) {
        Dist predicted = mealy ? bm.predict(belief, inputs[t]) : bm.predict(belief);
        FilterResult next = bm.update(belief, inputs[t], outputs[t]);
        if (std::holds_alternative<ImpossibleObservation>(next)) {
            emit(out_path, trace);
            std::cerr << "impossible observation at step " << t << "\n";
            return 4;
        }
        belief = std::get<Belief>(next);
        Json record;
        record["step"] = static_cast<int>(t);
        record["input"] = lm.mealy.inputs->label(inputs[t]);
        record["output"] = lm.mealy.outputs->label(outputs[t]);
        record["predicted"] = dist_to_json(predicted);
        record["posterior"] = dist_to_json(belief);
        trace += record.dump() + "\n";
    }
    Json final_record;
    final_record["posterior"] = dist_to_json(belief);
    trace += final_record.dump() + "\n";
    emit(out_path, trace);
    return 0;
}

Json comb_check_result(const LoadedMachine& lm) {
    Json r;
    r["name"] = "comb";
    auto checked = check_comb(lm.mealy);
    if (auto* witness = std::get_if<CombWitness>(&checked)) {
        r["pass"] = false;
        Json w;
        w["state"] = lm.mealy.states->label(witness->state);
        w["input_a"] = lm.mealy.inputs->label(witness->input_a);
        w["input_b"] = lm.mealy.inputs->label(witness->input_b);
        w["output"] = lm.mealy.outputs->label(witness->output);
        r["witness"] = std::move(w);
    } else {
        r["pass"] = true;
    }
    return r;
}

Json unifilar_check_result(const LoadedMachine& lm) {
    Json r;
    r["name"] = "unifilar";
    auto checked = check_comb(lm.mealy);
    if (std::holds_alternative<CombWitness>(checked)) {
        r["pass"] = false;
        r["reason"] = "comb condition fails";
    } else {
        r["pass"] = is_unifilar(std::get<CombMachine>(checked));
        if (!r["pass"].get<bool>()) r["reason"] = "update is not deterministic given the output";
    }
    return r;
}

Json interpretation_check_result(const LoadedMachine& lm) {
    Json r;
    r["name"] = "interpretation";
    if (lm.unifilar) {
        // A unifilar machine filters for itself along the identity.
        Kernel id = identity_kernel(lm.mealy.states);
        r["pass"] = check_interpretation(id, *lm.unifilar, *lm.comb, Wiring::comb);
        return r;
    }
    CombMachine model = as_comb_model(lm);
    Wiring wiring = wiring_of(lm);
    ReachableBeliefs reach = reachable_beliefs(model, {uniform_dist(lm.mealy.states)}, wiring);
    if (reach.truncated) {
        r["pass"] = false;
        r["reason"] = "reachable belief set exceeds the cap";
        return r;
    }
    r["beliefs"] = static_cast<int>(reach.beliefs.size());
    try {
        InducedFilterMachine induced = induced_filter_machine(model, reach.beliefs, wiring);
        r["pass"] = check_interpretation(induced.psi, induced.machine, model, wiring);
    } catch (const NotClosed&) {
        r["pass"] = false;
        r["reason"] = "belief set is not closed under updates";
    }
    return r;
}

Json exchangeability_check_result(const LoadedMachine& lm) {
    Json r;
    r["name"] = "exchangeability";
    r["pass"] = exchangeability_check(as_comb_model(lm));
    return r;
}

int run_check(const std::string& machine_file, const std::string& suite,
              const std::string& out_path) {
    LoadedMachine lm = load_machine(machine_file);
    std::vector<Json> results;
    if (suite == "comb") {
        results.push_back(comb_check_result(lm));
    } else if (suite == "unifilar") {
        results.push_back(unifilar_check_result(lm));
    } else if (suite == "interpretation") {
        results.push_back(interpretation_check_result(lm));
    } else if (suite == "exchangeability") {
        results.push_back(exchangeability_check_result(lm));
    } else if (suite == "all") {
        // Every property the declared kind claims.
        if (lm.kind != MachineKind::mealy) results.push_back(comb_check_result(lm));
        if (lm.kind == MachineKind::unifilar) results.push_back(unifilar_check_result(lm));
        results.push_back(interpretation_check_result(lm));
    } else {
        throw ParseError("unknown suite '" + suite + "'");
    }

    bool pass = true;
    Json checks = Json::array();
    for (auto& r : results) {
        pass = pass && r["pass"].get<bool>();
        checks.push_back(std::move(r));
    }
    Json report;
    report["version"] = "v1";
    report["command"] = "check";
    report["machine"] = lm.name;
    report["suite"] = suite;
    report["checks"] = std::move(checks);
    report["pass"] = pass;
    emit(out_path, report.dump() + "\n");
    return pass ? 0 : 3;
}

int run_oracle(const std::string& machine_file, int trials, int horizon, std::uint64_t seed,
               int parallel, const std::string& out_path) {
    if (trials < 0 || horizon < 0) throw ParseError("--trials and --horizon must be nonnegative");
    LoadedMachine lm = load_machine(machine_file);
    CombMachine model = as_comb_model(lm);
    int ni = lm.mealy.inputs->size();
    int no = lm.mealy.outputs->size();

    std::vector<std::uint8_t> matched(static_cast<std::size_t>(trials), 0);
    std::vector<std::uint8_t> impossible(static_cast<std::size_t>(trials), 0);
    auto run_trial = [&](int t) {
        std::mt19937_64 rng = trial_rng(seed, static_cast<std::uint64_t>(t));
        Belief prior = random_dist(rng, lm.mealy.states);
        std::vector<int> inputs, outputs;
        for (int k = 0; k < horizon; ++k) {
            inputs.push_back(rand_int(rng, ni));
            outputs.push_back(rand_int(rng, no));
        }
        FilterResult filtered = filter_sequence(model, prior, inputs, outputs);
        FilterResult oracled = posterior_oracle(model, prior, inputs, outputs);
        matched[static_cast<std::size_t>(t)] = filtered == oracled ? 1 : 0;
        impossible[static_cast<std::size_t>(t)] =
            std::holds_alternative<ImpossibleObservation>(filtered) ? 1 : 0;
    };

    if (parallel > 1 && trials > 1) {
        std::vector<std::thread> workers;
        for (int w = 0; w < parallel; ++w)
            workers.emplace_back([&, w]() {
                for (int t = w; t < trials; t += parallel) run_trial(t);
            });
        for (auto& th : workers) th.join();
    } else {
        for (int t = 0; t < trials; ++t) run_trial(t);
    }

    int matches = 0, mismatches = 0, impossible_count = 0, first_mismatch = -1;
    for (int t = 0; t < trials; ++t) {
        if (matched[static_cast<std::size_t>(t)]) {
            ++matches;
        } else {
            ++mismatches;
            if (first_mismatch < 0) first_mismatch = t;
        }
        if (impossible[static_cast<std::size_t>(t)]) ++impossible_count;
    }

    Json report;
    report["version"] = "v1";
    report["command"] = "oracle";
    report["machine"] = lm.name;
    report["trials"] = trials;
    report["horizon"] = horizon;
    report["seed"] = seed;
    report["matches"] = matches;
    report["mismatches"] = mismatches;
    report["impossible"] = impossible_count;
    if (first_mismatch >= 0) report["first_mismatch"] = first_mismatch;
    report["pass"] = mismatches == 0;
    emit(out_path, report.dump() + "\n");
    return mismatches == 0 ? 0 : 3;
}

int run_unroll(const std::string& machine_file, const std::string& prior_text, int horizon,
               const std::string& out_path) {
    LoadedMachine lm = load_machine(machine_file);
    if (!lm.comb) throw ParseError("unroll needs a comb or unifilar machine");
    if (horizon < 1) throw ParseError("--horizon must be at least 1");
    Belief prior = parse_prior(prior_text, lm.mealy.states);
    ControlledProcess p = unroll(*lm.comb, prior, horizon);
    emit(out_path, process_to_json(p).dump() + "\n");
    return 0;
}

int run_kalman(const std::string& system_file, const std::string& observations_file,
               const std::string& out_path) {
    KalmanSystem sys = load_kalman_system(system_file);
    std::vector<Eigen::VectorXd> observations = load_observations(observations_file, sys.obs_dim);
    KalmanState state = sys.prior;
    std::string trace;
    for (std::size_t t = 0; t < observations.size(); ++t) {
        state = kalman_step(sys.step, state, observations[t]);
        Json record;
        record["step"] = static_cast<int>(t);
        Json obs = Json::array();
        for (int i = 0; i < observations[t].size(); ++i) obs.push_back(observations[t](i));
        record["observation"] = std::move(obs);
        Json mean = Json::array();
        for (int i = 0; i < state.hbar.size(); ++i) mean.push_back(state.hbar(i));
        record["mean"] = std::move(mean);
        Json cov = Json::array();
        for (int r = 0; r < state.sigma_p.rows(); ++r) {
            Json row = Json::array();
            for (int c = 0; c < state.sigma_p.cols(); ++c) row.push_back(state.sigma_p(r, c));
            cov.push_back(std::move(row));
        }
        record["cov"] = std::move(cov);
        trace += record.dump() + "\n";
    }
    emit(out_path, trace);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact filtering over finite machines, with a Gaussian Kalman form"};
    app.require_subcommand(1);

    std::string machine_file, prior_text = "uniform", inputs_text, outputs_text, out_path;
    std::string suite = "all";
    std::string observations_file;
    int trials = 100, horizon = 0, parallel = 1;
    std::uint64_t seed = 0;

    CLI::App* filter_cmd = app.add_subcommand("filter", "Run the exact filter over a trace");
    filter_cmd->add_option("--machine", machine_file, "machine spec file")->required();
    filter_cmd->add_option("--prior", prior_text, "'uniform' or comma-separated rationals");
    filter_cmd->add_option("--inputs", inputs_text, "comma-separated input labels");
    filter_cmd->add_option("--outputs", outputs_text, "comma-separated observed output labels");
    filter_cmd->add_option("--out", out_path, "write the trace here instead of stdout");

    CLI::App* check_cmd = app.add_subcommand("check", "Run exact property checks on a machine");
    check_cmd->add_option("--machine", machine_file, "machine spec file")->required();
    check_cmd->add_option("--suite", suite, "comb|unifilar|interpretation|exchangeability|all");
    check_cmd->add_option("--out", out_path, "write the report here instead of stdout");

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "Compare the filter against the joint-distribution oracle");
    oracle_cmd->add_option("--machine", machine_file, "machine spec file")->required();
    oracle_cmd->add_option("--trials", trials, "number of random trials");
    oracle_cmd->add_option("--horizon", horizon, "trace length per trial");
    oracle_cmd->add_option("--seed", seed, "random seed")->required();
    oracle_cmd->add_option("--parallel", parallel, "worker threads");
    oracle_cmd->add_option("--out", out_path, "write the report here instead of stdout");

    CLI::App* unroll_cmd = app.add_subcommand("unroll", "Unroll a machine into its process");
    unroll_cmd->add_option("--machine", machine_file, "machine spec file")->required();
    unroll_cmd->add_option("--prior", prior_text, "'uniform' or comma-separated rationals");
    unroll_cmd->add_option("--horizon", horizon, "number of levels")->required();
    unroll_cmd->add_option("--out", out_path, "write the process here instead of stdout");

    CLI::App* kalman_cmd = app.add_subcommand("kalman", "Run the Kalman filter on observations");
    kalman_cmd->add_option("--machine", machine_file, "system spec file")->required();
    kalman_cmd->add_option("--outputs", observations_file, "observations file")->required();
    kalman_cmd->add_option("--out", out_path, "write the trace here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (filter_cmd->parsed())
            return run_filter(machine_file, prior_text, inputs_text, outputs_text, out_path);
        if (check_cmd->parsed()) return run_check(machine_file, suite, out_path);
        if (oracle_cmd->parsed())
            return run_oracle(machine_file, trials, horizon, seed, parallel, out_path);
        if (unroll_cmd->parsed()) return run_unroll(machine_file, prior_text, horizon, out_path);
        if (kalman_cmd->parsed()) return run_kalman(machine_file, observations_file, out_path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
