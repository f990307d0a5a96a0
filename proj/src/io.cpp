#include "markov/io.hpp"

#include <fstream>
#include <sstream>

#include "markov/errors.hpp"

namespace markov {

namespace {

const Json& field(const Json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError("missing field '" + key + "'");
    return *it;
}

std::string string_field(const Json& j, const std::string& key) {
    const Json& v = field(j, key);
    if (!v.is_string()) throw ParseError("field '" + key + "' must be a string");
    return v.get<std::string>();
}

int int_field(const Json& j, const std::string& key) {
    const Json& v = field(j, key);
    if (!v.is_number_integer()) throw ParseError("field '" + key + "' must be an integer");
    return v.get<int>();
}

std::vector<std::string> label_list(const Json& j, const std::string& key) {
    const Json& v = field(j, key);
    if (!v.is_array() || v.empty())
        throw ParseError("field '" + key + "' must be a nonempty array of labels");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw ParseError("field '" + key + "' must contain strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

void require_version(const Json& j) {
    if (string_field(j, "version") != "v1") throw ParseError("unsupported schema version");
}

int resolve(const SetPtr& set, const Json& entry, const std::string& key) {
    std::string label = string_field(entry, key);
    auto idx = set->find(label);
    if (!idx) throw ParseError("unknown " + key + " label '" + label + "'");
    return *idx;
}

Eigen::MatrixXd matrix_field(const Json& j, const std::string& key, int rows, int cols) {
    const Json& v = field(j, key);
    if (!v.is_array() || static_cast<int>(v.size()) != rows)
        throw ParseError("field '" + key + "' must have " + std::to_string(rows) + " rows");
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const Json& row = v[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError("field '" + key + "' must have " + std::to_string(cols) + " columns");
        for (int c = 0; c < cols; ++c) {
            const Json& e = row[static_cast<std::size_t>(c)];
            if (!e.is_number()) throw ParseError("field '" + key + "' must contain numbers");
            m(r, c) = e.get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_field(const Json& j, const std::string& key, int size) {
    const Json& v = field(j, key);
    if (!v.is_array() || static_cast<int>(v.size()) != size)
        throw ParseError("field '" + key + "' must have " + std::to_string(size) + " entries");
    Eigen::VectorXd out(size);
    for (int i = 0; i < size; ++i) {
        const Json& e = v[static_cast<std::size_t>(i)];
        if (!e.is_number()) throw ParseError("field '" + key + "' must contain numbers");
        out(i) = e.get<double>();
    }
    return out;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_to_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, ',')) {
        auto begin = part.find_first_not_of(" \t");
        auto end = part.find_last_not_of(" \t");
        parts.push_back(begin == std::string::npos ? "" : part.substr(begin, end - begin + 1));
    }
    if (!text.empty() && text.back() == ',') parts.push_back("");
    return parts;
}

std::vector<int> tuple_digits(long long index, int base, int length) {
    std::vector<int> digits(static_cast<std::size_t>(length));
    for (int pos = length - 1; pos >= 0; --pos) {
        digits[static_cast<std::size_t>(pos)] = static_cast<int>(index % base);
        index /= base;
    }
    return digits;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
}

Json parse_json_file(const std::string& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string kind_to_string(MachineKind kind) {
    switch (kind) {
        case MachineKind::mealy: return "mealy";
        case MachineKind::comb: return "comb";
        default: return "unifilar";
    }
}

MachineKind kind_from_string(const std::string& text) {
    if (text == "mealy") return MachineKind::mealy;
    if (text == "comb") return MachineKind::comb;
    if (text == "unifilar") return MachineKind::unifilar;
    throw ParseError("unknown machine kind '" + text + "'");
}

LoadedMachine machine_from_json(const Json& j) {
    require_version(j);
    LoadedMachine out;
    out.kind = kind_from_string(string_field(j, "kind"));
    out.name = j.contains("name") ? string_field(j, "name") : "";

    SetPtr inputs, outputs, states;
    try {
        inputs = FinSet::make("inputs", label_list(j, "inputs"));
        outputs = FinSet::make("outputs", label_list(j, "outputs"));
        states = FinSet::make("states", label_list(j, "states"));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }

    const Json& entries = field(j, "transition");
    if (!entries.is_array()) throw ParseError("field 'transition' must be an array");
    SetPtr source = FinSet::product(inputs, states);
    SetPtr target = FinSet::product(outputs, states);
    std::vector<std::map<int, Rat>> weights(static_cast<std::size_t>(source->size()));
    for (const auto& entry : entries) {
        int i = resolve(inputs, entry, "input");
        int s = resolve(states, entry, "state");
        int o = resolve(outputs, entry, "output");
        int ns = resolve(states, entry, "next_state");
        Rat p = rat_from_string(string_field(entry, "prob"));
        auto& row = weights[static_cast<std::size_t>(source->pair_index(i, s))];
        int cell = target->pair_index(o, ns);
        if (row.count(cell))
            throw ParseError("duplicate transition entry at input '" + inputs->label(i) +
                             "', state '" + states->label(s) + "'");
        row[cell] = p;
    }
    std::vector<Dist> rows;
    for (int src = 0; src < source->size(); ++src) {
        auto [i, s] = source->unpair(src);
        try {
            rows.push_back(make_dist(target, weights[static_cast<std::size_t>(src)]));
        } catch (const std::invalid_argument&) {
            throw ParseError("transition row at input '" + inputs->label(i) + "', state '" +
                             states->label(s) + "' is not a probability distribution");
        }
    }
    out.mealy = MealyMachine{inputs, outputs, states, make_kernel(source, target, std::move(rows))};

    if (out.kind != MachineKind::mealy) {
        auto checked = check_comb(out.mealy);
        if (auto* witness = std::get_if<CombWitness>(&checked))
            throw ParseError("declared " + kind_to_string(out.kind) + " machine violates the comb condition at state '" +
                             states->label(witness->state) + "' (inputs '" +
                             inputs->label(witness->input_a) + "' vs '" +
                             inputs->label(witness->input_b) + "', output '" +
                             outputs->label(witness->output) + "')");
        out.comb = std::get<CombMachine>(checked);
        if (out.kind == MachineKind::unifilar) {
            if (!is_unifilar(*out.comb))
                throw ParseError("declared unifilar machine has a nondeterministic update");
            out.unifilar = make_unifilar(*out.comb);
        }
    }

    if (j.contains("readout")) {
        if (!out.comb) throw ParseError("readout entries require a comb or unifilar machine");
        const Json& ro = j.at("readout");
        if (!ro.is_array()) throw ParseError("field 'readout' must be an array");
        std::vector<std::map<int, Rat>> ro_weights(static_cast<std::size_t>(states->size()));
        for (const auto& entry : ro) {
            int s = resolve(states, entry, "state");
            int o = resolve(outputs, entry, "output");
            ro_weights[static_cast<std::size_t>(s)][o] = rat_from_string(string_field(entry, "prob"));
        }
        std::vector<Dist> ro_rows;
        for (int s = 0; s < states->size(); ++s) {
            try {
                ro_rows.push_back(make_dist(outputs, ro_weights[static_cast<std::size_t>(s)]));
            } catch (const std::invalid_argument&) {
                throw ParseError("readout row at state '" + states->label(s) +
                                 "' is not a probability distribution");
            }
        }
        Kernel declared = make_kernel(states, outputs, std::move(ro_rows));
        if (declared != out.comb->readout)
            throw ParseError("declared readout disagrees with the transition's output marginal");
    }
    return out;
}

LoadedMachine load_machine(const std::string& path) {
    Json j = parse_json_file(path);
    try {
        return machine_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Json machine_to_json(const LoadedMachine& m) {
    Json j;
    j["version"] = "v1";
    j["kind"] = kind_to_string(m.kind);
    j["name"] = m.name;
    j["inputs"] = m.mealy.inputs->elements();
    j["outputs"] = m.mealy.outputs->elements();
    j["states"] = m.mealy.states->elements();
    Json entries = Json::array();
    const Kernel& t = m.mealy.transition;
    for (int i = 0; i < m.mealy.inputs->size(); ++i)
        for (int s = 0; s < m.mealy.states->size(); ++s) {
            const Dist& row = t.row(t.source->pair_index(i, s));
            for (const auto& [cell, p] : row.w) {
                auto [o, ns] = t.target->unpair(cell);
                Json entry;
                entry["input"] = m.mealy.inputs->label(i);
                entry["state"] = m.mealy.states->label(s);
                entry["output"] = m.mealy.outputs->label(o);
                entry["next_state"] = m.mealy.states->label(ns);
                entry["prob"] = rat_to_string(p);
                entries.push_back(std::move(entry));
            }
        }
    j["transition"] = std::move(entries);
    if (m.comb) {
        Json readout = Json::array();
        for (int s = 0; s < m.mealy.states->size(); ++s)
            for (const auto& [o, p] : m.comb->readout.row(s).w) {
                Json entry;
                entry["state"] = m.mealy.states->label(s);
                entry["output"] = m.mealy.outputs->label(o);
                entry["prob"] = rat_to_string(p);
                readout.push_back(std::move(entry));
            }
        j["readout"] = std::move(readout);
    }
    return j;
}

Json dist_to_json(const Dist& d) {
    Json j = Json::object();
    for (const auto& [idx, p] : d.w) j[d.carrier->label(idx)] = rat_to_string(p);
    return j;
}

Dist dist_from_json(const SetPtr& carrier, const Json& j) {
    if (!j.is_object()) throw ParseError("distribution must be an object");
    std::map<int, Rat> weights;
    for (const auto& [label, value] : j.items()) {
        auto idx = carrier->find(label);
        if (!idx) throw ParseError("unknown label '" + label + "'");
        if (!value.is_string()) throw ParseError("probabilities must be \"p/q\" strings");
        weights[*idx] = rat_from_string(value.get<std::string>());
    }
    try {
        return make_dist(carrier, weights);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

Json process_to_json(const ControlledProcess& p) {
    Json j;
    j["version"] = "v1";
    j["inputs"] = p.inputs->elements();
    j["outputs"] = p.outputs->elements();
    j["horizon"] = p.horizon;
    Json entries = Json::array();
    for (int n = 1; n <= p.horizon; ++n)
        for (const auto& [ins, dist] : p.levels[static_cast<std::size_t>(n - 1)])
            for (const auto& [tuple, prob] : dist.w) {
                Json entry;
                entry["level"] = n;
                Json in_labels = Json::array();
                for (int i : ins) in_labels.push_back(p.inputs->label(i));
                entry["inputs"] = std::move(in_labels);
                Json out_labels = Json::array();
                for (int o : tuple_digits(tuple, p.outputs->size(), n))
                    out_labels.push_back(p.outputs->label(o));
                entry["outputs"] = std::move(out_labels);
                entry["prob"] = rat_to_string(prob);
                entries.push_back(std::move(entry));
            }
    j["entries"] = std::move(entries);
    return j;
}

ControlledProcess process_from_json(const Json& j) {
    require_version(j);
    ControlledProcess p;
    try {
        p.inputs = FinSet::make("inputs", label_list(j, "inputs"));
        p.outputs = FinSet::make("outputs", label_list(j, "outputs"));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    p.horizon = int_field(j, "horizon");
    if (p.horizon < 1) throw ParseError("horizon must be at least 1");
    p.levels.resize(static_cast<std::size_t>(p.horizon));

    const Json& entries = field(j, "entries");
    if (!entries.is_array()) throw ParseError("field 'entries' must be an array");
    std::vector<std::map<std::vector<int>, std::map<int, Rat>>> weights(
        static_cast<std::size_t>(p.horizon));
    for (const auto& entry : entries) {
        int n = int_field(entry, "level");
        if (n < 1 || n > p.horizon) throw ParseError("entry level out of range");
        const Json& ins = field(entry, "inputs");
        const Json& outs = field(entry, "outputs");
        if (!ins.is_array() || static_cast<int>(ins.size()) != n - 1)
            throw ParseError("level " + std::to_string(n) + " entries need " +
                             std::to_string(n - 1) + " inputs");
        if (!outs.is_array() || static_cast<int>(outs.size()) != n)
            throw ParseError("level " + std::to_string(n) + " entries need " + std::to_string(n) +
                             " outputs");
        std::vector<int> in_tuple;
        for (const auto& label : ins) {
            if (!label.is_string()) throw ParseError("input tuples must contain labels");
            auto idx = p.inputs->find(label.get<std::string>());
            if (!idx) throw ParseError("unknown input label '" + label.get<std::string>() + "'");
            in_tuple.push_back(*idx);
        }
        long long out_index = 0;
        for (const auto& label : outs) {
            if (!label.is_string()) throw ParseError("output tuples must contain labels");
            auto idx = p.outputs->find(label.get<std::string>());
            if (!idx) throw ParseError("unknown output label '" + label.get<std::string>() + "'");
            out_index = out_index * p.outputs->size() + *idx;
        }
        auto& cell = weights[static_cast<std::size_t>(n - 1)][in_tuple];
        int key = static_cast<int>(out_index);
        if (cell.count(key)) throw ParseError("duplicate process entry");
        cell[key] = rat_from_string(string_field(entry, "prob"));
    }

    long long expected = 1;
    for (int n = 1; n <= p.horizon; ++n) {
        SetPtr tuples = FinSet::power(p.outputs, n);
        auto& level = weights[static_cast<std::size_t>(n - 1)];
        if (static_cast<long long>(level.size()) != expected)
            throw ParseError("level " + std::to_string(n) + " must cover every input tuple");
        for (auto& [ins, cell] : level) {
            try {
                p.levels[static_cast<std::size_t>(n - 1)][ins] = make_dist(tuples, cell);
            } catch (const std::invalid_argument&) {
                throw ParseError("level " + std::to_string(n) +
                                 " table is not a probability distribution");
            }
        }
        expected *= p.inputs->size();
    }
    return p;
}

KalmanSystem kalman_system_from_json(const Json& j) {
    require_version(j);
    int n = int_field(j, "state_dim");
    int m = int_field(j, "obs_dim");
    if (n < 1 || m < 1) throw ParseError("state_dim and obs_dim must be positive");
    Eigen::MatrixXd M = matrix_field(j, "M", n + m, n);
    Eigen::VectorXd c = vector_field(j, "c", n + m);
    Eigen::MatrixXd noise = matrix_field(j, "noise", n + m, n + m);
    Eigen::VectorXd mean = vector_field(j, "prior_mean", n);
    Eigen::MatrixXd cov = matrix_field(j, "prior_cov", n, n);
    try {
        return KalmanSystem{GaussMorphism(std::move(M), std::move(c), noise),
                            KalmanState(std::move(mean), cov), m};
    } catch (const NotPsd& e) {
        throw ParseError(e.what());
    } catch (const ShapeMismatch& e) {
        throw ParseError(e.what());
    }
}

KalmanSystem load_kalman_system(const std::string& path) {
    Json j = parse_json_file(path);
    try {
        return kalman_system_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Json kalman_system_to_json(const KalmanSystem& sys) {
    Json j;
    j["version"] = "v1";
    j["state_dim"] = sys.step.in_dim();
    j["obs_dim"] = sys.obs_dim;
    j["M"] = matrix_to_json(sys.step.M);
    j["c"] = vector_to_json(sys.step.c);
    j["noise"] = matrix_to_json(sys.step.noise);
    j["prior_mean"] = vector_to_json(sys.prior.hbar);
    j["prior_cov"] = matrix_to_json(sys.prior.sigma_p);
    return j;
}

std::vector<Eigen::VectorXd> observations_from_json(const Json& j, int obs_dim) {
    require_version(j);
    const Json& rows = field(j, "observations");
    if (!rows.is_array()) throw ParseError("field 'observations' must be an array");
    std::vector<Eigen::VectorXd> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Json& row = rows[r];
        if (!row.is_array() || static_cast<int>(row.size()) != obs_dim)
            throw ParseError("each observation needs " + std::to_string(obs_dim) + " entries");
        Eigen::VectorXd v(obs_dim);
        for (int i = 0; i < obs_dim; ++i) {
            const Json& e = row[static_cast<std::size_t>(i)];
            if (!e.is_number()) throw ParseError("observations must be numbers");
            v(i) = e.get<double>();
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Eigen::VectorXd> load_observations(const std::string& path, int obs_dim) {
    Json j = parse_json_file(path);
    try {
        return observations_from_json(j, obs_dim);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Dist parse_prior(const std::string& text, const SetPtr& states) {
    if (text == "uniform") return uniform_dist(states);
    std::vector<std::string> parts = split_commas(text);
    if (static_cast<int>(parts.size()) != states->size())
        throw ParseError("prior needs " + std::to_string(states->size()) + " entries");
    std::map<int, Rat> weights;
    for (int i = 0; i < states->size(); ++i)
        weights[i] = rat_from_string(parts[static_cast<std::size_t>(i)]);
    try {
        return make_dist(states, weights);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

std::vector<int> parse_labels(const std::string& text, const SetPtr& set) {
    std::vector<int> out;
    if (text.empty()) return out;
    for (const std::string& label : split_commas(text)) {
        auto idx = set->find(label);
        if (!idx) throw ParseError("unknown label '" + label + "' in " + set->name());
        out.push_back(*idx);
    }
    return out;
}

}  // namespace markov
