#include "stratmon/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "stratmon/errors.hpp"

namespace stratmon {

using nlohmann::json;
using nlohmann::ordered_json;

// ============================================================================
// Loading
// ============================================================================

namespace {

// Union-find used to close arbitrary state groups into a partition.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

void require_keys(const json& j, const std::vector<std::string>& keys, const std::string& what) {
    if (!j.is_object()) throw InputError(what + " must be a JSON object");
    for (const auto& k : keys)
        if (!j.contains(k)) throw InputError(what + " missing required key \"" + k + "\"");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            throw InputError(what + " has unknown key \"" + it.key() + "\"");
    }
}

std::vector<std::string> string_list(const json& j, const std::string& what) {
    if (!j.is_array()) throw InputError(what + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw InputError(what + " must contain only strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

void check_unique(const std::vector<std::string>& v, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& s : v)
        if (!seen.insert(s).second) throw InputError("duplicate " + what + " \"" + s + "\"");
}

} // namespace

Icgs model_from_json(const json& j) {
    require_keys(j,
                 {"agents", "atoms", "states", "initial", "actions", "indistinguishability",
                  "protocol", "transitions", "labeling"},
                 "model");

    Icgs m;
    m.agents = string_list(j.at("agents"), "agents");
    m.atoms = string_list(j.at("atoms"), "atoms");
    m.states = string_list(j.at("states"), "states");
    check_unique(m.agents, "agent");
    check_unique(m.atoms, "atom");
    check_unique(m.states, "state");
    if (m.states.empty()) throw InputError("model has no states");

    size_t na = m.agents.size();
    size_t n = m.states.size();

    m.actions.assign(na, {});
    const json& actions = j.at("actions");
    if (!actions.is_object()) throw InputError("actions must be an object");
    for (auto it = actions.begin(); it != actions.end(); ++it) {
        auto pos = std::find(m.agents.begin(), m.agents.end(), it.key());
        if (pos == m.agents.end()) throw InputError("actions for unknown agent \"" + it.key() + "\"");
        size_t i = static_cast<size_t>(pos - m.agents.begin());
        m.actions[i] = string_list(it.value(), "actions of " + it.key());
        check_unique(m.actions[i], "action of " + it.key());
    }
    for (size_t i = 0; i < na; ++i)
        if (m.actions[i].empty())
            throw InputError("agent \"" + m.agents[i] + "\" has no actions");

    m.rebuild_index();

    // indistinguishability: close listed groups into a partition
    m.eq_class.assign(na, std::vector<int>(n, 0));
    const json& ind = j.at("indistinguishability");
    if (!ind.is_object()) throw InputError("indistinguishability must be an object");
    for (size_t i = 0; i < na; ++i) {
        UnionFind uf(n);
        auto it = ind.find(m.agents[i]);
        if (it != ind.end()) {
            if (!it->is_array())
                throw InputError("indistinguishability of " + m.agents[i] + " must be an array");
            for (const auto& group : *it) {
                auto names = string_list(group, "indistinguishability group");
                if (names.size() < 2)
                    throw InputError("indistinguishability group needs at least two states");
                int first = m.state_index(names[0]);
                if (first < 0) throw InputError("unknown state \"" + names[0] + "\"");
                for (size_t k = 1; k < names.size(); ++k) {
                    int s = m.state_index(names[k]);
                    if (s < 0) throw InputError("unknown state \"" + names[k] + "\"");
                    uf.unite(first, s);
                }
            }
        }
        // dense class ids ordered by smallest member
        std::map<int, int> root_to_class;
        for (size_t s = 0; s < n; ++s) {
            int r = uf.find(static_cast<int>(s));
            auto [pos2, fresh] = root_to_class.emplace(r, static_cast<int>(root_to_class.size()));
            m.eq_class[i][s] = pos2->second;
            (void)fresh;
        }
    }
    for (auto it = ind.begin(); it != ind.end(); ++it) {
        if (m.agent_index(it.key()) < 0)
            throw InputError("indistinguishability for unknown agent \"" + it.key() + "\"");
    }

    int ini = m.state_index(j.at("initial").get<std::string>());
    if (ini < 0) throw InputError("initial state not in state set");
    m.initial = ini;

    // protocol
    m.protocol.assign(na, std::vector<std::vector<int>>(n));
    const json& proto = j.at("protocol");
    if (!proto.is_object()) throw InputError("protocol must be an object");
    for (auto it = proto.begin(); it != proto.end(); ++it) {
        int i = m.agent_index(it.key());
        if (i < 0) throw InputError("protocol for unknown agent \"" + it.key() + "\"");
        if (!it->is_object()) throw InputError("protocol of " + it.key() + " must be an object");
        for (auto st = it->begin(); st != it->end(); ++st) {
            int s = m.state_index(st.key());
            if (s < 0) throw InputError("protocol references unknown state \"" + st.key() + "\"");
            for (const auto& name : string_list(st.value(), "protocol entry")) {
                int a = m.action_index(i, name);
                if (a < 0)
                    throw InputError("protocol of " + it.key() + " at " + st.key() +
                                     " references unknown action \"" + name + "\"");
                m.protocol[i][s].push_back(a);
            }
            auto& p = m.protocol[i][s];
            std::sort(p.begin(), p.end());
            p.erase(std::unique(p.begin(), p.end()), p.end());
        }
    }

    // transitions
    m.delta.assign(n, {});
    const json& trans = j.at("transitions");
    if (!trans.is_array()) throw InputError("transitions must be an array");
    for (const auto& t : trans) {
        require_keys(t, {"from", "act", "to"}, "transition");
        int from = m.state_index(t.at("from").get<std::string>());
        int to = m.state_index(t.at("to").get<std::string>());
        if (from < 0 || to < 0) throw InputError("transition references unknown state");
        const json& act = t.at("act");
        if (!act.is_object()) throw InputError("transition act must be an object");
        JointAction a(na, -1);
        for (auto it = act.begin(); it != act.end(); ++it) {
            int i = m.agent_index(it.key());
            if (i < 0) throw InputError("transition act for unknown agent \"" + it.key() + "\"");
            int ai = m.action_index(i, it.value().get<std::string>());
            if (ai < 0)
                throw InputError("transition act uses unknown action \"" +
                                 it.value().get<std::string>() + "\"");
            a[i] = ai;
        }
        for (size_t i = 0; i < na; ++i)
            if (a[i] < 0)
                throw InputError("transition act missing agent \"" + m.agents[i] + "\"");
        uint64_t code = m.encode_joint(a);
        auto [pos, fresh] = m.delta[from].emplace(code, to);
        if (!fresh && pos->second != to)
            throw InputError("conflicting transitions from " + m.states[from] + " on " +
                             m.joint_to_string(a));
    }

    // labeling
    m.labels.assign(n, {});
    const json& lab = j.at("labeling");
    if (!lab.is_object()) throw InputError("labeling must be an object");
    for (auto it = lab.begin(); it != lab.end(); ++it) {
        int s = m.state_index(it.key());
        if (s < 0) throw InputError("labeling references unknown state \"" + it.key() + "\"");
        for (const auto& name : string_list(it.value(), "labeling entry")) {
            int a = m.atom_index(name);
            if (a < 0) throw InputError("labeling uses unknown atom \"" + name + "\"");
            m.labels[s].push_back(a);
        }
        auto& l = m.labels[s];
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }

    return m;
}

// ============================================================================
// Saving
// ============================================================================

ordered_json model_to_json(const Icgs& m) {
    ordered_json j;
    j["agents"] = m.agents;
    j["atoms"] = m.atoms;
    j["states"] = m.states;
    j["initial"] = m.states[m.initial];

    ordered_json actions = ordered_json::object();
    for (size_t i = 0; i < m.agents.size(); ++i) actions[m.agents[i]] = m.actions[i];
    j["actions"] = actions;

    ordered_json ind = ordered_json::object();
    for (size_t i = 0; i < m.agents.size(); ++i) {
        // classes with at least two members, ordered by smallest member
        std::map<int, std::vector<int>> classes;
        for (size_t s = 0; s < m.states.size(); ++s)
            classes[m.eq_class[i][s]].push_back(static_cast<int>(s));
        ordered_json groups = ordered_json::array();
        std::vector<std::vector<int>> nontrivial;
        for (auto& [c, members] : classes)
            if (members.size() >= 2) nontrivial.push_back(members);
        std::sort(nontrivial.begin(), nontrivial.end());
        for (const auto& members : nontrivial) {
            ordered_json g = ordered_json::array();
            for (int s : members) g.push_back(m.states[s]);
            groups.push_back(g);
        }
        ind[m.agents[i]] = groups;
    }
    j["indistinguishability"] = ind;

    ordered_json proto = ordered_json::object();
    for (size_t i = 0; i < m.agents.size(); ++i) {
        ordered_json per_state = ordered_json::object();
        for (size_t s = 0; s < m.states.size(); ++s) {
            ordered_json acts = ordered_json::array();
            for (int a : m.protocol[i][s]) acts.push_back(m.actions[i][a]);
            per_state[m.states[s]] = acts;
        }
        proto[m.agents[i]] = per_state;
    }
    j["protocol"] = proto;

    ordered_json trans = ordered_json::array();
    for (size_t s = 0; s < m.states.size(); ++s) {
        for (const auto& [code, succ] : m.delta[s]) {
            JointAction a = m.decode_joint(code);
            ordered_json t;
            t["from"] = m.states[s];
            ordered_json act = ordered_json::object();
            for (size_t i = 0; i < m.agents.size(); ++i) act[m.agents[i]] = m.actions[i][a[i]];
            t["act"] = act;
            t["to"] = m.states[succ];
            trans.push_back(t);
        }
    }
    j["transitions"] = trans;

    ordered_json lab = ordered_json::object();
    for (size_t s = 0; s < m.states.size(); ++s) {
        ordered_json atoms = ordered_json::array();
        for (int a : m.labels[s]) atoms.push_back(m.atoms[a]);
        lab[m.states[s]] = atoms;
    }
    j["labeling"] = lab;

    return j;
}

std::string model_to_canonical_string(const Icgs& m) { return model_to_json(m).dump(2) + "\n"; }

Icgs load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("invalid JSON in " + path + ": " + e.what());
    }
    return model_from_json(j);
}

void save_model_file(const Icgs& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write model file: " + path);
    out << model_to_canonical_string(m);
}

// ============================================================================
// Traces
// ============================================================================

Trace trace_from_json(const json& j) {
    if (!j.is_array()) throw InputError("trace JSON must be an array of arrays");
    Trace t;
    for (const auto& ev : j) t.events.push_back(string_list(ev, "trace event"));
    return t;
}

json trace_to_json(const Trace& t) {
    json j = json::array();
    for (const auto& ev : t.events) j.push_back(ev);
    return j;
}

Trace parse_trace_text(const std::string& text) {
    Trace t;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        std::vector<std::string> ev;
        std::string atom;
        std::istringstream ls(line);
        while (std::getline(ls, atom, ',')) {
            size_t b = atom.find_first_not_of(" \t\r");
            size_t e = atom.find_last_not_of(" \t\r");
            if (b == std::string::npos) continue;
            ev.push_back(atom.substr(b, e - b + 1));
        }
        t.events.push_back(std::move(ev));
    }
    return t;
}

std::string trace_to_text(const Trace& t) {
    std::string out;
    for (const auto& ev : t.events) {
        for (size_t i = 0; i < ev.size(); ++i) {
            if (i) out += ',';
            out += ev[i];
        }
        out += '\n';
    }
    return out;
}

static bool has_json_extension(const std::string& path) {
    return path.size() >= 5 && path.substr(path.size() - 5) == ".json";
}

Trace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (has_json_extension(path)) {
        try {
            return trace_from_json(json::parse(buf.str()));
        } catch (const json::exception& e) {
            throw InputError("invalid JSON trace in " + path + ": " + e.what());
        }
    }
    return parse_trace_text(buf.str());
}

void save_trace_file(const Trace& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write trace file: " + path);
    if (has_json_extension(path))
        out << trace_to_json(t).dump(2) << "\n";
    else
        out << trace_to_text(t);
}

} // namespace stratmon
