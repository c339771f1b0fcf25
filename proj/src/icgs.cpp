#include "stratmon/icgs.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "stratmon/errors.hpp"

namespace stratmon {

// ============================================================================
// Lookups
// ============================================================================

void Icgs::rebuild_index() {
    state_idx_.clear();
    atom_idx_.clear();
    agent_idx_.clear();
    action_idx_.assign(agents.size(), {});
    for (size_t i = 0; i < states.size(); ++i) state_idx_[states[i]] = static_cast<int>(i);
    for (size_t i = 0; i < atoms.size(); ++i) atom_idx_[atoms[i]] = static_cast<int>(i);
    for (size_t i = 0; i < agents.size(); ++i) agent_idx_[agents[i]] = static_cast<int>(i);
    for (size_t i = 0; i < agents.size(); ++i)
        for (size_t a = 0; a < actions[i].size(); ++a)
            action_idx_[i][actions[i][a]] = static_cast<int>(a);
}

static int lookup(const std::unordered_map<std::string, int>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? -1 : it->second;
}

int Icgs::state_index(const std::string& name) const { return lookup(state_idx_, name); }
int Icgs::atom_index(const std::string& name) const { return lookup(atom_idx_, name); }
int Icgs::agent_index(const std::string& name) const { return lookup(agent_idx_, name); }
int Icgs::action_index(int agent, const std::string& name) const {
    if (agent < 0 || agent >= static_cast<int>(action_idx_.size())) return -1;
    return lookup(action_idx_[agent], name);
}

bool Icgs::has_atom(int state, int atom) const {
    const auto& l = labels[state];
    return std::binary_search(l.begin(), l.end(), atom);
}

uint64_t Icgs::encode_joint(const JointAction& a) const {
    uint64_t code = 0;
    uint64_t radix = 1;
    for (size_t i = 0; i < agents.size(); ++i) {
        code += radix * static_cast<uint64_t>(a[i]);
        radix *= actions[i].size();
    }
    return code;
}

JointAction Icgs::decode_joint(uint64_t code) const {
    JointAction a(agents.size());
    for (size_t i = 0; i < agents.size(); ++i) {
        uint64_t n = actions[i].size();
        a[i] = static_cast<int>(code % n);
        code /= n;
    }
    return a;
}

std::string Icgs::joint_to_string(const JointAction& a) const {
    std::string out = "(";
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) out += ',';
        out += actions[i][a[i]];
    }
    out += ')';
    return out;
}

void Icgs::add_atom(const std::string& name, const std::vector<int>& where) {
    if (atom_index(name) >= 0) throw InputError("atom already exists: " + name);
    int idx = static_cast<int>(atoms.size());
    atoms.push_back(name);
    atom_idx_[name] = idx;
    for (int s : where) {
        labels[s].push_back(idx); // new index is largest, order preserved
    }
}

// ============================================================================
// Validation
// ============================================================================

ValidationReport validate_model(const Icgs& m) {
    ValidationReport rep;
    auto add = [&](const std::string& v) { rep.violations.push_back(v); };

    if (m.states.empty()) {
        add("state set is empty");
        return rep;
    }
    if (m.agents.empty()) add("agent set is empty");
    if (m.initial < 0 || m.initial >= static_cast<int>(m.states.size()))
        add("initial state index out of range");

    size_t n = m.states.size();
    size_t na = m.agents.size();

    bool shape_ok = m.actions.size() == na && m.eq_class.size() == na &&
                    m.protocol.size() == na && m.delta.size() == n && m.labels.size() == n;
    if (!shape_ok) {
        add("internal component sizes do not match agent/state counts");
        return rep;
    }

    for (size_t i = 0; i < na; ++i) {
        if (m.actions[i].empty()) add("agent " + m.agents[i] + " has no actions");
        if (m.eq_class[i].size() != n)
            add("indistinguishability map of agent " + m.agents[i] + " does not cover all states");
        if (m.protocol[i].size() != n)
            add("protocol of agent " + m.agents[i] + " does not cover all states");
    }
    if (!rep.ok()) return rep;

    // labels reference known atoms
    for (size_t s = 0; s < n; ++s) {
        for (int a : m.labels[s]) {
            if (a < 0 || a >= static_cast<int>(m.atoms.size()))
                add("state " + m.states[s] + " labelled with unknown atom index");
        }
    }

    // protocol: nonempty, within Act_i, uniform across ~_i classes
    for (size_t i = 0; i < na; ++i) {
        for (size_t s = 0; s < n; ++s) {
            const auto& p = m.protocol[i][s];
            if (p.empty())
                add("protocol of agent " + m.agents[i] + " empty at state " + m.states[s]);
            for (int a : p) {
                if (a < 0 || a >= static_cast<int>(m.actions[i].size()))
                    add("protocol of agent " + m.agents[i] + " at state " + m.states[s] +
                        " references unknown action");
            }
        }
        for (size_t s = 0; s < n; ++s) {
            for (size_t t = s + 1; t < n; ++t) {
                if (m.eq_class[i][s] == m.eq_class[i][t] && m.protocol[i][s] != m.protocol[i][t]) {
                    add("protocol uniformity violated: " + m.states[s] + " ~_" + m.agents[i] +
                        " " + m.states[t] + " but protocols differ");
                }
            }
        }
    }

    // transitions: total on enabled joint actions, absent elsewhere
    for (size_t s = 0; s < n; ++s) {
        auto enabled = enabled_joint_actions(m, static_cast<int>(s));
        std::set<uint64_t> enabled_codes;
        for (const auto& a : enabled) enabled_codes.insert(m.encode_joint(a));
        for (uint64_t code : enabled_codes) {
            auto it = m.delta[s].find(code);
            if (it == m.delta[s].end()) {
                add("missing transition at " + m.states[s] + " for enabled joint action " +
                    m.joint_to_string(m.decode_joint(code)));
            } else if (it->second < 0 || it->second >= static_cast<int>(n)) {
                add("transition at " + m.states[s] + " leads to unknown state");
            }
        }
        for (const auto& [code, succ] : m.delta[s]) {
            (void)succ;
            if (!enabled_codes.count(code))
                add("transition defined at " + m.states[s] + " for non-enabled joint action " +
                    m.joint_to_string(m.decode_joint(code)));
        }
    }

    return rep;
}

// ============================================================================
// Execution
// ============================================================================

std::vector<JointAction> enabled_joint_actions(const Icgs& m, int s) {
    if (s < 0 || s >= static_cast<int>(m.states.size()))
        throw InputError("unknown state index in enabled_joint_actions");
    std::vector<JointAction> out;
    size_t na = m.agents.size();
    JointAction current(na, 0);
    std::vector<size_t> pos(na, 0);
    // odometer over the per-agent protocol sets
    for (size_t i = 0; i < na; ++i) {
        if (m.protocol[i][s].empty()) return out;
        current[i] = m.protocol[i][s][0];
    }
    for (;;) {
        out.push_back(current);
        size_t i = 0;
        for (; i < na; ++i) {
            if (++pos[i] < m.protocol[i][s].size()) {
                current[i] = m.protocol[i][s][pos[i]];
                break;
            }
            pos[i] = 0;
            current[i] = m.protocol[i][s][0];
        }
        if (i == na) break;
    }
    return out;
}

int step(const Icgs& m, int s, const JointAction& a) {
    if (s < 0 || s >= static_cast<int>(m.states.size()))
        throw InputError("unknown state index in step");
    if (a.size() != m.agents.size()) throw InputError("joint action arity mismatch");
    for (size_t i = 0; i < m.agents.size(); ++i) {
        const auto& p = m.protocol[i][s];
        if (!std::binary_search(p.begin(), p.end(), a[i]))
            throw ProtocolError("action " + m.actions[i][a[i]] + " not enabled for agent " +
                                    m.agents[i] + " at state " + m.states[s],
                                m.agents[i]);
    }
    auto it = m.delta[s].find(m.encode_joint(a));
    if (it == m.delta[s].end())
        throw InputError("transition missing at " + m.states[s] + " for " + m.joint_to_string(a));
    return it->second;
}

bool history_valid(const Icgs& m, const History& h) {
    if (h.states.empty()) return false;
    for (int s : h.states)
        if (s < 0 || s >= static_cast<int>(m.states.size())) return false;
    for (size_t j = 0; j + 1 < h.states.size(); ++j) {
        bool connected = false;
        for (const auto& [code, succ] : m.delta[h.states[j]]) {
            (void)code;
            if (succ == h.states[j + 1]) {
                connected = true;
                break;
            }
        }
        if (!connected) return false;
    }
    return true;
}

bool histories_indistinguishable(const Icgs& m, int agent, const History& h1, const History& h2) {
    if (h1.states.size() != h2.states.size()) return false;
    for (size_t j = 0; j < h1.states.size(); ++j) {
        if (m.eq_class[agent][h1.states[j]] != m.eq_class[agent][h2.states[j]]) return false;
    }
    return true;
}

bool state_confused(const Icgs& m, int s) {
    for (size_t i = 0; i < m.agents.size(); ++i) {
        int c = m.eq_class[i][s];
        for (size_t t = 0; t < m.states.size(); ++t) {
            if (static_cast<int>(t) != s && m.eq_class[i][t] == c) return true;
        }
    }
    return false;
}

double imperfect_information_degree(const Icgs& m) {
    if (m.states.empty()) return 0.0;
    size_t confused = 0;
    for (size_t s = 0; s < m.states.size(); ++s)
        if (state_confused(m, static_cast<int>(s))) ++confused;
    return static_cast<double>(confused) / static_cast<double>(m.states.size());
}

} // namespace stratmon
