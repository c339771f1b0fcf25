// Concurrent game structures with imperfect information: representation,
// validation, execution, histories and traces.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace stratmon {

// A joint action assigns one action index per agent (agent order of the model).
using JointAction = std::vector<int>;

// Identifiers are opaque strings externally and dense indices internally.
// An Icgs is treated as immutable once validated; the operations below that
// produce modified models return copies.
class Icgs {
public:
    std::vector<std::string> agents;
    std::vector<std::string> atoms;
    std::vector<std::string> states;
    int initial = 0;

    // actions[i] = ordered action set of agent i
    std::vector<std::vector<std::string>> actions;
    // eq_class[i][s] = equivalence class id of state s for agent i.
    // Class ids are dense, assigned by smallest member state index.
    std::vector<std::vector<int>> eq_class;
    // protocol[i][s] = sorted action indices available to agent i at state s
    std::vector<std::vector<std::vector<int>>> protocol;
    // delta[s] = joint action code -> successor state (ordered for determinism)
    std::vector<std::map<uint64_t, int>> delta;
    // labels[s] = sorted atom indices
    std::vector<std::vector<int>> labels;

    // ---- index lookups (-1 when absent) ----
    int state_index(const std::string& name) const;
    int atom_index(const std::string& name) const;
    int agent_index(const std::string& name) const;
    int action_index(int agent, const std::string& name) const;

    bool has_atom(int state, int atom) const;

    // ---- joint action coding (mixed radix over per-agent action counts) ----
    uint64_t encode_joint(const JointAction& a) const;
    JointAction decode_joint(uint64_t code) const;
    std::string joint_to_string(const JointAction& a) const;

    size_t agent_count() const { return agents.size(); }
    size_t state_count() const { return states.size(); }

    // Appends a fresh atom labelled exactly on `where` (state indices).
    // The atom must not already exist.
    void add_atom(const std::string& name, const std::vector<int>& where);

    // Recomputes the internal name->index lookups (loaders call this).
    void rebuild_index();

private:
    std::unordered_map<std::string, int> state_idx_, atom_idx_, agent_idx_;
    std::vector<std::unordered_map<std::string, int>> action_idx_;
};

// Nonempty sequence of state indices.
struct History {
    std::vector<int> states;
};

// Finite sequence of events; each event is a set of atom names.
struct Trace {
    std::vector<std::vector<std::string>> events;
};

// ---- Def. 1 validation ------------------------------------------------------

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_model(const Icgs& m);

// ---- execution --------------------------------------------------------------

// All joint actions enabled at s: every component allowed by the protocol.
std::vector<JointAction> enabled_joint_actions(const Icgs& m, int s);

// Successor under an enabled joint action; ProtocolError (naming the blocking
// agent) if some component is not allowed, InputError on unknown state.
int step(const Icgs& m, int s, const JointAction& a);

// True when a history is a legal run of m: all states exist and consecutive
// states are connected by some enabled joint action.
bool history_valid(const Icgs& m, const History& h);

// Synchronous point-wise lift of ~_i to histories.
bool histories_indistinguishable(const Icgs& m, int agent, const History& h1, const History& h2);

// Fraction of states that some agent cannot tell apart from another state.
double imperfect_information_degree(const Icgs& m);

bool state_confused(const Icgs& m, int s);

} // namespace stratmon
