#include "stratmon/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "stratmon/errors.hpp"

namespace stratmon {

namespace {

// A strategy window: the last (up to k) visited states. Uniformity identifies
// windows that are pointwise indistinguishable for the agent, so the strategy
// domain is the window's per-position class signature.
using Window = std::vector<int>;

struct AgentDomain {
    // signature -> index into choices; signature = class ids of the window
    std::map<std::vector<int>, int> signature_index;
    std::vector<std::vector<int>> allowed; // per signature: protocol actions
};

struct OracleEngine {
    const Icgs& m;
    int window_len;
    std::map<std::pair<const Formula*, int>, bool> memo;

    OracleEngine(const Icgs& model, int k) : m(model), window_len(k) {}

    std::vector<int> signature_of(int agent, const Window& w) const {
        std::vector<int> sig;
        sig.reserve(w.size());
        for (int s : w) sig.push_back(m.eq_class[agent][s]);
        return sig;
    }

    Window advance(const Window& w, int next_state) const {
        Window out = w;
        out.push_back(next_state);
        if (static_cast<int>(out.size()) > window_len)
            out.erase(out.begin(), out.end() - window_len);
        return out;
    }

    // Collects every window signature reachable from the start state under
    // arbitrary protocol-respecting behaviour, per coalition agent.
    std::vector<AgentDomain> collect_domains(const std::vector<int>& coalition, int start) {
        std::vector<AgentDomain> domains(coalition.size());
        std::set<Window> seen;
        std::vector<Window> work{{start}};
        seen.insert(work[0]);
        while (!work.empty()) {
            Window w = work.back();
            work.pop_back();
            int s = w.back();
            for (size_t c = 0; c < coalition.size(); ++c) {
                auto sig = signature_of(coalition[c], w);
                auto& dom = domains[c];
                if (!dom.signature_index.count(sig)) {
                    dom.signature_index.emplace(sig, static_cast<int>(dom.allowed.size()));
                    dom.allowed.push_back(m.protocol[coalition[c]][s]);
                }
            }
            for (const auto& [code, succ] : m.delta[s]) {
                (void)code;
                Window nw = advance(w, succ);
                if (seen.insert(nw).second) work.push_back(nw);
            }
        }
        return domains;
    }

    // Distinct successor states at window w when coalition agents play the
    // profile's actions and the rest play any protocol action.
    std::vector<int> profile_successors(const std::vector<int>& coalition,
                                        const std::vector<AgentDomain>& domains,
                                        const std::vector<std::vector<int>>& profile,
                                        const Window& w) {
        int s = w.back();
        std::vector<char> fixed(m.agents.size(), 0);
        JointAction scratch(m.agents.size(), 0);
        for (size_t c = 0; c < coalition.size(); ++c) {
            auto it = domains[c].signature_index.find(signature_of(coalition[c], w));
            scratch[coalition[c]] = profile[c][it->second];
            fixed[coalition[c]] = 1;
        }
        std::vector<int> free_agents;
        for (size_t i = 0; i < m.agents.size(); ++i)
            if (!fixed[i]) free_agents.push_back(static_cast<int>(i));

        std::set<int> succ;
        std::vector<size_t> pos(free_agents.size(), 0);
        for (int i : free_agents) scratch[i] = m.protocol[i][s][0];
        for (;;) {
            auto it = m.delta[s].find(m.encode_joint(scratch));
            if (it != m.delta[s].end()) succ.insert(it->second);
            size_t k = 0;
            for (; k < free_agents.size(); ++k) {
                int i = free_agents[k];
                if (++pos[k] < m.protocol[i][s].size()) {
                    scratch[i] = m.protocol[i][s][pos[k]];
                    break;
                }
                pos[k] = 0;
                scratch[i] = m.protocol[i][s][0];
            }
            if (k == free_agents.size()) break;
        }
        return {succ.begin(), succ.end()};
    }

    // ---- path formulas on lassos -------------------------------------------
    //
    // A lasso is the position sequence of a walk cut at its first repeated
    // window. For single-operator path formulas over state operands this
    // enumeration is violation- and witness-complete.

    bool lasso_satisfies(const FormulaPtr& path, const std::vector<int>& states) {
        switch (path->op) {
            case FOp::Next:
                return eval_state(path->lhs, states[1]);
            case FOp::Until: {
                bool lhs_so_far = true;
                for (int s : states) {
                    if (eval_state(path->rhs, s)) return true;
                    if (!eval_state(path->lhs, s)) {
                        lhs_so_far = false;
                        break;
                    }
                }
                (void)lhs_so_far;
                return false;
            }
            case FOp::Release: {
                bool released = false;
                for (int s : states) {
                    if (!released && !eval_state(path->rhs, s)) return false;
                    if (eval_state(path->lhs, s)) released = true;
                    if (released) return true;
                }
                return true; // phi2 holds on every distinct position
            }
            default:
                throw FragmentError("oracle path formula outside the ATL fragment: " +
                                    print_formula(path));
        }
    }

    // Enumerates first-repeat lassos of the profile graph from `start`;
    // returns true when `want_all` demands all lassos satisfy and they do,
    // or when !want_all and some lasso satisfies.
    bool lassos_check(const FormulaPtr& path, const std::vector<int>& coalition,
                      const std::vector<AgentDomain>& domains,
                      const std::vector<std::vector<int>>& profile, int start, bool want_all) {
        Window w0{start};
        std::vector<Window> walk{w0};
        std::vector<int> states{start};
        bool result = want_all;
        dfs_lassos(path, coalition, domains, profile, walk, states, want_all, result);
        return result;
    }

    void dfs_lassos(const FormulaPtr& path, const std::vector<int>& coalition,
                    const std::vector<AgentDomain>& domains,
                    const std::vector<std::vector<int>>& profile, std::vector<Window>& walk,
                    std::vector<int>& states, bool want_all, bool& result) {
        // stop as soon as the quantifier is decided
        if (result != want_all) return;
        const Window& cur = walk.back();
        for (int succ : profile_successors(coalition, domains, profile, cur)) {
            if (result != want_all) return;
            Window nw = advance(cur, succ);
            bool repeat = std::find(walk.begin(), walk.end(), nw) != walk.end();
            walk.push_back(nw);
            states.push_back(succ);
            if (repeat) {
                bool sat = lasso_satisfies(path, states);
                if (want_all && !sat) result = false;
                if (!want_all && sat) result = true;
            } else {
                dfs_lassos(path, coalition, domains, profile, walk, states, want_all, result);
            }
            walk.pop_back();
            states.pop_back();
        }
    }

    // ---- state formulas ------------------------------------------------------

    bool eval_state(const FormulaPtr& f, int s) {
        auto key = std::make_pair(f.get(), s);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool v = eval_state_uncached(f, s);
        memo.emplace(key, v);
        return v;
    }

    bool eval_state_uncached(const FormulaPtr& f, int s) {
        switch (f->op) {
            case FOp::Atom: {
                if (f->is_true()) return true;
                if (f->is_false()) return false;
                int a = m.atom_index(f->atom);
                return a >= 0 && m.has_atom(s, a);
            }
            case FOp::Not: return !eval_state(f->lhs, s);
            case FOp::And: return eval_state(f->lhs, s) && eval_state(f->rhs, s);
            case FOp::Or: return eval_state(f->lhs, s) || eval_state(f->rhs, s);
            case FOp::Exists: return eval_strategic(f, s, /*exists=*/true);
            case FOp::ForAll: return eval_strategic(f, s, /*exists=*/false);
            default:
                throw FragmentError("oracle state formula outside the ATL fragment: " +
                                    print_formula(f));
        }
    }

    bool eval_strategic(const FormulaPtr& f, int s, bool exists) {
        std::vector<int> coalition;
        for (const auto& name : f->coalition) {
            int i = m.agent_index(name);
            if (i < 0) throw InputError("coalition references unknown agent \"" + name + "\"");
            coalition.push_back(i);
        }
        auto domains = collect_domains(coalition, s);

        size_t total_choices = 0;
        for (const auto& d : domains) total_choices += d.allowed.size();
        if (total_choices > 24)
            throw OracleScaleError("strategy domain too large for the oracle");

        // odometer over per-signature action choices of every coalition agent
        std::vector<std::vector<int>> profile(coalition.size());
        for (size_t c = 0; c < coalition.size(); ++c) {
            profile[c].resize(domains[c].allowed.size());
            for (size_t d = 0; d < profile[c].size(); ++d)
                profile[c][d] = domains[c].allowed[d][0];
        }
        std::vector<std::pair<size_t, size_t>> slots; // (agent pos, signature pos)
        for (size_t c = 0; c < coalition.size(); ++c)
            for (size_t d = 0; d < domains[c].allowed.size(); ++d) slots.emplace_back(c, d);
        std::vector<size_t> idx(slots.size(), 0);

        const FormulaPtr& path = f->lhs;
        for (;;) {
            // Exists: some profile forces the objective on all outcome paths.
            // ForAll: every profile leaves some outcome path satisfying it.
            bool all_paths = lassos_check(path, coalition, domains, profile, s, true);
            if (exists && all_paths) return true;
            if (!exists && !all_paths) {
                bool some_path = lassos_check(path, coalition, domains, profile, s, false);
                if (!some_path) return false;
            }
            size_t k = 0;
            for (; k < slots.size(); ++k) {
                auto [c, d] = slots[k];
                if (++idx[k] < domains[c].allowed[d].size()) {
                    profile[c][d] = domains[c].allowed[d][idx[k]];
                    break;
                }
                idx[k] = 0;
                profile[c][d] = domains[c].allowed[d][0];
            }
            if (k == slots.size()) break;
        }
        return !exists;
    }
};

} // namespace

bool oracle_evaluate(const Icgs& m, const FormulaPtr& f, int state, OracleRecall recall) {
    if (m.states.size() > 8 || m.agents.size() > 2)
        throw OracleScaleError("model exceeds oracle bounds (8 states, 2 agents)");
    for (size_t i = 0; i < m.agents.size(); ++i)
        for (size_t s = 0; s < m.states.size(); ++s)
            if (m.protocol[i][s].size() > 3)
                throw OracleScaleError("protocol exceeds oracle bounds (3 actions)");
    if (recall.window < 1) throw InputError("oracle recall window must be positive");
    if (state < 0 || state >= static_cast<int>(m.states.size()))
        throw InputError("unknown state in oracle_evaluate");
    if (!is_atl(f)) throw FragmentError("oracle handles the ATL fragment only");

    OracleEngine engine(m, recall.window);
    return engine.eval_state(f, state);
}

} // namespace stratmon
