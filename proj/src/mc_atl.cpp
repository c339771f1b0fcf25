#include "stratmon/mc_atl.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "stratmon/errors.hpp"

namespace stratmon {

// ============================================================================
// Controllable predecessor
// ============================================================================

namespace {

// Enumerates tuples of protocol actions for the given agents at state s,
// invoking fn with a scratch joint action whose other components are
// unspecified. fn assigns the rest itself.
template <typename Fn>
void for_each_tuple(const Icgs& m, const std::vector<int>& agents, int s, JointAction& scratch,
                    size_t k, Fn&& fn) {
    if (k == agents.size()) {
        fn();
        return;
    }
    int i = agents[k];
    for (int a : m.protocol[i][s]) {
        scratch[i] = a;
        for_each_tuple(m, agents, s, scratch, k + 1, fn);
    }
}

std::vector<int> complement_agents(const Icgs& m, const std::vector<int>& coalition) {
    std::vector<char> in(m.agents.size(), 0);
    for (int i : coalition) in[i] = 1;
    std::vector<int> out;
    for (size_t i = 0; i < m.agents.size(); ++i)
        if (!in[i]) out.push_back(static_cast<int>(i));
    return out;
}

void require_perfect_information(const Icgs& m) {
    for (size_t i = 0; i < m.agents.size(); ++i) {
        std::set<int> classes(m.eq_class[i].begin(), m.eq_class[i].end());
        if (classes.size() != m.states.size())
            throw InputError("operation requires a perfect-information model");
    }
}

} // namespace

StateSet coalition_pre(const Icgs& m, const std::vector<int>& coalition, const StateSet& targets) {
    std::vector<int> others = complement_agents(m, coalition);
    StateSet out(m.states.size(), 0);
    JointAction scratch(m.agents.size(), 0);
    for (size_t s = 0; s < m.states.size(); ++s) {
        bool found = false;
        for_each_tuple(m, coalition, static_cast<int>(s), scratch, 0, [&] {
            if (found) return;
            bool all_in = true;
            for_each_tuple(m, others, static_cast<int>(s), scratch, 0, [&] {
                if (!all_in) return;
                auto it = m.delta[s].find(m.encode_joint(scratch));
                if (it == m.delta[s].end() || !targets[it->second]) all_in = false;
            });
            if (all_in) found = true;
        });
        out[s] = found;
    }
    return out;
}

// Dual pre-image: every coalition tuple admits some completion into targets.
static StateSet coalition_pre_dual(const Icgs& m, const std::vector<int>& coalition,
                                   const StateSet& targets) {
    std::vector<int> others = complement_agents(m, coalition);
    StateSet out(m.states.size(), 0);
    JointAction scratch(m.agents.size(), 0);
    for (size_t s = 0; s < m.states.size(); ++s) {
        bool all_tuples = true;
        for_each_tuple(m, coalition, static_cast<int>(s), scratch, 0, [&] {
            if (!all_tuples) return;
            bool exists = false;
            for_each_tuple(m, others, static_cast<int>(s), scratch, 0, [&] {
                if (exists) return;
                auto it = m.delta[s].find(m.encode_joint(scratch));
                if (it != m.delta[s].end() && targets[it->second]) exists = true;
            });
            if (!exists) all_tuples = false;
        });
        out[s] = all_tuples;
    }
    return out;
}

// ============================================================================
// ATL fixpoint evaluation
// ============================================================================

namespace {

StateSet set_and(const StateSet& a, const StateSet& b) {
    StateSet out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
    return out;
}

StateSet set_or(const StateSet& a, const StateSet& b) {
    StateSet out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
    return out;
}

struct AtlChecker {
    const Icgs& m;
    std::map<std::string, StateSet> memo;

    explicit AtlChecker(const Icgs& model) : m(model) {}

    std::vector<int> bind_coalition(const std::vector<std::string>& names) {
        std::vector<int> out;
        for (const auto& name : names) {
            int i = m.agent_index(name);
            if (i < 0) throw InputError("coalition references unknown agent \"" + name + "\"");
            out.push_back(i);
        }
        return out;
    }

    StateSet eval(const FormulaPtr& f) {
        std::string key = print_formula(f);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        StateSet r = eval_uncached(f);
        memo.emplace(std::move(key), r);
        return r;
    }

    StateSet eval_uncached(const FormulaPtr& f) {
        size_t n = m.states.size();
        switch (f->op) {
            case FOp::Atom: {
                StateSet out(n, 0);
                if (f->is_true()) {
                    std::fill(out.begin(), out.end(), 1);
                } else if (!f->is_false()) {
                    int a = m.atom_index(f->atom);
                    if (a >= 0)
                        for (size_t s = 0; s < n; ++s) out[s] = m.has_atom(static_cast<int>(s), a);
                }
                return out;
            }
            case FOp::Not: {
                if (f->lhs->op != FOp::Atom)
                    throw FragmentError("negation only supported on literals: " + print_formula(f));
                StateSet inner = eval(f->lhs);
                for (auto& v : inner) v = !v;
                return inner;
            }
            case FOp::And: return set_and(eval(f->lhs), eval(f->rhs));
            case FOp::Or: return set_or(eval(f->lhs), eval(f->rhs));
            case FOp::Exists:
            case FOp::ForAll: return eval_strategic(f);
            default:
                throw FragmentError("bare temporal operator outside a quantifier: " +
                                    print_formula(f));
        }
    }

    StateSet eval_strategic(const FormulaPtr& f) {
        bool dual = f->op == FOp::ForAll;
        auto coalition = bind_coalition(f->coalition);
        auto pre = [&](const StateSet& t) {
            return dual ? coalition_pre_dual(m, coalition, t) : coalition_pre(m, coalition, t);
        };
        const FormulaPtr& path = f->lhs;
        switch (path->op) {
            case FOp::Next:
                return pre(eval(path->lhs));
            case FOp::Until: {
                // least fixpoint of Z = phi2 | (phi1 & pre(Z))
                StateSet phi1 = eval(path->lhs);
                StateSet phi2 = eval(path->rhs);
                StateSet z = phi2;
                for (;;) {
                    StateSet next = set_or(phi2, set_and(phi1, pre(z)));
                    if (next == z) return z;
                    z = std::move(next);
                }
            }
            case FOp::Release: {
                // greatest fixpoint of Z = phi2 & (phi1 | pre(Z))
                StateSet phi1 = eval(path->lhs);
                StateSet phi2 = eval(path->rhs);
                StateSet z(m.states.size(), 1);
                for (;;) {
                    StateSet next = set_and(phi2, set_or(phi1, pre(z)));
                    if (next == z) return z;
                    z = std::move(next);
                }
            }
            default:
                throw FragmentError("quantifier body outside the ATL fragment: " +
                                    print_formula(f));
        }
    }
};

} // namespace

StateSet check_atl(const Icgs& m, const FormulaPtr& f) {
    require_perfect_information(m);
    if (!is_atl(f)) throw FragmentError("formula outside the ATL fragment: " + print_formula(f));
    AtlChecker checker(m);
    return checker.eval(f);
}

// ============================================================================
// CheckSub-formulas
// ============================================================================

std::string check_atom_name(const FormulaPtr& sub, char tag) {
    std::ostringstream os;
    os << (tag == 'n' ? "natom_" : "patom_") << std::hex << formula_hash(sub);
    return os.str();
}

std::vector<std::string> CheckResult::atoms_at(int parent_state) const {
    std::set<std::string> out;
    for (const auto& e : entries)
        if (e.state == parent_state) out.insert(e.atom);
    return {out.begin(), out.end()};
}

namespace {

// Applies the registered substitutions innermost-first. Targets are themselves
// rewritten as inner ones are applied, so nested checked subformulas match.
FormulaPtr substitute_checked(FormulaPtr f,
                              const std::vector<std::pair<FormulaPtr, std::string>>& subs) {
    std::vector<std::pair<FormulaPtr, std::string>> pending = subs;
    std::stable_sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
        return node_count(a.first) < node_count(b.first);
    });
    for (size_t i = 0; i < pending.size(); ++i) {
        f = replace_subformula(f, pending[i].first, pending[i].second);
        for (size_t j = i + 1; j < pending.size(); ++j)
            pending[j].first =
                replace_subformula(pending[j].first, pending[i].first, pending[i].second);
    }
    return f;
}

} // namespace

CheckResult check_subformulas(const SubmodelPair& pair, const FormulaPtr& f) {
    CheckResult result;
    result.core = pair.core;

    Icgs mn = pair.negative;
    Icgs mp = pair.positive;
    int sink = pair.sink_index();

    std::vector<std::pair<FormulaPtr, std::string>> subs_n, subs_p;

    for (const FormulaPtr& psi : subformulas(f)) {
        if (!psi->is_strategic()) continue;

        // negative side: the sink never carries checked atoms, so the
        // substituted formula under-approximates psi within M_n
        FormulaPtr psi_n = substitute_checked(psi, subs_n);
        if (is_atl(psi_n)) {
            StateSet sat = check_atl(mn, psi_n);
            std::string atom = check_atom_name(psi, 'n');
            CheckedSub rec{psi, 'n', atom, {}};
            std::vector<int> label_states;
            for (int k = 0; k < sink; ++k) {
                if (sat[k]) {
                    int parent = pair.to_parent(k);
                    result.entries.push_back({parent, psi, 'n', atom});
                    rec.sat_core.push_back(parent);
                    label_states.push_back(k);
                }
            }
            mn.add_atom(atom, label_states);
            subs_n.emplace_back(psi, atom);
            result.checked.push_back(std::move(rec));
        }

        // positive side: the sink carries every atom, checked ones included,
        // so the substituted formula stays exact within M_p
        FormulaPtr psi_p = substitute_checked(psi, subs_p);
        if (is_atl(psi_p)) {
            StateSet sat = check_atl(mp, psi_p);
            std::string atom = check_atom_name(psi, 'p');
            CheckedSub rec{psi, 'p', atom, {}};
            std::vector<int> label_states;
            for (int k = 0; k < sink; ++k) {
                if (sat[k]) {
                    int parent = pair.to_parent(k);
                    result.entries.push_back({parent, psi, 'p', atom});
                    rec.sat_core.push_back(parent);
                    label_states.push_back(k);
                }
            }
            label_states.push_back(sink);
            mp.add_atom(atom, label_states);
            subs_p.emplace_back(psi, atom);
            result.checked.push_back(std::move(rec));
        }
    }

    return result;
}

} // namespace stratmon
