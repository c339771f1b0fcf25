#include "stratmon/submodel.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "stratmon/errors.hpp"

namespace stratmon {

// ============================================================================
// Sub-model construction
// ============================================================================

namespace {

std::string fresh_state_name(const Icgs& m, const std::vector<int>& core, std::string base) {
    std::set<std::string> taken;
    for (int s : core) taken.insert(m.states[s]);
    std::string name = base;
    for (int k = 1; taken.count(name); ++k) name = base + "_" + std::to_string(k);
    return name;
}

Icgs build_submodel(const Icgs& m, const std::vector<int>& core, bool positive) {
    if (core.empty()) throw InputError("sub-model core must be nonempty");
    std::vector<int> sorted = core;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (!std::binary_search(sorted.begin(), sorted.end(), m.initial))
        throw InputError("sub-model core must contain the initial state");
    for (int s : sorted)
        if (s < 0 || s >= static_cast<int>(m.states.size()))
            throw InputError("sub-model core references unknown state");

    size_t nc = sorted.size();
    size_t na = m.agents.size();
    int sink = static_cast<int>(nc);

    std::vector<int> parent_to_sub(m.states.size(), -1);
    for (size_t k = 0; k < nc; ++k) parent_to_sub[sorted[k]] = static_cast<int>(k);

    Icgs out;
    out.agents = m.agents;
    out.atoms = m.atoms;
    out.actions = m.actions;
    for (size_t k = 0; k < nc; ++k) out.states.push_back(m.states[sorted[k]]);
    out.states.push_back(fresh_state_name(m, sorted, positive ? "s_top" : "s_bot"));
    out.initial = parent_to_sub[m.initial];

    // ~_i restricted to the core; the sink forms its own class
    out.eq_class.assign(na, std::vector<int>(nc + 1, 0));
    for (size_t i = 0; i < na; ++i) {
        std::map<int, int> parent_class_to_sub;
        for (size_t k = 0; k < nc; ++k) {
            int pc = m.eq_class[i][sorted[k]];
            auto [it, fresh] = parent_class_to_sub.emplace(pc, static_cast<int>(parent_class_to_sub.size()));
            (void)fresh;
            out.eq_class[i][k] = it->second;
        }
        out.eq_class[i][sink] = static_cast<int>(parent_class_to_sub.size());
    }

    // protocols: unchanged on the core, every action at the sink
    out.protocol.assign(na, std::vector<std::vector<int>>(nc + 1));
    for (size_t i = 0; i < na; ++i) {
        for (size_t k = 0; k < nc; ++k) out.protocol[i][k] = m.protocol[i][sorted[k]];
        out.protocol[i][sink].resize(m.actions[i].size());
        for (size_t a = 0; a < m.actions[i].size(); ++a)
            out.protocol[i][sink][a] = static_cast<int>(a);
    }

    // transitions: core-to-core kept, everything else redirected to the sink;
    // the sink is absorbing under all joint actions
    out.delta.assign(nc + 1, {});
    for (size_t k = 0; k < nc; ++k) {
        for (const auto& [code, succ] : m.delta[sorted[k]]) {
            int sub_succ = parent_to_sub[succ];
            out.delta[k].emplace(code, sub_succ >= 0 ? sub_succ : sink);
        }
    }
    out.rebuild_index();
    for (const auto& a : enabled_joint_actions(out, sink))
        out.delta[sink].emplace(out.encode_joint(a), sink);

    // labels: unchanged on the core; sink all-false or all-true
    out.labels.assign(nc + 1, {});
    for (size_t k = 0; k < nc; ++k) out.labels[k] = m.labels[sorted[k]];
    if (positive) {
        out.labels[sink].resize(m.atoms.size());
        for (size_t a = 0; a < m.atoms.size(); ++a) out.labels[sink][a] = static_cast<int>(a);
    }

    return out;
}

} // namespace

Icgs build_negative(const Icgs& m, const std::vector<int>& core) {
    return build_submodel(m, core, false);
}

Icgs build_positive(const Icgs& m, const std::vector<int>& core) {
    return build_submodel(m, core, true);
}

// ============================================================================
// Candidate enumeration
// ============================================================================

namespace {

struct CoreSearch {
    const Icgs& m;
    size_t limit;
    std::vector<char> confused;
    std::vector<std::vector<int>> successors; // deduplicated successor states
    std::vector<std::vector<int>> results;
    std::set<std::vector<int>> seen;

    CoreSearch(const Icgs& model, size_t lim) : m(model), limit(lim) {
        size_t n = m.states.size();
        confused.resize(n);
        successors.resize(n);
        for (size_t s = 0; s < n; ++s) {
            confused[s] = state_confused(m, static_cast<int>(s));
            std::set<int> succ;
            for (const auto& [code, t] : m.delta[s]) {
                (void)code;
                succ.insert(t);
            }
            successors[s] = {succ.begin(), succ.end()};
        }
    }

    bool conflicts(int s, const std::set<int>& core) const {
        for (size_t i = 0; i < m.agents.size(); ++i) {
            int c = m.eq_class[i][s];
            for (int t : core)
                if (t != s && m.eq_class[i][t] == c) return true;
        }
        return false;
    }

    // Grows the core over the frontier; branches at confused states on
    // whether to retain them. Include-branch explored first, so candidate
    // order is deterministic.
    void grow(std::set<int> core, std::set<int> frontier, std::set<int> rejected) {
        while (!frontier.empty()) {
            if (results.size() >= limit) return;
            int s = *frontier.begin();
            frontier.erase(frontier.begin());
            if (core.count(s) || rejected.count(s)) continue;
            if (conflicts(s, core)) continue;
            if (!confused[s]) {
                core.insert(s);
                for (int t : successors[s])
                    if (!core.count(t)) frontier.insert(t);
                continue;
            }
            // branch: retain s ...
            {
                std::set<int> core2 = core;
                std::set<int> frontier2 = frontier;
                core2.insert(s);
                for (int t : successors[s])
                    if (!core2.count(t)) frontier2.insert(t);
                grow(std::move(core2), std::move(frontier2), rejected);
            }
            // ... or cut the edges leading to it
            rejected.insert(s);
        }
        if (results.size() >= limit) return;
        std::vector<int> out(core.begin(), core.end());
        if (seen.insert(out).second) results.push_back(std::move(out));
    }
};

} // namespace

std::vector<std::vector<int>> enumerate_cores(const Icgs& m, size_t limit) {
    if (limit == 0) throw InputError("candidate limit must be positive");
    CoreSearch search(m, limit);
    std::set<int> core{m.initial};
    std::set<int> frontier(search.successors[m.initial].begin(),
                           search.successors[m.initial].end());
    frontier.erase(m.initial);
    search.grow(std::move(core), std::move(frontier), {});
    return search.results;
}

std::vector<SubmodelPair> find_submodels(const Icgs& m, const FormulaPtr& f, size_t limit) {
    (void)f; // candidate extraction is formula independent in this design
    std::vector<SubmodelPair> out;
    for (auto& core : enumerate_cores(m, limit)) {
        SubmodelPair pair;
        pair.core = core;
        pair.negative = build_negative(m, core);
        pair.positive = build_positive(m, core);
        out.push_back(std::move(pair));
    }
    return out;
}

} // namespace stratmon
