#include "stratmon/rv.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "stratmon/errors.hpp"
#include "stratmon/monitor.hpp"
#include "stratmon/submodel.hpp"

namespace stratmon {

// ============================================================================
// Model update
// ============================================================================

Icgs update_model(const Icgs& m, const CheckResult& results,
                  std::vector<std::pair<std::string, std::string>>* renames) {
    Icgs out = m;
    // deterministic atom order: first occurrence over checked list
    std::vector<std::string> order;
    std::map<std::string, std::vector<int>> where;
    for (const auto& rec : results.checked) {
        if (!where.count(rec.atom)) order.push_back(rec.atom);
        auto& states = where[rec.atom];
        states.insert(states.end(), rec.sat_core.begin(), rec.sat_core.end());
    }
    for (const auto& atom : order) {
        std::string name = atom;
        if (out.atom_index(name) >= 0) {
            int k = 1;
            while (out.atom_index(name + "_" + std::to_string(k)) >= 0) ++k;
            name += "_" + std::to_string(k);
            if (renames) renames->emplace_back(atom, name);
        }
        auto& states = where[atom];
        std::sort(states.begin(), states.end());
        states.erase(std::unique(states.begin(), states.end()), states.end());
        out.add_atom(name, states);
    }
    return out;
}

// ============================================================================
// Formula variants
// ============================================================================

namespace {

FormulaPtr apply_substitutions(FormulaPtr f, std::vector<std::pair<FormulaPtr, std::string>> subs) {
    std::stable_sort(subs.begin(), subs.end(), [](const auto& a, const auto& b) {
        return node_count(a.first) < node_count(b.first);
    });
    for (size_t i = 0; i < subs.size(); ++i) {
        f = replace_subformula(f, subs[i].first, subs[i].second);
        for (size_t j = i + 1; j < subs.size(); ++j)
            subs[j].first = replace_subformula(subs[j].first, subs[i].first, subs[i].second);
    }
    return f;
}

} // namespace

std::pair<FormulaPtr, FormulaPtr> build_variants(const FormulaPtr& f, const CheckResult& results) {
    std::vector<std::pair<FormulaPtr, std::string>> subs_n, subs_p;
    for (const auto& rec : results.checked) {
        if (rec.tag == 'n')
            subs_n.emplace_back(rec.sub, rec.atom);
        else
            subs_p.emplace_back(rec.sub, rec.atom);
    }
    return {apply_substitutions(f, std::move(subs_n)), apply_substitutions(f, std::move(subs_p))};
}

// ============================================================================
// Trace enrichment
// ============================================================================

namespace {

// Adds the checked-subformula atoms to the observed events.
//
// With the visited states known, n-atoms are copied from the updated
// labelling, and p-atoms as well while the history stays inside the
// candidate's core; outside the core the p-truth is unknown, so every p-atom
// is added. The asymmetry keeps the n-labelling an under-approximation and
// the p-labelling an over-approximation of the checked subformulas' truth
// along the run, which is what the top/bot conclusions rely on.
//
// Without the states, an event is matched against states by its labelling:
// an n-atom is added when every matching state carries it, a p-atom unless
// every matching state is a core state that lacks it.
Trace enrich_trace(const Icgs& original, const Icgs& updated, const Trace& trace,
                   const std::optional<History>& history, const CheckResult& results) {
    std::set<std::string> natoms, patoms;
    for (const auto& rec : results.checked)
        (rec.tag == 'n' ? natoms : patoms).insert(rec.atom);
    if (natoms.empty() && patoms.empty()) return trace;

    std::vector<char> in_core(updated.states.size(), 0);
    for (int s : results.core) in_core[s] = 1;

    auto updated_has = [&](int s, const std::string& atom) {
        int idx = updated.atom_index(atom);
        return idx >= 0 && updated.has_atom(s, idx);
    };

    Trace out = trace;
    for (size_t j = 0; j < out.events.size(); ++j) {
        std::set<std::string> ev(out.events[j].begin(), out.events[j].end());

        std::vector<int> candidates_for_event;
        if (history) {
            candidates_for_event.push_back(history->states[j]);
        } else {
            // match states whose original labelling equals the event without
            // any checked atoms
            std::set<std::string> base;
            for (const auto& a : ev)
                if (!natoms.count(a) && !patoms.count(a)) base.insert(a);
            for (size_t s = 0; s < original.states.size(); ++s) {
                std::set<std::string> lab;
                for (int a : original.labels[s]) lab.insert(original.atoms[a]);
                if (lab == base) candidates_for_event.push_back(static_cast<int>(s));
            }
        }

        for (const auto& atom : natoms) {
            bool add = !candidates_for_event.empty();
            for (int s : candidates_for_event)
                if (!updated_has(s, atom)) add = false;
            if (add) ev.insert(atom);
        }
        for (const auto& atom : patoms) {
            bool add;
            if (candidates_for_event.empty()) {
                add = true; // event does not match the model; stay generous
            } else {
                add = false;
                for (int s : candidates_for_event)
                    if (!in_core[s] || updated_has(s, atom)) add = true;
            }
            if (add) ev.insert(atom);
        }
        out.events[j].assign(ev.begin(), ev.end());
    }
    return out;
}

std::vector<FormulaPtr> sorted_formulas(const std::set<std::string>& keys,
                                        const std::map<std::string, FormulaPtr>& by_key) {
    std::vector<FormulaPtr> out;
    for (const auto& k : keys) out.push_back(by_key.at(k));
    return out;
}

} // namespace

// ============================================================================
// Algorithm 2
// ============================================================================

Outcome runtime_verification(const Icgs& m, const FormulaPtr& f, const RvInput& input,
                             const CheckResult& results) {
    if (input.history) {
        if (input.history->states.size() != input.trace.events.size())
            throw InputError("history and trace lengths differ");
        if (!history_valid(m, *input.history))
            throw InputError("history is not a run of the model");
    }

    Outcome out;
    Icgs updated = update_model(m, results);

    // phi_mc / initial phi_rv split over the subformula list
    std::map<std::string, FormulaPtr> by_key;
    std::set<std::string> all_keys, mc_keys;
    for (const auto& sub : subformulas(f)) {
        std::string k = print_formula(sub);
        by_key.emplace(k, sub);
        all_keys.insert(std::move(k));
    }
    for (const auto& e : results.entries) mc_keys.insert(print_formula(e.sub));
    std::set<std::string> rv_keys;
    for (const auto& k : all_keys)
        if (!mc_keys.count(k)) rv_keys.insert(k);

    auto [psi_n, psi_p] = build_variants(f, results);
    out.psi_n = psi_n;
    out.psi_p = psi_p;
    out.phi_n = strip_strategic(psi_n);
    out.phi_p = strip_strategic(psi_p);

    Trace enriched = enrich_trace(m, updated, input.trace, input.history, results);
    for (const auto& ev : enriched.events)
        for (const auto& atom : ev)
            if (updated.atom_index(atom) < 0)
                throw InputError("trace event mentions atom \"" + atom +
                                 "\" outside the model alphabet");

    std::vector<std::string> basis = updated.atoms;

    Monitor mon_n = build_monitor(out.phi_n, basis);
    Monitor mon_p = build_monitor(out.phi_p, basis);
    out.n_verdict = monitor_run(mon_n, enriched).verdict;
    out.p_verdict = monitor_run(mon_p, enriched).verdict;

    if (out.n_verdict == B3::Top && out.p_verdict == B3::Bot) {
        out.conflict = true;
        if (input.from_model)
            throw InternalSoundnessError(
                "negative monitor concluded top and positive monitor concluded bot on a model "
                "trace for " + print_formula(f));
        out.k = B3::Unknown;
        out.warning =
            "monitors concluded both top and bot; the trace cannot stem from the model, verdict "
            "withheld";
    } else if (out.n_verdict == B3::Top) {
        out.k = B3::Top;
    } else if (out.p_verdict == B3::Bot) {
        out.k = B3::Bot;
    }

    // per-subformula monitoring on the raw trace; inconclusive ones move to
    // phi_unchk
    std::set<std::string> unchk_keys;
    for (const auto& k : rv_keys) {
        FormulaPtr proj = strip_strategic(by_key.at(k));
        Monitor mon = build_monitor(proj, basis);
        if (monitor_run(mon, input.trace).verdict == B3::Unknown) unchk_keys.insert(k);
    }
    for (const auto& k : unchk_keys) rv_keys.erase(k);

    out.phi_mc = sorted_formulas(mc_keys, by_key);
    out.phi_rv = sorted_formulas(rv_keys, by_key);
    out.phi_unchk = sorted_formulas(unchk_keys, by_key);
    return out;
}

// ============================================================================
// Algorithm 1
// ============================================================================

MergedOutcome model_checking_procedure(const Icgs& m, const FormulaPtr& f, const RvInput& input,
                                       const PipelineOptions& opts) {
    ValidationReport rep = validate_model(m);
    if (!rep.ok()) {
        std::string msg = "invalid model:";
        for (const auto& v : rep.violations) msg += "\n  " + v;
        throw InputError(msg);
    }

    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    MergedOutcome merged;

    auto [m1, f1] = eliminate_negated_atoms(m, to_nnf(f));
    merged.preprocessed = f1;

    auto t0 = clock::now();
    std::vector<SubmodelPair> candidates = find_submodels(m1, f1, opts.max_candidates);
    merged.static_ms += ms_since(t0);

    bool any_top = false, any_bot = false;
    for (size_t i = 0; i < candidates.size(); ++i) {
        CandidateOutcome co;
        co.index = i;
        for (int s : candidates[i].core) co.core.push_back(m1.states[s]);

        t0 = clock::now();
        CheckResult result = check_subformulas(candidates[i], f1);
        co.static_ms = ms_since(t0);

        t0 = clock::now();
        co.outcome = runtime_verification(m1, f1, input, result);
        co.rv_ms = ms_since(t0);

        merged.static_ms += co.static_ms;
        merged.rv_ms += co.rv_ms;
        any_top |= co.outcome.k == B3::Top;
        any_bot |= co.outcome.k == B3::Bot;
        if (!co.outcome.warning.empty()) merged.warning = co.outcome.warning;
        merged.candidates.push_back(std::move(co));
    }

    if (any_top && any_bot) {
        if (input.from_model)
            throw InternalSoundnessError(
                "candidates concluded both top and bot on a model trace for " + print_formula(f));
        merged.conflict = true;
        merged.k = B3::Unknown;
        merged.warning =
            "candidates concluded both top and bot; the trace cannot stem from the model, "
            "verdict withheld";
    } else if (any_top) {
        merged.k = B3::Top;
    } else if (any_bot) {
        merged.k = B3::Bot;
    }
    return merged;
}

// ============================================================================
// Simulation
// ============================================================================

SimulationResult simulate(const Icgs& m, size_t steps, uint64_t seed) {
    // splitmix64; stable across platforms
    auto next_rand = [state = seed ^ 0x9e3779b97f4a7c15ull]() mutable {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };

    SimulationResult out;
    int s = m.initial;
    for (size_t i = 0; i < steps; ++i) {
        out.history.states.push_back(s);
        std::vector<std::string> ev;
        for (int a : m.labels[s]) ev.push_back(m.atoms[a]);
        out.trace.events.push_back(std::move(ev));
        if (i + 1 == steps) break;
        auto enabled = enabled_joint_actions(m, s);
        const JointAction& a = enabled[next_rand() % enabled.size()];
        s = step(m, s, a);
    }
    return out;
}

} // namespace stratmon
