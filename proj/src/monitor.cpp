#include "stratmon/monitor.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>

#include "stratmon/buchi.hpp"
#include "stratmon/errors.hpp"

namespace stratmon {

namespace {

// NFA restricted to live states: a nonempty current subset means some
// accepting continuation exists.
struct PrefixNfa {
    std::vector<std::vector<std::vector<int>>> next;
    std::vector<int> initial;
    size_t letters;
};

PrefixNfa live_prefix_nfa(const BuchiAutomaton& a) {
    std::vector<char> live = live_states(a);
    PrefixNfa nfa;
    nfa.letters = a.letter_count();
    nfa.next.assign(a.state_count(), std::vector<std::vector<int>>(nfa.letters));
    for (size_t q = 0; q < a.state_count(); ++q) {
        if (!live[q]) continue;
        for (size_t l = 0; l < nfa.letters; ++l)
            for (int t : a.next[q][l])
                if (live[t]) nfa.next[q][l].push_back(t);
    }
    for (int q : a.initial)
        if (live[q]) nfa.initial.push_back(q);
    return nfa;
}

std::vector<int> subset_step(const PrefixNfa& nfa, const std::vector<int>& subset, size_t letter) {
    std::set<int> out;
    for (int q : subset) out.insert(nfa.next[q][letter].begin(), nfa.next[q][letter].end());
    return {out.begin(), out.end()};
}

Monitor minimize_moore(const Monitor& in) {
    size_t n = in.state_count();
    size_t letters = in.letter_count();

    std::vector<int> block(n);
    for (size_t q = 0; q < n; ++q) block[q] = static_cast<int>(in.output[q]);
    for (;;) {
        std::map<std::vector<int>, int> sig_to_block;
        std::vector<int> next_block(n);
        for (size_t q = 0; q < n; ++q) {
            std::vector<int> sig{block[q]};
            for (size_t l = 0; l < letters; ++l) sig.push_back(block[in.next[q][l]]);
            auto [it, fresh] = sig_to_block.emplace(sig, static_cast<int>(sig_to_block.size()));
            (void)fresh;
            next_block[q] = it->second;
        }
        if (next_block == block) break;
        block = std::move(next_block);
    }

    // canonical numbering: BFS from the initial block in letter order
    int blocks = *std::max_element(block.begin(), block.end()) + 1;
    std::vector<int> representative(blocks, -1);
    for (size_t q = 0; q < n; ++q)
        if (representative[block[q]] < 0) representative[block[q]] = static_cast<int>(q);

    std::vector<int> order(blocks, -1);
    int count = 0;
    std::vector<int> queue{block[in.initial]};
    order[block[in.initial]] = count++;
    for (size_t head = 0; head < queue.size(); ++head) {
        int b = queue[head];
        int rep = representative[b];
        for (size_t l = 0; l < letters; ++l) {
            int nb = block[in.next[rep][l]];
            if (order[nb] < 0) {
                order[nb] = count++;
                queue.push_back(nb);
            }
        }
    }

    Monitor out;
    out.atoms = in.atoms;
    out.basis = in.basis;
    out.initial = order[block[in.initial]];
    out.next.assign(count, std::vector<int>(letters));
    out.output.assign(count, B3::Unknown);
    for (int b = 0; b < blocks; ++b) {
        if (order[b] < 0) continue; // unreachable block
        int rep = representative[b];
        out.output[order[b]] = in.output[rep];
        for (size_t l = 0; l < letters; ++l) out.next[order[b]][l] = order[block[in.next[rep][l]]];
    }
    return out;
}

} // namespace

Monitor build_monitor(const FormulaPtr& ltl, std::vector<std::string> event_basis) {
    if (!is_ltl(ltl)) throw FragmentError("monitors require an LTL formula");
    FormulaPtr pos = to_nnf(ltl);
    FormulaPtr neg = to_nnf(Formula::make_not(ltl));

    std::vector<std::string> tracked = formula_atoms(pos);
    {
        auto extra = formula_atoms(neg);
        tracked.insert(tracked.end(), extra.begin(), extra.end());
        std::sort(tracked.begin(), tracked.end());
        tracked.erase(std::unique(tracked.begin(), tracked.end()), tracked.end());
    }

    std::sort(event_basis.begin(), event_basis.end());
    event_basis.erase(std::unique(event_basis.begin(), event_basis.end()), event_basis.end());
    for (const auto& a : tracked)
        if (!std::binary_search(event_basis.begin(), event_basis.end(), a))
            event_basis.insert(std::lower_bound(event_basis.begin(), event_basis.end(), a), a);

    PrefixNfa nfa_pos = live_prefix_nfa(ltl_to_buchi(pos, tracked));
    PrefixNfa nfa_neg = live_prefix_nfa(ltl_to_buchi(neg, tracked));

    size_t letters = size_t{1} << tracked.size();

    // product subset construction
    using Key = std::pair<std::vector<int>, std::vector<int>>;
    std::map<Key, int> index;
    std::vector<Key> states;
    auto intern = [&](Key k) {
        auto [it, fresh] = index.emplace(std::move(k), static_cast<int>(states.size()));
        if (fresh) states.push_back(it->first);
        return it->second;
    };

    Monitor mon;
    mon.atoms = tracked;
    mon.basis = std::move(event_basis);
    mon.initial = intern({nfa_pos.initial, nfa_neg.initial});
    for (size_t q = 0; q < states.size(); ++q) {
        mon.next.emplace_back(letters);
        for (size_t l = 0; l < letters; ++l) {
            Key succ{subset_step(nfa_pos, states[q].first, l),
                     subset_step(nfa_neg, states[q].second, l)};
            mon.next[q][l] = intern(std::move(succ));
        }
    }
    mon.output.resize(states.size());
    for (size_t q = 0; q < states.size(); ++q) {
        bool pos_empty = states[q].first.empty();
        bool neg_empty = states[q].second.empty();
        assert(!(pos_empty && neg_empty));
        mon.output[q] = pos_empty ? B3::Bot : (neg_empty ? B3::Top : B3::Unknown);
    }

    return minimize_moore(mon);
}

Monitor build_monitor(const FormulaPtr& ltl) { return build_monitor(ltl, {}); }

MonitorRunResult monitor_run(const Monitor& mon, const Trace& trace) {
    MonitorRunResult r;
    MonitorCursor cur(mon);
    r.sequence.reserve(trace.events.size());
    for (const auto& ev : trace.events) {
        r.sequence.push_back(cur.step(ev));
        ++r.steps;
    }
    r.verdict = cur.output();
    return r;
}

B3 MonitorCursor::step(const std::vector<std::string>& event) {
    for (const auto& atom : event) {
        if (!std::binary_search(mon->basis.begin(), mon->basis.end(), atom))
            throw InputError("unknown atom \"" + atom + "\" in trace event");
    }
    int letter = letter_of_event(mon->atoms, event);
    state = mon->next[state][letter];
    return mon->output[state];
}

std::string monitor_to_dot(const Monitor& mon) {
    std::ostringstream os;
    os << "digraph monitor {\n  rankdir=LR;\n  node [shape=circle];\n";
    os << "  init [shape=point];\n  init -> q" << mon.initial << ";\n";
    for (size_t q = 0; q < mon.state_count(); ++q) {
        os << "  q" << q << " [label=\"q" << q << "\\n" << to_string(mon.output[q]) << "\"];\n";
    }
    for (size_t q = 0; q < mon.state_count(); ++q) {
        // group letters per target for readable edges
        std::map<int, std::vector<size_t>> per_target;
        for (size_t l = 0; l < mon.letter_count(); ++l) per_target[mon.next[q][l]].push_back(l);
        for (const auto& [target, ls] : per_target) {
            os << "  q" << q << " -> q" << target << " [label=\"";
            for (size_t i = 0; i < ls.size(); ++i) {
                if (i) os << " | ";
                if (mon.atoms.empty()) {
                    os << "{}";
                    continue;
                }
                os << "{";
                bool first = true;
                for (size_t b = 0; b < mon.atoms.size(); ++b) {
                    if ((ls[i] >> b) & 1) {
                        if (!first) os << ",";
                        os << mon.atoms[b];
                        first = false;
                    }
                }
                os << "}";
            }
            os << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

nlohmann::ordered_json monitor_to_json(const Monitor& mon) {
    nlohmann::ordered_json j;
    j["atoms"] = mon.atoms;
    j["initial"] = mon.initial;
    nlohmann::ordered_json states = nlohmann::ordered_json::array();
    for (size_t q = 0; q < mon.state_count(); ++q) {
        nlohmann::ordered_json s;
        s["id"] = q;
        s["output"] = to_string(mon.output[q]);
        nlohmann::ordered_json trans = nlohmann::ordered_json::array();
        for (size_t l = 0; l < mon.letter_count(); ++l) {
            nlohmann::ordered_json t;
            nlohmann::ordered_json letter = nlohmann::ordered_json::array();
            for (size_t b = 0; b < mon.atoms.size(); ++b)
                if ((l >> b) & 1) letter.push_back(mon.atoms[b]);
            t["event"] = letter;
            t["to"] = mon.next[q][l];
            trans.push_back(t);
        }
        s["transitions"] = trans;
        states.push_back(s);
    }
    j["states"] = states;
    return j;
}

} // namespace stratmon
