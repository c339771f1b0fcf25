#include "stratmon/buchi.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "stratmon/errors.hpp"

namespace stratmon {

// ============================================================================
// Tableau (expand) construction to a generalized Büchi automaton
// ============================================================================

namespace {

// Formulas are keyed by canonical print for set membership.
struct FormulaSet {
    std::map<std::string, FormulaPtr> items;

    bool insert(const FormulaPtr& f) { return items.emplace(print_formula(f), f).second; }
    bool contains(const FormulaPtr& f) const { return items.count(print_formula(f)) > 0; }
    bool contains(const std::string& key) const { return items.count(key) > 0; }
    bool empty() const { return items.empty(); }
    FormulaPtr pop() {
        auto it = items.begin();
        FormulaPtr f = it->second;
        items.erase(it);
        return f;
    }
    std::string key() const {
        std::string k;
        for (const auto& [s, f] : items) {
            (void)f;
            k += s;
            k += ';';
        }
        return k;
    }
};

struct TableauNode {
    std::set<int> incoming; // -1 denotes the virtual initial node
    FormulaSet new_set, old_set, next_set;
};

struct TableauBuilder {
    std::vector<TableauNode> nodes; // registered states
    std::map<std::string, int> registry; // (old,next) key -> node index

    void expand(TableauNode node) {
        if (node.new_set.empty()) {
            std::string key = node.old_set.key() + "|" + node.next_set.key();
            auto it = registry.find(key);
            if (it != registry.end()) {
                for (int in : node.incoming) nodes[it->second].incoming.insert(in);
                return;
            }
            int id = static_cast<int>(nodes.size());
            registry.emplace(key, id);
            nodes.push_back(node);
            TableauNode succ;
            succ.incoming.insert(id);
            succ.new_set = nodes[id].next_set;
            expand(std::move(succ));
            return;
        }
        FormulaPtr eta = node.new_set.pop();
        std::string eta_key = print_formula(eta);
        if (node.old_set.contains(eta_key)) {
            expand(std::move(node));
            return;
        }
        switch (eta->op) {
            case FOp::Atom:
            case FOp::Not: {
                if (eta->is_false()) return; // contradiction
                if (eta->op == FOp::Not && eta->lhs->op != FOp::Atom)
                    throw FragmentError("tableau input must be in NNF");
                if (eta->op == FOp::Not && eta->lhs->is_true()) return;
                bool tautology = eta->is_true() || (eta->op == FOp::Not && eta->lhs->is_false());
                // clash with the complementary literal closes the branch
                FormulaPtr negated = eta->op == FOp::Not ? eta->lhs : Formula::make_not(eta);
                if (!tautology && node.old_set.contains(negated)) return;
                if (!tautology) node.old_set.insert(eta);
                expand(std::move(node));
                return;
            }
            case FOp::And: {
                node.old_set.insert(eta);
                node.new_set.insert(eta->lhs);
                node.new_set.insert(eta->rhs);
                expand(std::move(node));
                return;
            }
            case FOp::Or: {
                TableauNode right = node;
                node.old_set.insert(eta);
                node.new_set.insert(eta->lhs);
                right.old_set.insert(eta);
                right.new_set.insert(eta->rhs);
                expand(std::move(node));
                expand(std::move(right));
                return;
            }
            case FOp::Next: {
                node.old_set.insert(eta);
                node.next_set.insert(eta->lhs);
                expand(std::move(node));
                return;
            }
            case FOp::Until: {
                // a U b  =  b | (a & X(a U b))
                TableauNode right = node;
                node.old_set.insert(eta);
                node.new_set.insert(eta->lhs);
                node.next_set.insert(eta);
                right.old_set.insert(eta);
                right.new_set.insert(eta->rhs);
                expand(std::move(node));
                expand(std::move(right));
                return;
            }
            case FOp::Release: {
                // a R b  =  (b & a) | (b & X(a R b))
                TableauNode right = node;
                node.old_set.insert(eta);
                node.new_set.insert(eta->lhs);
                node.new_set.insert(eta->rhs);
                right.old_set.insert(eta);
                right.new_set.insert(eta->rhs);
                right.next_set.insert(eta);
                expand(std::move(node));
                expand(std::move(right));
                return;
            }
            default:
                throw FragmentError("strategic operator in LTL tableau input");
        }
    }
};

bool letter_satisfies(const FormulaSet& old_set, const std::vector<std::string>& atoms,
                      unsigned letter) {
    for (const auto& [key, f] : old_set.items) {
        (void)key;
        bool neg = f->op == FOp::Not;
        const FormulaPtr& lit = neg ? f->lhs : f;
        if (lit->op != FOp::Atom) continue;
        if (lit->is_true() || lit->is_false()) continue; // true kept, false never registered
        auto pos = std::lower_bound(atoms.begin(), atoms.end(), lit->atom);
        bool holds = false;
        if (pos != atoms.end() && *pos == lit->atom)
            holds = (letter >> (pos - atoms.begin())) & 1u;
        if (holds == neg) return false;
    }
    return true;
}

void collect_untils(const FormulaPtr& f, std::vector<FormulaPtr>& out,
                    std::set<std::string>& seen) {
    if (!f) return;
    if (f->op == FOp::Until && seen.insert(print_formula(f)).second) out.push_back(f);
    collect_untils(f->lhs, out, seen);
    collect_untils(f->rhs, out, seen);
}

// Quotient by forward bisimulation (acceptance-aware); shrinks the automaton
// and gives canonical shapes for the trivial cases.
BuchiAutomaton bisim_quotient(const BuchiAutomaton& a) {
    size_t n = a.state_count();
    size_t letters = a.letter_count();
    std::vector<int> block(n);
    for (size_t q = 0; q < n; ++q) block[q] = a.accepting[q] ? 1 : 0;
    for (;;) {
        std::map<std::vector<int>, int> sig_to_block;
        std::vector<int> next_block(n);
        for (size_t q = 0; q < n; ++q) {
            std::vector<int> sig{block[q]};
            for (size_t l = 0; l < letters; ++l) {
                std::set<int> succ_blocks;
                for (int t : a.next[q][l]) succ_blocks.insert(block[t]);
                sig.push_back(-1);
                for (int b : succ_blocks) sig.push_back(b);
            }
            auto [it, fresh] = sig_to_block.emplace(sig, static_cast<int>(sig_to_block.size()));
            (void)fresh;
            next_block[q] = it->second;
        }
        if (next_block == block) break;
        block = std::move(next_block);
    }
    int blocks = *std::max_element(block.begin(), block.end()) + 1;

    BuchiAutomaton out;
    out.atoms = a.atoms;
    out.next.assign(blocks, std::vector<std::vector<int>>(letters));
    out.accepting.assign(blocks, 0);
    std::vector<char> done(blocks, 0);
    for (size_t q = 0; q < n; ++q) {
        int b = block[q];
        out.accepting[b] = a.accepting[q];
        if (done[b]) continue;
        done[b] = 1;
        for (size_t l = 0; l < letters; ++l) {
            std::set<int> succ;
            for (int t : a.next[q][l]) succ.insert(block[t]);
            out.next[b][l].assign(succ.begin(), succ.end());
        }
    }
    std::set<int> inits;
    for (int q : a.initial) inits.insert(block[q]);
    out.initial.assign(inits.begin(), inits.end());
    return out;
}

BuchiAutomaton drop_unreachable(const BuchiAutomaton& a) {
    size_t n = a.state_count();
    std::vector<char> reach(n, 0);
    std::vector<int> work = a.initial;
    for (int q : work) reach[q] = 1;
    while (!work.empty()) {
        int q = work.back();
        work.pop_back();
        for (const auto& succs : a.next[q])
            for (int t : succs)
                if (!reach[t]) {
                    reach[t] = 1;
                    work.push_back(t);
                }
    }
    std::vector<int> remap(n, -1);
    int count = 0;
    for (size_t q = 0; q < n; ++q)
        if (reach[q]) remap[q] = count++;
    BuchiAutomaton out;
    out.atoms = a.atoms;
    out.next.assign(count, std::vector<std::vector<int>>(a.letter_count()));
    out.accepting.assign(count, 0);
    for (size_t q = 0; q < n; ++q) {
        if (!reach[q]) continue;
        out.accepting[remap[q]] = a.accepting[q];
        for (size_t l = 0; l < a.letter_count(); ++l)
            for (int t : a.next[q][l])
                if (remap[t] >= 0) out.next[remap[q]][l].push_back(remap[t]);
    }
    for (int q : a.initial)
        if (remap[q] >= 0) out.initial.push_back(remap[q]);
    return out;
}

} // namespace

BuchiAutomaton ltl_to_buchi(const FormulaPtr& f, std::vector<std::string> atom_basis) {
    if (!is_ltl(f)) throw FragmentError("ltl_to_buchi requires an LTL formula");
    if (!is_nnf(f)) throw FragmentError("ltl_to_buchi requires NNF input");
    std::sort(atom_basis.begin(), atom_basis.end());
    atom_basis.erase(std::unique(atom_basis.begin(), atom_basis.end()), atom_basis.end());
    for (const auto& a : formula_atoms(f))
        if (!std::binary_search(atom_basis.begin(), atom_basis.end(), a))
            throw InputError("atom basis does not cover formula atom \"" + a + "\"");
    if (atom_basis.size() > 16) throw InputError("atom basis too large for explicit letters");

    TableauBuilder builder;
    TableauNode root;
    root.incoming.insert(-1);
    root.new_set.insert(f);
    builder.expand(std::move(root));

    // acceptance: one set per Until subformula; degeneralize with a counter
    std::vector<FormulaPtr> untils;
    std::set<std::string> seen;
    collect_untils(f, untils, seen);
    size_t k = untils.size();

    size_t n = builder.nodes.size();
    size_t letters = size_t{1} << atom_basis.size();

    // gba_ok[u][q] = node q is in acceptance set u
    std::vector<std::vector<char>> gba_ok(k, std::vector<char>(n, 1));
    for (size_t u = 0; u < k; ++u) {
        std::string ukey = print_formula(untils[u]);
        std::string rkey = print_formula(untils[u]->rhs);
        for (size_t q = 0; q < n; ++q) {
            const auto& old_set = builder.nodes[q].old_set;
            gba_ok[u][q] = !old_set.contains(ukey) || old_set.contains(rkey);
        }
    }

    // raw edges: q -> q' iff q in incoming(q'); labels read from old(q')
    std::vector<std::vector<int>> raw_succ(n);
    std::vector<int> raw_init;
    for (size_t q = 0; q < n; ++q) {
        for (int in : builder.nodes[q].incoming) {
            if (in < 0)
                raw_init.push_back(static_cast<int>(q));
            else
                raw_succ[in].push_back(static_cast<int>(q));
        }
    }

    // Degeneralization with k+1 copies. The counter advances past every
    // acceptance set the entered node satisfies; reaching k marks a completed
    // sweep (the accepting copy) and the next step restarts from 0.
    size_t copies = (k == 0) ? 1 : k + 1;
    auto advance = [&](size_t c_start, int q2) {
        size_t c = c_start;
        while (c < k && gba_ok[c][q2]) ++c;
        return c;
    };
    auto next_copy = [&](size_t c, int q2) -> size_t {
        if (k == 0) return 0;
        return advance(c == k ? 0 : c, q2);
    };

    BuchiAutomaton a;
    a.atoms = atom_basis;
    a.next.assign(n * copies, std::vector<std::vector<int>>(letters));
    a.accepting.assign(n * copies, 0);
    auto id = [&](int q, size_t c) { return static_cast<int>(c * n + q); };

    // a transition consumes the letter at the source node's position, so it
    // must satisfy the source node's literal constraints
    std::vector<std::vector<char>> node_letter(n, std::vector<char>(letters, 0));
    for (size_t q = 0; q < n; ++q)
        for (size_t l = 0; l < letters; ++l)
            node_letter[q][l] =
                letter_satisfies(builder.nodes[q].old_set, atom_basis, static_cast<unsigned>(l));

    for (size_t q = 0; q < n; ++q) {
        for (size_t c = 0; c < copies; ++c) {
            for (int q2 : raw_succ[q]) {
                size_t c2 = next_copy(c, q2);
                for (size_t l = 0; l < letters; ++l)
                    if (node_letter[q][l])
                        a.next[id(static_cast<int>(q), c)][l].push_back(id(q2, c2));
            }
        }
    }
    for (size_t c = 0; c < copies; ++c)
        for (size_t qn = 0; qn < n; ++qn)
            a.accepting[id(static_cast<int>(qn), c)] = (k == 0) || c == k;

    std::set<int> inits;
    for (int q0 : raw_init) inits.insert(id(q0, k == 0 ? 0 : advance(0, q0)));
    a.initial.assign(inits.begin(), inits.end());

    for (auto& per_state : a.next)
        for (auto& succ : per_state) {
            std::sort(succ.begin(), succ.end());
            succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        }

    return bisim_quotient(drop_unreachable(a));
}

BuchiAutomaton ltl_to_buchi(const FormulaPtr& f) { return ltl_to_buchi(f, formula_atoms(f)); }

// ============================================================================
// Emptiness per state
// ============================================================================

std::vector<char> live_states(const BuchiAutomaton& a) {
    size_t n = a.state_count();
    // Tarjan SCC over the union graph (any letter)
    std::vector<std::vector<int>> succ(n);
    for (size_t q = 0; q < n; ++q) {
        std::set<int> s;
        for (const auto& per_letter : a.next[q]) s.insert(per_letter.begin(), per_letter.end());
        succ[q].assign(s.begin(), s.end());
    }

    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0, comp_count = 0;

    // iterative Tarjan
    struct Frame { int v; size_t child; };
    for (size_t root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call{{static_cast<int>(root), 0}};
        while (!call.empty()) {
            auto& fr = call.back();
            int v = fr.v;
            if (fr.child == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            if (fr.child < succ[v].size()) {
                int w = succ[v][fr.child++];
                if (index[w] == -1) {
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            } else {
                if (low[v] == index[v]) {
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = comp_count;
                        if (w == v) break;
                    }
                    ++comp_count;
                }
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }

    // an SCC is viable when it contains an accepting state on a cycle
    std::vector<int> comp_size(comp_count, 0);
    for (size_t q = 0; q < n; ++q) ++comp_size[comp[q]];
    std::vector<char> comp_viable(comp_count, 0);
    for (size_t q = 0; q < n; ++q) {
        if (!a.accepting[q]) continue;
        if (comp_size[comp[q]] > 1) {
            comp_viable[comp[q]] = 1;
        } else {
            for (int t : succ[q])
                if (t == static_cast<int>(q)) comp_viable[comp[q]] = 1;
        }
    }

    // live = reaches a viable SCC; propagate backwards via fixpoint
    std::vector<char> live(n, 0);
    for (size_t q = 0; q < n; ++q) live[q] = comp_viable[comp[q]];
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t q = 0; q < n; ++q) {
            if (live[q]) continue;
            for (int t : succ[q]) {
                if (live[t]) {
                    live[q] = 1;
                    changed = true;
                    break;
                }
            }
        }
    }
    return live;
}

// ============================================================================
// Lasso acceptance
// ============================================================================

bool accepts_lasso(const BuchiAutomaton& a, const std::vector<int>& stem,
                   const std::vector<int>& loop) {
    if (loop.empty()) throw InputError("lasso loop must be nonempty");
    size_t n = a.state_count();

    // subsets after the stem
    std::vector<char> cur(n, 0);
    for (int q : a.initial) cur[q] = 1;
    for (int letter : stem) {
        std::vector<char> next(n, 0);
        for (size_t q = 0; q < n; ++q)
            if (cur[q])
                for (int t : a.next[q][letter]) next[t] = 1;
        cur = std::move(next);
    }

    // one-loop-iteration reachability with an accepting-visit flag:
    // reach[q][t] in {none=0, plain=1, through-accepting=2}
    auto one_loop = [&]() {
        std::vector<std::vector<unsigned char>> r(n, std::vector<unsigned char>(n, 0));
        for (size_t q = 0; q < n; ++q) {
            // BFS over loop letters tracking the accepting flag
            std::vector<std::vector<char>> seen(loop.size() + 1, std::vector<char>(2 * n, 0));
            std::vector<std::pair<int, int>> layer{{static_cast<int>(q), a.accepting[q] ? 1 : 0}};
            seen[0][(a.accepting[q] ? n : 0) + q] = 1;
            for (size_t i = 0; i < loop.size(); ++i) {
                std::vector<std::pair<int, int>> next_layer;
                for (auto [state, flag] : layer) {
                    for (int t : a.next[state][loop[i]]) {
                        int nf = flag || a.accepting[t];
                        if (!seen[i + 1][(nf ? n : 0) + t]) {
                            seen[i + 1][(nf ? n : 0) + t] = 1;
                            next_layer.emplace_back(t, nf);
                        }
                    }
                }
                layer = std::move(next_layer);
            }
            for (auto [state, flag] : layer)
                r[q][state] = std::max<unsigned char>(r[q][state], flag ? 2 : 1);
        }
        return r;
    };
    auto step_mat = one_loop();

    // closure over repeated loop iterations
    std::vector<std::vector<unsigned char>> closure = step_mat;
    for (;;) {
        bool changed = false;
        for (size_t x = 0; x < n; ++x)
            for (size_t y = 0; y < n; ++y) {
                if (!closure[x][y]) continue;
                for (size_t z = 0; z < n; ++z) {
                    if (!step_mat[y][z]) continue;
                    unsigned char v = std::max(
                        closure[x][z],
                        static_cast<unsigned char>(
                            std::max(closure[x][y], step_mat[y][z]) == 2 ? 2 : 1));
                    if (v > closure[x][z]) {
                        closure[x][z] = v;
                        changed = true;
                    }
                }
            }
        if (!changed) break;
    }

    // accepted iff some reached state q has a flag-2 cycle q ->* q
    for (size_t q = 0; q < n; ++q)
        if (cur[q] && closure[q][q] == 2) return true;
    return false;
}

int letter_of_event(const std::vector<std::string>& basis_atoms,
                    const std::vector<std::string>& event) {
    int letter = 0;
    for (const auto& atom : event) {
        auto pos = std::lower_bound(basis_atoms.begin(), basis_atoms.end(), atom);
        if (pos != basis_atoms.end() && *pos == atom)
            letter |= 1 << (pos - basis_atoms.begin());
    }
    return letter;
}

} // namespace stratmon
