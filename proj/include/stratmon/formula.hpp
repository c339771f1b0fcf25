// ATL*/ATL/LTL abstract syntax, parser, printer, and the formula
// transformations used by the verification pipeline.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace stratmon {

class Icgs;

enum class FOp {
    Atom,     // atomic proposition; "true"/"false" are reserved constants
    Not,
    And,
    Or,
    Next,     // X
    Until,    // U
    Release,  // R
    Exists,   // <<G>>
    ForAll,   // [[G]]
};

enum class FragmentClass { ATL, ATL_STAR, LTL };

// Immutable formula node. Shared subtrees are permitted but never required;
// equality is structural.
class Formula {
public:
    using Ptr = std::shared_ptr<const Formula>;

    FOp op;
    std::string atom;                    // FOp::Atom only
    std::vector<std::string> coalition;  // Exists/ForAll only, sorted, no duplicates
    Ptr lhs, rhs;                        // unary ops use lhs

    static Ptr make_atom(std::string name);
    static Ptr make_true();
    static Ptr make_false();
    static Ptr make_not(Ptr f);
    static Ptr make_and(Ptr a, Ptr b);
    static Ptr make_or(Ptr a, Ptr b);
    static Ptr make_next(Ptr f);
    static Ptr make_until(Ptr a, Ptr b);
    static Ptr make_release(Ptr a, Ptr b);
    static Ptr make_exists(std::vector<std::string> coalition, Ptr f);
    static Ptr make_forall(std::vector<std::string> coalition, Ptr f);

    bool is_true() const { return op == FOp::Atom && atom == "true"; }
    bool is_false() const { return op == FOp::Atom && atom == "false"; }
    bool is_strategic() const { return op == FOp::Exists || op == FOp::ForAll; }

private:
    Formula() = default;
    static Ptr node(FOp op);
    friend Ptr make_node(FOp, std::string, std::vector<std::string>, Ptr, Ptr);
};

using FormulaPtr = Formula::Ptr;

// ---- text syntax -----------------------------------------------------------
//
// Precedence, low to high: `|`, `&`, `U`/`R` (right associative), then the
// unary operators `X F G !` and the quantifiers `<<a,b>>` / `[[a,b]]`.
// `F p` expands to `(true U p)` and `G p` to `(false R p)` at parse time.
// The printer emits a fully parenthesised canonical form that re-parses to
// the identical tree.

FormulaPtr parse_formula(const std::string& text);
std::string print_formula(const FormulaPtr& f);

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);
uint64_t formula_hash(const FormulaPtr& f); // stable across runs and platforms
size_t node_count(const FormulaPtr& f);
std::vector<std::string> formula_atoms(const FormulaPtr& f);    // sorted, no constants
std::vector<std::string> formula_agents(const FormulaPtr& f);   // sorted union of coalitions

// ---- fragment classification ----------------------------------------------

FragmentClass fragment_of(const FormulaPtr& f);
bool is_ltl(const FormulaPtr& f);
// ATL restricted grammar: every quantifier dominates exactly one temporal
// operator whose operands are state formulas.
bool is_atl(const FormulaPtr& f);
bool is_nnf(const FormulaPtr& f);
bool is_negation_free(const FormulaPtr& f);

// ---- transformations -------------------------------------------------------

// Negation normal form: Not pushed down to atoms through De Morgan, the
// X self-duality, the U/R duality and the <<G>>/[[G]] duality.
FormulaPtr to_nnf(const FormulaPtr& f);

// Replaces every negated atom !q in an NNF formula by a fresh positive atom
// (named not_q, with a numeric suffix on collision) and returns a model whose
// labelling makes the fresh atom hold exactly where q does not.
std::pair<Icgs, FormulaPtr> eliminate_negated_atoms(const Icgs& m, const FormulaPtr& f);

// All distinct subtrees, leaves first, f itself last. Ordered by node count,
// ties broken by the canonical printed form.
std::vector<FormulaPtr> subformulas(const FormulaPtr& f);

// Erases every strategic quantifier, keeping its body. Result is LTL.
FormulaPtr strip_strategic(const FormulaPtr& f);

// Rewrites every strategic quantifier (Exists and ForAll alike) into
// Exists(target, body). Used to build the phi_Ag / phi_empty variants.
FormulaPtr rewrite_coalitions(const FormulaPtr& f, const std::vector<std::string>& target);

// Replaces every occurrence of `target` as a subtree of f by Atom(atom).
FormulaPtr replace_subformula(const FormulaPtr& f, const FormulaPtr& target,
                              const std::string& atom);

// ---- JSON AST interchange ---------------------------------------------------

nlohmann::ordered_json formula_to_json(const FormulaPtr& f);
FormulaPtr formula_from_json(const nlohmann::json& j);

} // namespace stratmon
