#include "stratmon/formula.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "stratmon/errors.hpp"
#include "stratmon/icgs.hpp"

namespace stratmon {

// ============================================================================
// Construction
// ============================================================================

FormulaPtr make_node(FOp op, std::string atom, std::vector<std::string> coalition,
                     FormulaPtr lhs, FormulaPtr rhs) {
    auto f = std::shared_ptr<Formula>(new Formula());
    f->op = op;
    f->atom = std::move(atom);
    f->coalition = std::move(coalition);
    f->lhs = std::move(lhs);
    f->rhs = std::move(rhs);
    return f;
}

static std::vector<std::string> canonical_coalition(std::vector<std::string> c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

FormulaPtr Formula::make_atom(std::string name) {
    return make_node(FOp::Atom, std::move(name), {}, nullptr, nullptr);
}
FormulaPtr Formula::make_true() { return make_atom("true"); }
FormulaPtr Formula::make_false() { return make_atom("false"); }
FormulaPtr Formula::make_not(Ptr f) { return make_node(FOp::Not, {}, {}, std::move(f), nullptr); }
FormulaPtr Formula::make_and(Ptr a, Ptr b) {
    return make_node(FOp::And, {}, {}, std::move(a), std::move(b));
}
FormulaPtr Formula::make_or(Ptr a, Ptr b) {
    return make_node(FOp::Or, {}, {}, std::move(a), std::move(b));
}
FormulaPtr Formula::make_next(Ptr f) { return make_node(FOp::Next, {}, {}, std::move(f), nullptr); }
FormulaPtr Formula::make_until(Ptr a, Ptr b) {
    return make_node(FOp::Until, {}, {}, std::move(a), std::move(b));
}
FormulaPtr Formula::make_release(Ptr a, Ptr b) {
    return make_node(FOp::Release, {}, {}, std::move(a), std::move(b));
}
FormulaPtr Formula::make_exists(std::vector<std::string> coalition, Ptr f) {
    return make_node(FOp::Exists, {}, canonical_coalition(std::move(coalition)), std::move(f),
                     nullptr);
}
FormulaPtr Formula::make_forall(std::vector<std::string> coalition, Ptr f) {
    return make_node(FOp::ForAll, {}, canonical_coalition(std::move(coalition)), std::move(f),
                     nullptr);
}

// ============================================================================
// Printing
// ============================================================================

static void print_rec(const FormulaPtr& f, std::string& out) {
    switch (f->op) {
        case FOp::Atom:
            out += f->atom;
            return;
        case FOp::Not:
            out += '!';
            print_rec(f->lhs, out);
            return;
        case FOp::Next:
            out += "X ";
            print_rec(f->lhs, out);
            return;
        case FOp::Exists:
        case FOp::ForAll: {
            out += (f->op == FOp::Exists) ? "<<" : "[[";
            for (size_t i = 0; i < f->coalition.size(); ++i) {
                if (i) out += ',';
                out += f->coalition[i];
            }
            out += (f->op == FOp::Exists) ? ">> " : "]] ";
            print_rec(f->lhs, out);
            return;
        }
        case FOp::And:
        case FOp::Or:
        case FOp::Until:
        case FOp::Release: {
            out += '(';
            print_rec(f->lhs, out);
            switch (f->op) {
                case FOp::And: out += " & "; break;
                case FOp::Or: out += " | "; break;
                case FOp::Until: out += " U "; break;
                default: out += " R "; break;
            }
            print_rec(f->rhs, out);
            out += ')';
            return;
        }
    }
}

std::string print_formula(const FormulaPtr& f) {
    std::string out;
    print_rec(f, out);
    return out;
}

// ============================================================================
// Parsing
// ============================================================================

namespace {

struct Token {
    enum Kind { Ident, Bar, Amp, Bang, LParen, RParen, ExistsOpen, ExistsClose,
                ForAllOpen, ForAllClose, Comma, End } kind;
    std::string text;
    size_t pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : src(s) { advance(); }

    const Token& peek() const { return tok; }

    Token next() {
        Token t = tok;
        advance();
        return t;
    }

private:
    void advance() {
        while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
        tok.pos = i;
        if (i >= src.size()) {
            tok.kind = Token::End;
            tok.text.clear();
            return;
        }
        char c = src[i];
        auto two = [&](char a, char b) {
            return c == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (two('<', '<')) { tok.kind = Token::ExistsOpen; i += 2; return; }
        if (two('>', '>')) { tok.kind = Token::ExistsClose; i += 2; return; }
        if (two('[', '[')) { tok.kind = Token::ForAllOpen; i += 2; return; }
        if (two(']', ']')) { tok.kind = Token::ForAllClose; i += 2; return; }
        switch (c) {
            case '|': tok.kind = Token::Bar; ++i; return;
            case '&': tok.kind = Token::Amp; ++i; return;
            case '!': tok.kind = Token::Bang; ++i; return;
            case '(': tok.kind = Token::LParen; ++i; return;
            case ')': tok.kind = Token::RParen; ++i; return;
            case ',': tok.kind = Token::Comma; ++i; return;
            default: break;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            tok.kind = Token::Ident;
            tok.text = src.substr(i, j - i);
            i = j;
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", i);
    }

    const std::string& src;
    size_t i = 0;
    Token tok{};
};

class Parser {
public:
    explicit Parser(const std::string& s) : lex(s) {}

    FormulaPtr run() {
        FormulaPtr f = parse_or();
        if (lex.peek().kind != Token::End)
            throw ParseError("trailing input after formula", lex.peek().pos);
        return f;
    }

private:
    FormulaPtr parse_or() {
        FormulaPtr f = parse_and();
        while (lex.peek().kind == Token::Bar) {
            lex.next();
            f = Formula::make_or(f, parse_and());
        }
        return f;
    }

    FormulaPtr parse_and() {
        FormulaPtr f = parse_ur();
        while (lex.peek().kind == Token::Amp) {
            lex.next();
            f = Formula::make_and(f, parse_ur());
        }
        return f;
    }

    FormulaPtr parse_ur() {
        FormulaPtr f = parse_unary();
        const Token& t = lex.peek();
        if (t.kind == Token::Ident && (t.text == "U" || t.text == "R")) {
            bool until = t.text == "U";
            lex.next();
            FormulaPtr rhs = parse_ur(); // right associative
            return until ? Formula::make_until(f, rhs) : Formula::make_release(f, rhs);
        }
        return f;
    }

    FormulaPtr parse_unary() {
        const Token& t = lex.peek();
        switch (t.kind) {
            case Token::Bang:
                lex.next();
                return Formula::make_not(parse_unary());
            case Token::ExistsOpen: {
                lex.next();
                auto coal = parse_coalition(Token::ExistsClose);
                return Formula::make_exists(std::move(coal), parse_unary());
            }
            case Token::ForAllOpen: {
                lex.next();
                auto coal = parse_coalition(Token::ForAllClose);
                return Formula::make_forall(std::move(coal), parse_unary());
            }
            case Token::Ident:
                if (t.text == "X") {
                    lex.next();
                    return Formula::make_next(parse_unary());
                }
                if (t.text == "F") {
                    lex.next();
                    return Formula::make_until(Formula::make_true(), parse_unary());
                }
                if (t.text == "G") {
                    lex.next();
                    return Formula::make_release(Formula::make_false(), parse_unary());
                }
                return parse_primary();
            default:
                return parse_primary();
        }
    }

    std::vector<std::string> parse_coalition(Token::Kind closer) {
        std::vector<std::string> agents;
        if (lex.peek().kind == closer) {
            lex.next();
            return agents;
        }
        for (;;) {
            Token t = lex.next();
            if (t.kind != Token::Ident)
                throw ParseError("expected agent name in coalition", t.pos);
            if (t.text == "U" || t.text == "R" || t.text == "X" || t.text == "F" || t.text == "G")
                throw ParseError("reserved word '" + t.text + "' used as agent name", t.pos);
            agents.push_back(t.text);
            Token sep = lex.next();
            if (sep.kind == closer) break;
            if (sep.kind != Token::Comma)
                throw ParseError("expected ',' or coalition close", sep.pos);
        }
        return agents;
    }

    FormulaPtr parse_primary() {
        Token t = lex.next();
        if (t.kind == Token::LParen) {
            FormulaPtr f = parse_or();
            Token close = lex.next();
            if (close.kind != Token::RParen)
                throw ParseError("expected ')'", close.pos);
            return f;
        }
        if (t.kind == Token::Ident) {
            if (t.text == "U" || t.text == "R" || t.text == "X" || t.text == "F" || t.text == "G")
                throw ParseError("reserved word '" + t.text + "' used as atom", t.pos);
            return Formula::make_atom(t.text);
        }
        throw ParseError("expected formula", t.pos);
    }

    Lexer lex;
};

} // namespace

FormulaPtr parse_formula(const std::string& text) { return Parser(text).run(); }

// ============================================================================
// Structural helpers
// ============================================================================

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->op != b->op || a->atom != b->atom || a->coalition != b->coalition) return false;
    return formula_equal(a->lhs, b->lhs) && formula_equal(a->rhs, b->rhs);
}

// FNV-1a over the canonical printed form; stable across platforms.
uint64_t formula_hash(const FormulaPtr& f) {
    std::string s = print_formula(f);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

size_t node_count(const FormulaPtr& f) {
    if (!f) return 0;
    return 1 + node_count(f->lhs) + node_count(f->rhs);
}

static void collect_atoms(const FormulaPtr& f, std::set<std::string>& out) {
    if (!f) return;
    if (f->op == FOp::Atom) {
        if (!f->is_true() && !f->is_false()) out.insert(f->atom);
        return;
    }
    collect_atoms(f->lhs, out);
    collect_atoms(f->rhs, out);
}

std::vector<std::string> formula_atoms(const FormulaPtr& f) {
    std::set<std::string> s;
    collect_atoms(f, s);
    return {s.begin(), s.end()};
}

static void collect_agents(const FormulaPtr& f, std::set<std::string>& out) {
    if (!f) return;
    if (f->is_strategic()) out.insert(f->coalition.begin(), f->coalition.end());
    collect_agents(f->lhs, out);
    collect_agents(f->rhs, out);
}

std::vector<std::string> formula_agents(const FormulaPtr& f) {
    std::set<std::string> s;
    collect_agents(f, s);
    return {s.begin(), s.end()};
}

// ============================================================================
// Fragment classification
// ============================================================================

bool is_ltl(const FormulaPtr& f) {
    if (!f) return true;
    if (f->is_strategic()) return false;
    return is_ltl(f->lhs) && is_ltl(f->rhs);
}

static bool atl_state(const FormulaPtr& f);

static bool atl_path(const FormulaPtr& f) {
    switch (f->op) {
        case FOp::Next: return atl_state(f->lhs);
        case FOp::Until:
        case FOp::Release: return atl_state(f->lhs) && atl_state(f->rhs);
        default: return false;
    }
}

static bool atl_state(const FormulaPtr& f) {
    switch (f->op) {
        case FOp::Atom: return true;
        case FOp::Not: return atl_state(f->lhs);
        case FOp::And:
        case FOp::Or: return atl_state(f->lhs) && atl_state(f->rhs);
        case FOp::Exists:
        case FOp::ForAll: return atl_path(f->lhs);
        default: return false;
    }
}

bool is_atl(const FormulaPtr& f) { return atl_state(f); }

FragmentClass fragment_of(const FormulaPtr& f) {
    if (is_ltl(f)) return FragmentClass::LTL;
    if (is_atl(f)) return FragmentClass::ATL;
    return FragmentClass::ATL_STAR;
}

bool is_nnf(const FormulaPtr& f) {
    if (!f) return true;
    if (f->op == FOp::Not) return f->lhs->op == FOp::Atom;
    return is_nnf(f->lhs) && is_nnf(f->rhs);
}

bool is_negation_free(const FormulaPtr& f) {
    if (!f) return true;
    if (f->op == FOp::Not) return false;
    return is_negation_free(f->lhs) && is_negation_free(f->rhs);
}

// ============================================================================
// NNF
// ============================================================================

static FormulaPtr nnf_pos(const FormulaPtr& f);
static FormulaPtr nnf_neg(const FormulaPtr& f);

static FormulaPtr nnf_pos(const FormulaPtr& f) {
    switch (f->op) {
        case FOp::Atom: return f;
        case FOp::Not: return nnf_neg(f->lhs);
        case FOp::And: return Formula::make_and(nnf_pos(f->lhs), nnf_pos(f->rhs));
        case FOp::Or: return Formula::make_or(nnf_pos(f->lhs), nnf_pos(f->rhs));
        case FOp::Next: return Formula::make_next(nnf_pos(f->lhs));
        case FOp::Until: return Formula::make_until(nnf_pos(f->lhs), nnf_pos(f->rhs));
        case FOp::Release: return Formula::make_release(nnf_pos(f->lhs), nnf_pos(f->rhs));
        case FOp::Exists: return Formula::make_exists(f->coalition, nnf_pos(f->lhs));
        case FOp::ForAll: return Formula::make_forall(f->coalition, nnf_pos(f->lhs));
    }
    return f;
}

static FormulaPtr nnf_neg(const FormulaPtr& f) {
    switch (f->op) {
        case FOp::Atom:
            if (f->is_true()) return Formula::make_false();
            if (f->is_false()) return Formula::make_true();
            return Formula::make_not(f);
        case FOp::Not: return nnf_pos(f->lhs);
        case FOp::And: return Formula::make_or(nnf_neg(f->lhs), nnf_neg(f->rhs));
        case FOp::Or: return Formula::make_and(nnf_neg(f->lhs), nnf_neg(f->rhs));
        case FOp::Next: return Formula::make_next(nnf_neg(f->lhs));
        case FOp::Until: return Formula::make_release(nnf_neg(f->lhs), nnf_neg(f->rhs));
        case FOp::Release: return Formula::make_until(nnf_neg(f->lhs), nnf_neg(f->rhs));
        case FOp::Exists: return Formula::make_forall(f->coalition, nnf_neg(f->lhs));
        case FOp::ForAll: return Formula::make_exists(f->coalition, nnf_neg(f->lhs));
    }
    return f;
}

FormulaPtr to_nnf(const FormulaPtr& f) { return nnf_pos(f); }

// ============================================================================
// Subformulas and substitution
// ============================================================================

static void post_order(const FormulaPtr& f, std::vector<FormulaPtr>& out,
                        std::set<std::string>& seen) {
    if (!f) return;
    post_order(f->lhs, out, seen);
    post_order(f->rhs, out, seen);
    std::string key = print_formula(f);
    if (seen.insert(key).second) out.push_back(f);
}

std::vector<FormulaPtr> subformulas(const FormulaPtr& f) {
    std::vector<FormulaPtr> out;
    std::set<std::string> seen;
    post_order(f, out, seen);
    std::stable_sort(out.begin(), out.end(), [](const FormulaPtr& a, const FormulaPtr& b) {
        size_t na = node_count(a), nb = node_count(b);
        if (na != nb) return na < nb;
        return print_formula(a) < print_formula(b);
    });
    return out;
}

FormulaPtr strip_strategic(const FormulaPtr& f) {
    if (!f) return f;
    if (f->is_strategic()) return strip_strategic(f->lhs);
    return make_node(f->op, f->atom, f->coalition, strip_strategic(f->lhs),
                     strip_strategic(f->rhs));
}

FormulaPtr rewrite_coalitions(const FormulaPtr& f, const std::vector<std::string>& target) {
    if (!f) return f;
    if (f->is_strategic())
        return Formula::make_exists(target, rewrite_coalitions(f->lhs, target));
    return make_node(f->op, f->atom, f->coalition, rewrite_coalitions(f->lhs, target),
                     rewrite_coalitions(f->rhs, target));
}

FormulaPtr replace_subformula(const FormulaPtr& f, const FormulaPtr& target,
                              const std::string& atom) {
    if (!f) return f;
    if (formula_equal(f, target)) return Formula::make_atom(atom);
    return make_node(f->op, f->atom, f->coalition, replace_subformula(f->lhs, target, atom),
                     replace_subformula(f->rhs, target, atom));
}

// ============================================================================
// eliminate_negated_atoms
// ============================================================================

namespace {

struct NegAtomRewriter {
    const Icgs& model;
    std::map<std::string, std::string> fresh; // q -> not_q name (possibly suffixed)
    std::set<std::string> taken;

    explicit NegAtomRewriter(const Icgs& m) : model(m) {
        for (const auto& a : m.atoms) taken.insert(a);
    }

    std::string fresh_name(const std::string& q) {
        auto it = fresh.find(q);
        if (it != fresh.end()) return it->second;
        std::string base = "not_" + q;
        std::string name = base;
        for (int k = 1; taken.count(name); ++k) name = base + "_" + std::to_string(k);
        taken.insert(name);
        fresh.emplace(q, name);
        return name;
    }

    FormulaPtr rewrite(const FormulaPtr& f) {
        if (f->op == FOp::Not) {
            if (f->lhs->op != FOp::Atom)
                throw InputError("eliminate_negated_atoms requires NNF input");
            if (f->lhs->is_true()) return Formula::make_false();
            if (f->lhs->is_false()) return Formula::make_true();
            return Formula::make_atom(fresh_name(f->lhs->atom));
        }
        if (!f->lhs && !f->rhs) return f;
        return make_node(f->op, f->atom, f->coalition, f->lhs ? rewrite(f->lhs) : nullptr,
                         f->rhs ? rewrite(f->rhs) : nullptr);
    }
};

} // namespace

std::pair<Icgs, FormulaPtr> eliminate_negated_atoms(const Icgs& m, const FormulaPtr& f) {
    NegAtomRewriter rw(m);
    FormulaPtr g = rw.rewrite(f);
    Icgs out = m;
    for (const auto& [q, name] : rw.fresh) {
        std::vector<int> where;
        int qi = out.atom_index(q); // -1 when the atom is not in AP: !q holds everywhere
        for (int s = 0; s < static_cast<int>(out.states.size()); ++s) {
            if (qi < 0 || !out.has_atom(s, qi)) where.push_back(s);
        }
        out.add_atom(name, where);
    }
    return {std::move(out), std::move(g)};
}

// ============================================================================
// JSON AST
// ============================================================================

static const char* op_name(FOp op) {
    switch (op) {
        case FOp::Atom: return "Atom";
        case FOp::Not: return "Not";
        case FOp::And: return "And";
        case FOp::Or: return "Or";
        case FOp::Next: return "Next";
        case FOp::Until: return "Until";
        case FOp::Release: return "Release";
        case FOp::Exists: return "Exists";
        case FOp::ForAll: return "ForAll";
    }
    return "?";
}

nlohmann::ordered_json formula_to_json(const FormulaPtr& f) {
    nlohmann::ordered_json j;
    j["op"] = op_name(f->op);
    switch (f->op) {
        case FOp::Atom:
            j["name"] = f->atom;
            break;
        case FOp::Exists:
        case FOp::ForAll:
            j["coalition"] = f->coalition;
            j["child"] = formula_to_json(f->lhs);
            break;
        case FOp::Not:
        case FOp::Next:
            j["child"] = formula_to_json(f->lhs);
            break;
        default:
            j["lhs"] = formula_to_json(f->lhs);
            j["rhs"] = formula_to_json(f->rhs);
            break;
    }
    return j;
}

FormulaPtr formula_from_json(const nlohmann::json& j) {
    const std::string op = j.at("op").get<std::string>();
    if (op == "Atom") return Formula::make_atom(j.at("name").get<std::string>());
    if (op == "Not") return Formula::make_not(formula_from_json(j.at("child")));
    if (op == "Next") return Formula::make_next(formula_from_json(j.at("child")));
    if (op == "Exists" || op == "ForAll") {
        auto coal = j.at("coalition").get<std::vector<std::string>>();
        auto child = formula_from_json(j.at("child"));
        return op == "Exists" ? Formula::make_exists(std::move(coal), std::move(child))
                              : Formula::make_forall(std::move(coal), std::move(child));
    }
    auto lhs = formula_from_json(j.at("lhs"));
    auto rhs = formula_from_json(j.at("rhs"));
    if (op == "And") return Formula::make_and(std::move(lhs), std::move(rhs));
    if (op == "Or") return Formula::make_or(std::move(lhs), std::move(rhs));
    if (op == "Until") return Formula::make_until(std::move(lhs), std::move(rhs));
    if (op == "Release") return Formula::make_release(std::move(lhs), std::move(rhs));
    throw InputError("unknown formula op in JSON: " + op);
}

} // namespace stratmon
