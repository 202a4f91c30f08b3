#pragma once

// Axioms, derivations, and derivation checking.
//
// A derivation file is line-oriented:
//
//   1 <formula> ; taut
//   2 <formula> ; ax T | ax 4 | ax 5 | ax L | ax KKh | ax Kdef | N <i> | MP <i> <j>
//   3 <formula> ; macro <name>(<args>)
//   4 <formula> ; hyp
//
// Lines are numbered consecutively from 1.  `N <i>` and `MP <i> <j>` refer to
// earlier line numbers; `MP <i> <j>` takes the implication first and the
// antecedent second.  `hyp` marks a hypothesis and is accepted only when
// checking against a declared hypothesis set.  Macros expand in place to
// fully primitive steps; a macro line's stated formula must match the last
// expanded step.
//
// The restricted rules carry definability obligations: `ax Kdef` instances
// K_a(f -> g) -> (K_a f -> K_a g) require {g, K_a f} |> f, and `MP i j`
// deriving g from f -> g and f requires {g} |> f.  Obligations are
// discharged by the defcons module; the policy decides whether an Unknown
// counts as Assumed or Failed.  A Refuted obligation always rejects.

#include "se/defcons.hpp"
#include "se/formula.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace se {

class CalculusError : public std::runtime_error {
public:
    explicit CalculusError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Tautology checking
//
// Maximal non-boolean subformulas (atoms and K-formulas) become propositional
// letters; the remaining not/and skeleton is decided by truth table.

inline bool tautology_check(const Formula& f) {
    std::map<Formula, int> letters;
    // ops: kind 0 = letter(arg0), 1 = not(arg0), 2 = and(arg0, arg1); result is last op
    struct Op {
        int kind, a, b;
    };
    std::vector<Op> ops;
    auto compile = [&](auto&& self, const Formula& g) -> int {
        switch (g.kind()) {
            case Kind::Atom:
            case Kind::Know: {
                auto [it, fresh] = letters.try_emplace(g, static_cast<int>(letters.size()));
                (void)fresh;
                ops.push_back({0, it->second, 0});
                return static_cast<int>(ops.size()) - 1;
            }
            case Kind::Not: {
                int c = self(self, g.child());
                ops.push_back({1, c, 0});
                return static_cast<int>(ops.size()) - 1;
            }
            case Kind::And: {
                int l = self(self, g.left());
                int r = self(self, g.right());
                ops.push_back({2, l, r});
                return static_cast<int>(ops.size()) - 1;
            }
        }
        throw CalculusError("tautology_check: bad formula kind");
    };
    compile(compile, f);
    std::size_t n = letters.size();
    if (n > 20) throw CalculusError("tautology_check: more than 20 distinct letters");
    std::vector<char> val(ops.size());
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
        for (std::size_t k = 0; k < ops.size(); ++k) {
            const Op& op = ops[k];
            val[k] = op.kind == 0   ? static_cast<char>((m >> op.a) & 1)
                     : op.kind == 1 ? static_cast<char>(!val[op.a])
                                    : static_cast<char>(val[op.a] && val[op.b]);
        }
        if (!val.back()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Axiom schemas

struct AxiomInstance {
    std::string axiom;
    Agent agent;
    // Kdef carries the obligation {proviso_gamma} |> proviso_psi; others leave it empty.
    std::vector<Formula> proviso_gamma;
    Formula proviso_psi;
};

namespace detail {

inline bool dest_implies(const Formula& f, Formula& a, Formula& b) {
    // a -> b desugars to ~(a & ~b)
    if (f.kind() != Kind::Not || f.child().kind() != Kind::And) return false;
    const Formula& conj = f.child();
    if (conj.right().kind() != Kind::Not) return false;
    a = conj.left();
    b = conj.right().child();
    return true;
}

}  // namespace detail

inline std::optional<AxiomInstance> match_axiom(const std::string& name, const Formula& f) {
    using detail::dest_implies;
    Formula a, b;
    if (name == "T") {
        if (dest_implies(f, a, b) && a.kind() == Kind::Know && a.child() == b)
            return AxiomInstance{"T", a.agent(), {}, {}};
        return std::nullopt;
    }
    if (name == "4") {
        if (dest_implies(f, a, b) && a.kind() == Kind::Know &&
            b == Formula::know(a.agent(), a))
            return AxiomInstance{"4", a.agent(), {}, {}};
        return std::nullopt;
    }
    if (name == "5") {
        if (dest_implies(f, a, b) && a.kind() == Kind::Not && a.child().kind() == Kind::Know &&
            b == Formula::know(a.child().agent(), a))
            return AxiomInstance{"5", a.child().agent(), {}, {}};
        return std::nullopt;
    }
    if (name == "L") {
        // K_a p_a | K_a ~p_a desugars to ~(~K_a p_a & ~K_a ~p_a)
        if (f.kind() != Kind::Not || f.child().kind() != Kind::And) return std::nullopt;
        const Formula& l = f.child().left();
        const Formula& r = f.child().right();
        if (l.kind() != Kind::Not || r.kind() != Kind::Not) return std::nullopt;
        const Formula& kp = l.child();
        if (kp.kind() != Kind::Know || kp.child().kind() != Kind::Atom) return std::nullopt;
        if (kp.child().var().owner != kp.agent()) return std::nullopt;
        if (r.child() == Formula::know(kp.agent(), Formula::lnot(kp.child())))
            return AxiomInstance{"L", kp.agent(), {}, {}};
        return std::nullopt;
    }
    if (name == "Kdef" || name == "KKh") {
        // K_a(x -> y) -> (K_a x -> K_a y)    [Kdef, obligation {y, K_a x} |> x]
        // K_a(x -> y) -> (K_a x -> ~K_a ~y)  [KKh, no obligation]
        if (!dest_implies(f, a, b) || a.kind() != Kind::Know) return std::nullopt;
        Agent ag = a.agent();
        Formula x, y, ka, kb;
        if (!dest_implies(a.child(), x, y) || !dest_implies(b, ka, kb)) return std::nullopt;
        if (ka != Formula::know(ag, x)) return std::nullopt;
        if (name == "Kdef") {
            if (kb != Formula::know(ag, y)) return std::nullopt;
            return AxiomInstance{"Kdef", ag, {y, ka}, x};
        }
        if (kb != Formula::lnot(Formula::know(ag, Formula::lnot(y)))) return std::nullopt;
        return AxiomInstance{"KKh", ag, {}, {}};
    }
    throw CalculusError("match_axiom: unknown axiom '" + name + "'");
}

inline std::optional<AxiomInstance> match_any_axiom(const Formula& f) {
    for (const char* n : {"T", "4", "5", "L", "Kdef", "KKh"})
        if (auto m = match_axiom(n, f)) return m;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Derivations

enum class Rule : std::uint8_t { Taut, AxT, Ax4, Ax5, AxL, AxKdef, AxKKh, Nec, MP, Hyp, Macro };

struct Justification {
    Rule rule = Rule::Taut;
    int i = 0, j = 0;  // line references as written (1-based)
    std::string macro_name;
    std::vector<std::string> macro_args;
};

struct RawStep {
    int line_no = 0;       // position in the derivation (1-based)
    int text_line = 0;     // physical line in the source text (for messages)
    Formula formula;
    Justification just;
};

struct Derivation {
    std::vector<RawStep> steps;
    const Formula& conclusion() const {
        if (steps.empty()) throw CalculusError("empty derivation");
        return steps.back().formula;
    }
};

// A fully primitive step after macro expansion.
struct PrimStep {
    Formula formula;
    Rule rule = Rule::Taut;  // never Rule::Macro
    int i = -1, j = -1;      // 0-based indices into the expanded sequence
    int source_line = 0;     // derivation line this step came from
    std::string origin;      // expanding macro, or empty for a direct step
    int proviso = -1;        // index into CheckReport::provisos, when one exists
};

enum class ProvisoState : std::uint8_t { Proven, Assumed, Failed };

struct ProvisoEntry {
    int line = 0;
    std::string obligation;
    ProvisoState state = ProvisoState::Assumed;
    DefConsResult detail;
};

struct CheckReport {
    bool accepted = false;
    int reject_line = -1;
    std::string reason;
    std::vector<ProvisoEntry> provisos;
    std::vector<PrimStep> expanded;
};

struct CheckOptions {
    bool require_proven_provisos = false;
    DefConsOptions defcons;
};

// ---------------------------------------------------------------------------
// Derivation parsing

namespace detail {

inline std::string trim(std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_args(const std::string& s) {
    // formula syntax has no commas, so a flat split is exact
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t c = s.find(',', start);
        if (c == std::string::npos) {
            out.push_back(trim(s.substr(start)));
            break;
        }
        out.push_back(trim(s.substr(start, c - start)));
        start = c + 1;
    }
    return out;
}

inline Justification parse_justification(const std::string& text, int line) {
    auto fail = [&](const std::string& why) -> Justification {
        throw CalculusError("line " + std::to_string(line) + ": " + why);
    };
    std::istringstream in(text);
    std::string head;
    in >> head;
    Justification j;
    auto want_int = [&](const char* what) {
        int v;
        if (!(in >> v) || v <= 0) fail(std::string("expected step number after ") + what);
        return v;
    };
    auto want_end = [&] {
        std::string rest;
        if (in >> rest) fail("unexpected trailing '" + rest + "'");
    };
    if (head == "taut") {
        j.rule = Rule::Taut;
        want_end();
    } else if (head == "hyp") {
        j.rule = Rule::Hyp;
        want_end();
    } else if (head == "ax") {
        std::string which;
        if (!(in >> which)) fail("expected axiom name after 'ax'");
        if (which == "T") j.rule = Rule::AxT;
        else if (which == "4") j.rule = Rule::Ax4;
        else if (which == "5") j.rule = Rule::Ax5;
        else if (which == "L") j.rule = Rule::AxL;
        else if (which == "Kdef") j.rule = Rule::AxKdef;
        else if (which == "KKh") j.rule = Rule::AxKKh;
        else fail("unknown axiom '" + which + "'");
        want_end();
    } else if (head == "N") {
        j.rule = Rule::Nec;
        j.i = want_int("N");
        want_end();
    } else if (head == "MP") {
        j.rule = Rule::MP;
        j.i = want_int("MP");
        j.j = want_int("MP");
        want_end();
    } else if (head == "macro") {
        j.rule = Rule::Macro;
        std::string rest;
        std::getline(in, rest);
        rest = trim(rest);
        std::size_t open = rest.find('(');
        if (open == std::string::npos || rest.back() != ')')
            fail("macro justification must be 'macro <name>(<args>)'");
        j.macro_name = trim(rest.substr(0, open));
        std::string inner = rest.substr(open + 1, rest.size() - open - 2);
        if (j.macro_name.empty()) fail("missing macro name");
        if (!trim(inner).empty()) j.macro_args = split_args(inner);
    } else {
        fail("unknown justification '" + head + "'");
    }
    return j;
}

}  // namespace detail

inline Derivation parse_derivation(const std::string& text) {
    Derivation d;
    std::istringstream in(text);
    std::string line;
    int text_line = 0;
    int expect = 1;
    while (std::getline(in, line)) {
        ++text_line;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t semi = t.rfind(';');
        if (semi == std::string::npos)
            throw CalculusError("line " + std::to_string(text_line) + ": missing ';'");
        std::istringstream head(t.substr(0, semi));
        int num;
        if (!(head >> num))
            throw CalculusError("line " + std::to_string(text_line) + ": missing step number");
        if (num != expect)
            throw CalculusError("line " + std::to_string(text_line) + ": expected step " +
                                std::to_string(expect) + ", found " + std::to_string(num));
        std::string ftext;
        std::getline(head, ftext);
        RawStep s;
        s.line_no = num;
        s.text_line = text_line;
        try {
            s.formula = parse(ftext);
        } catch (const ParseError& e) {
            throw CalculusError("line " + std::to_string(text_line) + ": " + e.what());
        }
        s.just = detail::parse_justification(detail::trim(t.substr(semi + 1)), text_line);
        d.steps.push_back(std::move(s));
        ++expect;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Macro expansion
//
// Each expander appends primitive steps and returns the index of its result.
// Integer references are 0-based indices into the growing sequence.  A macro
// stands for a derived rule; any sub-derivations it relies on are expanded
// inline rather than referenced.

namespace detail {

struct Expander {
    std::vector<PrimStep>& out;
    int source_line;
    std::string origin;

    int emit(Rule r, Formula f, int i = -1, int j = -1) {
        out.push_back(PrimStep{std::move(f), r, i, j, source_line, origin, -1});
        return static_cast<int>(out.size()) - 1;
    }
    int taut(Formula f) { return emit(Rule::Taut, std::move(f)); }
    int axiom(Rule r, Formula f) { return emit(r, std::move(f)); }
    int nec(int i, const Agent& a) {
        return emit(Rule::Nec, Formula::know(a, out[static_cast<std::size_t>(i)].formula), i);
    }
    int mp(int i, int j, Formula conclusion) {
        return emit(Rule::MP, std::move(conclusion), i, j);
    }
    const Formula& f(int i) const { return out[static_cast<std::size_t>(i)].formula; }

    [[noreturn]] void fail(const std::string& why) const {
        throw CalculusError("line " + std::to_string(source_line) + ": macro " + origin + ": " +
                            why);
    }

    std::pair<Formula, Formula> implication(int i, const char* role) const {
        Formula a, b;
        if (!dest_implies(f(i), a, b))
            fail(std::string(role) + " (step " + std::to_string(i + 1) +
                 ") is not an implication");
        return {a, b};
    }
};

inline Formula conj_right(const std::vector<Formula>& fs) {
    if (fs.empty()) throw CalculusError("empty conjunction");
    Formula acc = fs.back();
    for (std::size_t k = fs.size() - 1; k-- > 0;) acc = Formula::land(fs[k], acc);
    return acc;
}

inline int ex_hs(Expander& e, int i, int j) {
    auto [phi, psi] = e.implication(i, "first premise");
    auto [psi2, rho] = e.implication(j, "second premise");
    if (psi != psi2) e.fail("premises do not chain");
    Formula target = Formula::implies(phi, rho);
    Formula mid = Formula::implies(e.f(j), target);
    int t = e.taut(Formula::implies(e.f(i), mid));
    int m1 = e.mp(t, i, mid);
    return e.mp(m1, j, target);
}

inline int ex_contrapos(Expander& e, int i) {
    auto [phi, psi] = e.implication(i, "premise");
    Formula target = Formula::implies(Formula::lnot(psi), Formula::lnot(phi));
    int t = e.taut(Formula::implies(e.f(i), target));
    return e.mp(t, i, target);
}

inline int ex_krepl(Expander& e, int i, const Agent& a) {
    auto [phi, psi] = e.implication(i, "premise");
    int n = e.nec(i, a);
    Formula target = Formula::implies(Formula::know(a, phi), Formula::know(a, psi));
    int k = e.axiom(Rule::AxKdef, Formula::implies(e.f(n), target));
    return e.mp(k, n, target);
}

inline int ex_kaconj(Expander& e, const Agent& a, const Formula& phi, const Formula& psi) {
    Formula conj = Formula::land(phi, psi);
    Formula inner = Formula::implies(psi, conj);
    int t1 = e.taut(Formula::implies(phi, inner));
    int n = e.nec(t1, a);
    Formula x = Formula::know(a, phi);
    Formula y = Formula::know(a, inner);
    Formula z = Formula::know(a, psi);
    Formula w = Formula::know(a, conj);
    Formula xy = Formula::implies(x, y);
    int k1 = e.axiom(Rule::AxKdef, Formula::implies(e.f(n), xy));
    int m1 = e.mp(k1, n, xy);
    Formula yzw = Formula::implies(y, Formula::implies(z, w));
    int k2 = e.axiom(Rule::AxKdef, yzw);
    Formula target = Formula::implies(Formula::land(x, z), w);
    int t2 = e.taut(Formula::implies(xy, Formula::implies(yzw, target)));
    int m2 = e.mp(t2, m1, Formula::implies(yzw, target));
    return e.mp(m2, k2, target);
}

inline int ex_manyimps(Expander& e, const std::vector<int>& refs) {
    if (refs.empty()) e.fail("needs at least one premise");
    std::vector<Formula> ants, cons;
    for (int r : refs) {
        auto [a, b] = e.implication(r, "premise");
        ants.push_back(a);
        cons.push_back(b);
    }
    Formula target = Formula::implies(conj_right(ants), conj_right(cons));
    Formula chain = target;
    for (std::size_t k = refs.size(); k-- > 0;) chain = Formula::implies(e.f(refs[k]), chain);
    int cur = e.taut(chain);
    for (int r : refs) {
        Formula a, rest;
        dest_implies(e.f(cur), a, rest);
        cur = e.mp(cur, r, rest);
    }
    return cur;
}

inline int ex_koverconj(Expander& e, const Agent& a, const std::vector<Formula>& fs) {
    if (fs.empty()) e.fail("needs at least one formula");
    if (fs.size() == 1) {
        Formula k = Formula::know(a, fs[0]);
        return e.taut(Formula::implies(k, k));
    }
    if (fs.size() == 2) return ex_kaconj(e, a, fs[0], fs[1]);
    std::vector<Formula> tail(fs.begin() + 1, fs.end());
    int rec = ex_koverconj(e, a, tail);
    Formula k1 = Formula::know(a, fs[0]);
    int t1 = e.taut(Formula::implies(k1, k1));
    int mi = ex_manyimps(e, {t1, rec});
    int kc = ex_kaconj(e, a, fs[0], conj_right(tail));
    return ex_hs(e, mi, kc);
}

inline int ex_addextrak(Expander& e, const Agent& a, const std::vector<Formula>& fs) {
    if (fs.empty()) e.fail("needs at least one formula");
    if (fs.size() == 1) {
        Formula k = Formula::know(a, fs[0]);
        return e.axiom(Rule::Ax4, Formula::implies(k, Formula::know(a, k)));
    }
    std::vector<int> axs;
    std::vector<Formula> ks;
    for (const Formula& f : fs) {
        Formula k = Formula::know(a, f);
        ks.push_back(k);
        axs.push_back(e.axiom(Rule::Ax4, Formula::implies(k, Formula::know(a, k))));
    }
    int mi = ex_manyimps(e, axs);
    int ko = ex_koverconj(e, a, ks);
    return ex_hs(e, mi, ko);
}

inline int ex_eqdef(Expander& e, int i, const Formula& target) {
    int t = e.taut(Formula::implies(e.f(i), target));
    return e.mp(t, i, target);
}

// Splits ~(first & K_a s_1 & ... & K_a s_m) into its pieces; `first` is given
// explicitly because it may itself be a K_a formula.
inline void dest_neg_conj(Expander& e, const Formula& f, const Formula& first, const Agent& a,
                          Formula& tail, std::vector<Formula>& bodies) {
    if (f.kind() != Kind::Not || f.child().kind() != Kind::And ||
        f.child().left() != first)
        e.fail("premise does not match ~(" + print(first) + " & ...)");
    tail = f.child().right();
    Formula cur = tail;
    while (true) {
        if (cur.kind() == Kind::Know && cur.agent() == a) {
            bodies.push_back(cur.child());
            return;
        }
        if (cur.kind() == Kind::And && cur.left().kind() == Kind::Know &&
            cur.left().agent() == a) {
            bodies.push_back(cur.left().child());
            cur = cur.right();
            continue;
        }
        e.fail("conjunction tail is not K[" + a + "] formulas");
    }
}

inline int ex_consrule(Expander& e, int i, const Agent& a, const Formula& phi) {
    Formula tail;
    std::vector<Formula> bodies;
    dest_neg_conj(e, e.f(i), phi, a, tail, bodies);
    Formula nphi = Formula::lnot(phi);
    int l2 = ex_eqdef(e, i, Formula::implies(tail, nphi));
    int l3 = e.nec(l2, a);
    Formula ktail = Formula::know(a, tail);
    Formula hat = Formula::khat(a, nphi);
    Formula step5 = Formula::implies(ktail, hat);
    int l4 = e.axiom(Rule::AxKKh, Formula::implies(e.f(l3), step5));
    int l5 = e.mp(l4, l3, step5);
    int l6 = ex_addextrak(e, a, bodies);
    int l7 = ex_hs(e, l6, l5);
    int l9 = ex_contrapos(e, l7);
    Formula knn = Formula::know(a, Formula::lnot(nphi));
    int l10 = ex_eqdef(e, l9, Formula::implies(knn, Formula::lnot(tail)));
    int l11 = e.taut(Formula::implies(phi, Formula::lnot(nphi)));
    int l12 = ex_krepl(e, l11, a);
    int l13 = ex_hs(e, l12, l10);
    return ex_eqdef(e, l13, Formula::lnot(Formula::land(Formula::know(a, phi), tail)));
}

inline int ex_consruleneg(Expander& e, int i, const Agent& a, const Formula& phi) {
    Formula tail;
    std::vector<Formula> bodies;
    dest_neg_conj(e, e.f(i), Formula::lnot(phi), a, tail, bodies);
    int l2 = ex_eqdef(e, i, Formula::implies(tail, phi));
    int l3 = e.nec(l2, a);
    Formula step5 = Formula::implies(Formula::know(a, tail), Formula::know(a, phi));
    int l4 = e.axiom(Rule::AxKdef, Formula::implies(e.f(l3), step5));
    int l5 = e.mp(l4, l3, step5);
    int l6 = ex_addextrak(e, a, bodies);
    int l7 = ex_hs(e, l6, l5);
    return ex_eqdef(
        e, l7, Formula::lnot(Formula::land(Formula::lnot(Formula::know(a, phi)), tail)));
}

inline int ex_weaken_neg(Expander& e, int i, const Formula& extra) {
    if (e.f(i).kind() != Kind::Not) e.fail("premise is not a negation");
    Formula target = Formula::lnot(Formula::land(extra, e.f(i).child()));
    int t = e.taut(Formula::implies(e.f(i), target));
    return e.mp(t, i, target);
}

inline int ex_weaken_imp_left(Expander& e, int i, const Formula& extra) {
    auto [c, psi] = e.implication(i, "premise");
    (void)psi;
    int t = e.taut(Formula::implies(Formula::land(extra, c), c));
    return ex_hs(e, t, i);
}

inline int ex_weaken_imp(Expander& e, int i, const Formula& extra) {
    Formula target = Formula::implies(extra, e.f(i));
    int t = e.taut(Formula::implies(e.f(i), target));
    return e.mp(t, i, target);
}

inline int ex_curry(Expander& e, int i) {
    auto [ab, c] = e.implication(i, "premise");
    if (ab.kind() != Kind::And) e.fail("antecedent is not a conjunction");
    Formula target = Formula::implies(ab.left(), Formula::implies(ab.right(), c));
    int t = e.taut(Formula::implies(e.f(i), target));
    return e.mp(t, i, target);
}

inline int ex_uncurry(Expander& e, int i) {
    auto [a, bc] = e.implication(i, "premise");
    Formula b, c;
    if (!dest_implies(bc, b, c)) e.fail("consequent is not an implication");
    Formula target = Formula::implies(Formula::land(a, b), c);
    int t = e.taut(Formula::implies(e.f(i), target));
    return e.mp(t, i, target);
}

inline int ex_locality(Expander& e, const Variable& v, bool positive) {
    const Agent& a = v.owner;
    Formula pa = Formula::atom(v);
    Formula lit = positive ? pa : Formula::lnot(pa);
    Formula other = positive ? Formula::lnot(pa) : pa;
    // from K_a other -> other, conclude lit -> ~K_a other, then via L reach K_a lit
    int t1 = e.axiom(Rule::AxT, Formula::implies(Formula::know(a, other), other));
    Formula notk = Formula::lnot(Formula::know(a, other));
    Formula half = Formula::implies(lit, notk);
    int t2 = e.taut(Formula::implies(e.f(t1), half));
    int m1 = e.mp(t2, t1, half);
    Formula l = Formula::lor(Formula::know(a, pa), Formula::know(a, Formula::lnot(pa)));
    int ax = e.axiom(Rule::AxL, l);
    Formula half2 = Formula::implies(notk, Formula::know(a, lit));
    int t3 = e.taut(Formula::implies(l, half2));
    int m2 = e.mp(t3, ax, half2);
    return ex_hs(e, m1, m2);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Checking

namespace detail {

struct ArgReader {
    const std::vector<std::string>& args;
    Expander& e;
    std::size_t pos = 0;

    bool done() const { return pos == args.size(); }
    const std::string& next(const char* what) {
        if (done()) e.fail(std::string("missing ") + what + " argument");
        return args[pos++];
    }
    int step_ref(const std::map<int, int>& line_to_prim, const char* what) {
        const std::string& s = next(what);
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                e.fail("expected step number, found '" + s + "'");
        int line = std::stoi(s);
        auto it = line_to_prim.find(line);
        if (it == line_to_prim.end()) e.fail("reference to unknown step " + s);
        return it->second;
    }
    Agent agent(const char* what) { return next(what); }
    Formula formula(const char* what) {
        try {
            return parse(next(what));
        } catch (const ParseError& ex) {
            e.fail(std::string("bad formula argument: ") + ex.what());
        }
    }
    std::vector<Formula> formulas(const char* what) {
        std::vector<Formula> out;
        while (!done()) out.push_back(formula(what));
        if (out.empty()) e.fail(std::string("missing ") + what + " arguments");
        return out;
    }
};

inline int run_macro(Expander& e, const std::string& name, const std::vector<std::string>& args,
                     const std::map<int, int>& line_to_prim,
                     const std::optional<Formula>& target) {
    ArgReader r{args, e};
    auto ref = [&](const char* what) { return r.step_ref(line_to_prim, what); };
    int result;
    if (name == "hs") {
        int i = ref("first premise"), j = ref("second premise");
        result = ex_hs(e, i, j);
    } else if (name == "contrapos") {
        result = ex_contrapos(e, ref("premise"));
    } else if (name == "krepl") {
        int i = ref("premise");
        result = ex_krepl(e, i, r.agent("agent"));
    } else if (name == "kaconj") {
        Agent a = r.agent("agent");
        Formula f = r.formula("formula"), g = r.formula("formula");
        result = ex_kaconj(e, a, f, g);
    } else if (name == "manyimps") {
        std::vector<int> refs;
        while (!r.done()) refs.push_back(ref("premise"));
        if (refs.empty()) e.fail("missing premise arguments");
        result = ex_manyimps(e, refs);
    } else if (name == "koverconj") {
        Agent a = r.agent("agent");
        result = ex_koverconj(e, a, r.formulas("formula"));
    } else if (name == "addextrak") {
        Agent a = r.agent("agent");
        result = ex_addextrak(e, a, r.formulas("formula"));
    } else if (name == "eqdef") {
        int i = ref("premise");
        Formula t = r.done() ? (target ? *target
                                       : (e.fail("eqdef needs a target formula"), Formula()))
                             : r.formula("target");
        result = ex_eqdef(e, i, t);
    } else if (name == "consrule") {
        int i = ref("premise");
        Agent a = r.agent("agent");
        result = ex_consrule(e, i, a, r.formula("formula"));
    } else if (name == "consruleneg") {
        int i = ref("premise");
        Agent a = r.agent("agent");
        result = ex_consruleneg(e, i, a, r.formula("formula"));
    } else if (name == "weaken_neg") {
        int i = ref("premise");
        result = ex_weaken_neg(e, i, r.formula("formula"));
    } else if (name == "weaken_imp_left") {
        int i = ref("premise");
        result = ex_weaken_imp_left(e, i, r.formula("formula"));
    } else if (name == "weaken_imp") {
        int i = ref("premise");
        result = ex_weaken_imp(e, i, r.formula("formula"));
    } else if (name == "curry") {
        result = ex_curry(e, ref("premise"));
    } else if (name == "uncurry") {
        result = ex_uncurry(e, ref("premise"));
    } else if (name == "locality" || name == "locality_neg") {
        Formula p = r.formula("variable");
        if (p.kind() != Kind::Atom) e.fail("argument must be a variable");
        result = ex_locality(e, p.var(), name == "locality");
    } else {
        e.fail("unknown macro");
    }
    if (!r.done()) e.fail("too many arguments");
    return result;
}

}  // namespace detail

// Expands one macro application.  Rule premises are supplied as formulas and
// appear as leading `hyp` steps that integer arguments reference by position
// (1-based); the expansion follows as primitive steps.
inline Derivation expand_macro(const std::string& name, const std::vector<std::string>& args,
                               const std::vector<Formula>& premises = {}) {
    std::vector<PrimStep> prim;
    std::map<int, int> line_to_prim;
    for (const Formula& p : premises) {
        prim.push_back(PrimStep{p, Rule::Hyp, -1, -1, static_cast<int>(prim.size()) + 1, "", -1});
        line_to_prim[static_cast<int>(prim.size())] = static_cast<int>(prim.size()) - 1;
    }
    detail::Expander e{prim, static_cast<int>(premises.size()) + 1, name};
    detail::run_macro(e, name, args, line_to_prim, std::nullopt);
    Derivation d;
    for (std::size_t k = 0; k < prim.size(); ++k) {
        RawStep s;
        s.line_no = static_cast<int>(k) + 1;
        s.text_line = s.line_no;
        s.formula = prim[k].formula;
        switch (prim[k].rule) {
            case Rule::Taut: s.just.rule = Rule::Taut; break;
            case Rule::Hyp: s.just.rule = Rule::Hyp; break;
            case Rule::AxT: s.just.rule = Rule::AxT; break;
            case Rule::Ax4: s.just.rule = Rule::Ax4; break;
            case Rule::Ax5: s.just.rule = Rule::Ax5; break;
            case Rule::AxL: s.just.rule = Rule::AxL; break;
            case Rule::AxKdef: s.just.rule = Rule::AxKdef; break;
            case Rule::AxKKh: s.just.rule = Rule::AxKKh; break;
            case Rule::Nec:
                s.just.rule = Rule::Nec;
                s.just.i = prim[k].i + 1;
                break;
            case Rule::MP:
                s.just.rule = Rule::MP;
                s.just.i = prim[k].i + 1;
                s.just.j = prim[k].j + 1;
                break;
            case Rule::Macro: throw CalculusError("macro expansion emitted a macro step");
        }
        d.steps.push_back(std::move(s));
    }
    return d;
}

namespace detail {

struct Checker {
    const CheckOptions& opts;
    const std::set<Formula>* hypotheses;
    CheckReport report;

    bool discharge(int line, std::vector<Formula> gamma, const Formula& psi, PrimStep& step,
                   const std::string& what) {
        ProvisoEntry entry;
        entry.line = line;
        std::string g;
        for (const Formula& f : gamma) {
            if (!g.empty()) g += ", ";
            g += print(f);
        }
        entry.obligation = what + ": {" + g + "} |> " + print(psi);
        entry.detail = check_defcons(gamma, psi, opts.defcons);
        switch (entry.detail.status) {
            case DefConsStatus::Proven: entry.state = ProvisoState::Proven; break;
            case DefConsStatus::Refuted: entry.state = ProvisoState::Failed; break;
            case DefConsStatus::Unknown:
                entry.state = opts.require_proven_provisos ? ProvisoState::Failed
                                                           : ProvisoState::Assumed;
                break;
        }
        step.proviso = static_cast<int>(report.provisos.size());
        report.provisos.push_back(std::move(entry));
        if (report.provisos.back().state == ProvisoState::Failed) {
            reject(line, report.provisos.back().detail.status == DefConsStatus::Refuted
                             ? "definability obligation refuted: " +
                                   report.provisos.back().obligation
                             : "definability obligation not proven: " +
                                   report.provisos.back().obligation);
            return false;
        }
        return true;
    }

    void reject(int line, std::string why) {
        if (report.reject_line >= 0) return;  // keep the first failure
        report.accepted = false;
        report.reject_line = line;
        report.reason = std::move(why);
    }

    bool verify(std::size_t k) {
        PrimStep& s = report.expanded[k];
        int line = s.source_line;
        auto& steps = report.expanded;
        auto check_axiom = [&](const char* name) {
            auto m = match_axiom(name, s.formula);
            if (!m) {
                reject(line, std::string("not an instance of ax ") + name +
                                 (s.origin.empty() ? "" : " (in macro " + s.origin + ")"));
                return false;
            }
            if (!m->proviso_gamma.empty())
                return discharge(line, m->proviso_gamma, m->proviso_psi, s, "ax Kdef");
            return true;
        };
        switch (s.rule) {
            case Rule::Taut:
                if (!tautology_check(s.formula)) {
                    reject(line, "not a tautology: " + print(s.formula));
                    return false;
                }
                return true;
            case Rule::AxT: return check_axiom("T");
            case Rule::Ax4: return check_axiom("4");
            case Rule::Ax5: return check_axiom("5");
            case Rule::AxL: return check_axiom("L");
            case Rule::AxKdef: return check_axiom("Kdef");
            case Rule::AxKKh: return check_axiom("KKh");
            case Rule::Nec: {
                const Formula& prem = steps[static_cast<std::size_t>(s.i)].formula;
                if (s.formula.kind() != Kind::Know || s.formula.child() != prem) {
                    reject(line, "step is not K[...] applied to the referenced step");
                    return false;
                }
                return true;
            }
            case Rule::MP: {
                const Formula& impl = steps[static_cast<std::size_t>(s.i)].formula;
                const Formula& ante = steps[static_cast<std::size_t>(s.j)].formula;
                Formula a, b;
                if (!dest_implies(impl, a, b) || a != ante || b != s.formula) {
                    reject(line, "MP premises do not produce this step");
                    return false;
                }
                return discharge(line, {s.formula}, ante, s, "MP");
            }
            case Rule::Hyp:
                if (!hypotheses) {
                    reject(line, "hypothesis step outside hypothesis checking");
                    return false;
                }
                if (!hypotheses->count(s.formula)) {
                    reject(line, "hypothesis not among the declared assumptions: " +
                                     print(s.formula));
                    return false;
                }
                return true;
            case Rule::Macro: break;
        }
        reject(line, "unexpandable step");
        return false;
    }
};

inline CheckReport check_impl(const Derivation& d, const CheckOptions& opts,
                              const std::set<Formula>* hypotheses) {
    Checker ck{opts, hypotheses, {}};
    ck.report.accepted = true;
    std::map<int, int> line_to_prim;
    for (const RawStep& raw : d.steps) {
        std::size_t before = ck.report.expanded.size();
        if (raw.just.rule == Rule::Macro) {
            Expander e{ck.report.expanded, raw.line_no, raw.just.macro_name};
            int result;
            try {
                result = run_macro(e, raw.just.macro_name, raw.just.macro_args, line_to_prim,
                                   raw.formula);
            } catch (const CalculusError& err) {
                ck.reject(raw.line_no, err.what());
                break;
            }
            if (ck.report.expanded[static_cast<std::size_t>(result)].formula != raw.formula) {
                ck.reject(raw.line_no,
                          "macro expands to " +
                              print(ck.report.expanded[static_cast<std::size_t>(result)].formula) +
                              ", not the stated " + print(raw.formula));
                break;
            }
        } else {
            PrimStep s;
            s.formula = raw.formula;
            s.rule = raw.just.rule;
            s.source_line = raw.line_no;
            auto resolve = [&](int line_ref) {
                auto it = line_to_prim.find(line_ref);
                if (it == line_to_prim.end() || line_ref >= raw.line_no) return -1;
                return it->second;
            };
            if (raw.just.rule == Rule::Nec || raw.just.rule == Rule::MP) {
                s.i = resolve(raw.just.i);
                if (s.i < 0) {
                    ck.reject(raw.line_no, "reference to step " + std::to_string(raw.just.i) +
                                               " is not an earlier step");
                    break;
                }
            }
            if (raw.just.rule == Rule::MP) {
                s.j = resolve(raw.just.j);
                if (s.j < 0) {
                    ck.reject(raw.line_no, "reference to step " + std::to_string(raw.just.j) +
                                               " is not an earlier step");
                    break;
                }
            }
            ck.report.expanded.push_back(std::move(s));
        }
        bool ok = true;
        for (std::size_t k = before; k < ck.report.expanded.size(); ++k)
            if (!ck.verify(k)) {
                ok = false;
                break;
            }
        if (!ok) break;
        line_to_prim[raw.line_no] = static_cast<int>(ck.report.expanded.size()) - 1;
    }
    if (ck.report.reject_line >= 0) ck.report.accepted = false;
    if (d.steps.empty()) {
        ck.report.accepted = false;
        ck.report.reason = "empty derivation";
    }
    return ck.report;
}

}  // namespace detail

inline CheckReport check_derivation(const Derivation& d, const CheckOptions& opts = {}) {
    return detail::check_impl(d, opts, nullptr);
}

// Accepts when d derives phi outright or derives a conjunction implication
// /\G0 -> phi for a nonempty G0 drawn from gamma in declared order
// (right-associated).  Hypothesis steps must come from gamma.
inline CheckReport check_hypothesis_derivation(const std::vector<Formula>& gamma,
                                               const Formula& phi, const Derivation& d,
                                               const CheckOptions& opts = {}) {
    std::set<Formula> hyps(gamma.begin(), gamma.end());
    CheckReport r = detail::check_impl(d, opts, &hyps);
    if (!r.accepted) return r;
    const Formula& concl = d.conclusion();
    if (concl == phi) return r;
    auto matches_subset_conj = [&](const Formula& c) {
        if (gamma.empty()) return false;
        std::size_t n = gamma.size();
        if (n > 16) throw CalculusError("too many hypotheses to match a conjunction");
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<Formula> sel;
            for (std::size_t k = 0; k < n; ++k)
                if (mask & (1u << k)) sel.push_back(gamma[k]);
            if (detail::conj_right(sel) == c) return true;
        }
        return false;
    };
    Formula c, b;
    if (detail::dest_implies(concl, c, b) && b == phi && matches_subset_conj(c)) return r;
    r.accepted = false;
    r.reject_line = d.steps.back().line_no;
    r.reason = "conclusion is neither the target nor a hypothesis implication for it";
    return r;
}

// True iff d is an outright accepted derivation of ~(/\G0) for some nonempty
// G0 drawn from gamma in declared order.  The empty set has no witnesses.
inline bool check_inconsistency_witness(const std::vector<Formula>& gamma, const Derivation& d,
                                        const CheckOptions& opts = {},
                                        CheckReport* out_report = nullptr) {
    CheckReport r = check_derivation(d, opts);
    bool ok = false;
    if (r.accepted && !gamma.empty() && !d.steps.empty()) {
        const Formula& concl = d.conclusion();
        if (concl.kind() == Kind::Not) {
            std::size_t n = gamma.size();
            if (n > 16) throw CalculusError("too many formulas to match a conjunction");
            for (std::uint32_t mask = 1; mask < (1u << n) && !ok; ++mask) {
                std::vector<Formula> sel;
                for (std::size_t k = 0; k < n; ++k)
                    if (mask & (1u << k)) sel.push_back(gamma[k]);
                if (Formula::lnot(detail::conj_right(sel)) == concl) ok = true;
            }
        }
        if (!ok) {
            r.accepted = false;
            r.reason = "conclusion does not negate a conjunction over the set";
        }
    }
    if (out_report) *out_report = std::move(r);
    return ok;
}

inline std::string report_summary(const CheckReport& r) {
    std::string out = r.accepted ? "ACCEPTED" : "REJECTED";
    if (!r.accepted && r.reject_line >= 0)
        out += " at step " + std::to_string(r.reject_line) + ": " + r.reason;
    else if (!r.accepted)
        out += ": " + r.reason;
    for (const ProvisoEntry& p : r.provisos) {
        out += "\n  step " + std::to_string(p.line) + " ";
        out += p.state == ProvisoState::Proven    ? "[proven]  "
               : p.state == ProvisoState::Assumed ? "[assumed] "
                                                  : "[failed]  ";
        out += p.obligation;
    }
    return out;
}

}  // namespace se
