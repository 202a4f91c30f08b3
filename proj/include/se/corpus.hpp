#pragma once
// Worked-example models with named faces, bounded comparisons of local truth
// sets, and self-checking demo reports built from both.

#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "se/complex.hpp"
#include "se/formula.hpp"
#include "se/semantics.hpp"

namespace se {

struct CorpusError : std::runtime_error {
    explicit CorpusError(const std::string& what) : std::runtime_error(what) {}
};

// A model from the example corpus.  Named faces (facets of interest, or
// distinguished sub-faces) are stored as landmarks on the Complex itself.
struct NamedModel {
    std::string name;
    Complex model;

    FaceId at(const std::string& label) const { return model.landmark(label); }
};

namespace detail {

inline void mark(Complex& c, const std::string& label,
                 std::initializer_list<const char*> vertex_names) {
    std::vector<VertexId> ids;
    for (const char* n : vertex_names) ids.push_back(c.vertex_id(n));
    FaceId f = c.find_face(ids);
    if (f < 0) throw CorpusError("landmark " + label + " names a missing face");
    c.set_landmark(label, f);
}

}  // namespace detail

// Two triangles glued along the a-vertex: a cannot tell the worlds apart,
// b and c can.
inline NamedModel build_fig1_left() {
    Complex c = ComplexBuilder()
                    .agents({"a", "b", "c"})
                    .vertex("0_a", "a")
                    .vertex("1_b", "b", {"p"})
                    .vertex("0_b", "b")
                    .vertex("1_c_l", "c", {"p"})
                    .vertex("1_c_r", "c", {"p"})
                    .facet({"1_b", "0_a", "1_c_l"})
                    .facet({"0_a", "0_b", "1_c_r"})
                    .build();
    detail::mark(c, "left", {"1_b", "0_a", "1_c_l"});
    detail::mark(c, "right", {"0_a", "0_b", "1_c_r"});
    return {"fig1_left", std::move(c)};
}

// Two triangles glued along an ac-edge: only b can tell the worlds apart.
inline NamedModel build_fig1_mid() {
    Complex c = ComplexBuilder()
                    .agents({"a", "b", "c"})
                    .vertex("0_a", "a")
                    .vertex("1_b", "b", {"p"})
                    .vertex("0_b", "b")
                    .vertex("1_c", "c", {"p"})
                    .facet({"1_b", "0_a", "1_c"})
                    .facet({"0_a", "0_b", "1_c"})
                    .build();
    detail::mark(c, "left", {"1_b", "0_a", "1_c"});
    detail::mark(c, "right", {"0_a", "0_b", "1_c"});
    return {"fig1_mid", std::move(c)};
}

inline NamedModel build_fig1_right() {
    Complex c = ComplexBuilder()
                    .agents({"a", "b", "c"})
                    .vertex("0_a", "a")
                    .vertex("1_b", "b", {"p"})
                    .vertex("1_c", "c", {"p"})
                    .facet({"0_a", "1_b", "1_c"})
                    .build();
    detail::mark(c, "facet", {"0_a", "1_b", "1_c"});
    return {"fig1_right", std::move(c)};
}

// A triangle plus a dangling ab-edge: in the edge world c is dead, yet a
// still knows p_c because every a-adjacent world that defines p_c makes it
// true.
inline NamedModel build_fig2_left() {
    Complex c = ComplexBuilder()
                    .agents({"a", "b", "c"})
                    .vertex("0_a", "a")
                    .vertex("1_b_l", "b", {"p"})
                    .vertex("1_b_r", "b", {"p"})
                    .vertex("1_c", "c", {"p"})
                    .facet({"1_b_l", "0_a"})
                    .facet({"0_a", "1_b_r", "1_c"})
                    .build();
    detail::mark(c, "edge", {"1_b_l", "0_a"});
    detail::mark(c, "triangle", {"0_a", "1_b_r", "1_c"});
    return {"fig2_left", std::move(c)};
}

// Two edges glued at the a-vertex: a knows p_b and knows p_c, but their
// conjunction is undefined because no single a-adjacent world hosts b and c
// together.
inline NamedModel build_fig2_mid() {
    Complex c = ComplexBuilder()
                    .agents({"a", "b", "c"})
                    .vertex("0_a", "a")
                    .vertex("1_b", "b", {"p"})
                    .vertex("1_c", "c", {"p"})
                    .facet({"1_b", "0_a"})
                    .facet({"0_a", "1_c"})
                    .build();
    detail::mark(c, "left", {"1_b", "0_a"});
    detail::mark(c, "right", {"0_a", "1_c"});
    return {"fig2_mid", std::move(c)};
}

inline NamedModel build_fig2_right() {
    NamedModel nm = build_fig1_right();
    nm.name = "fig2_right";
    return nm;
}

// Edge X and triangle Y glued at the a-vertex.  K distribution fails here:
// a knows p_c and knows p_c -> p_b, yet K[a]p_b is false at both facets.
inline NamedModel build_c_K() {
    Complex c = ComplexBuilder()
                    .agents({"a", "b", "c"})
                    .vertex("0_a", "a")
                    .vertex("0_b", "b")
                    .vertex("1_b", "b", {"p"})
                    .vertex("1_c", "c", {"p"})
                    .facet({"0_b", "0_a"})
                    .facet({"0_a", "1_b", "1_c"})
                    .build();
    detail::mark(c, "X", {"0_b", "0_a"});
    detail::mark(c, "Y", {"0_a", "1_b", "1_c"});
    return {"c_K", std::move(c)};
}

// A six-edge path c_l - a_l - b_l - c_m - a_r - b_r - c_r of one-dimensional
// worlds.  Every world validates the local tautology for the two agents it
// hosts, and the hop chains along the path refute detachment for an
// implication whose antecedent is defined nowhere.
inline NamedModel build_c_MP() {
    Complex c = ComplexBuilder()
                    .agents({"a", "b", "c"})
                    .vertex("a_l", "a")
                    .vertex("b_l", "b")
                    .vertex("c_l", "c", {"p"})
                    .vertex("c_m", "c")
                    .vertex("a_r", "a")
                    .vertex("b_r", "b")
                    .vertex("c_r", "c")
                    .facet({"a_l", "c_l"})
                    .facet({"a_l", "b_l"})
                    .facet({"c_m", "b_l"})
                    .facet({"c_m", "a_r"})
                    .facet({"b_r", "a_r"})
                    .facet({"b_r", "c_r"})
                    .build();
    detail::mark(c, "U", {"a_l", "c_l"});
    detail::mark(c, "V", {"a_l", "b_l"});
    detail::mark(c, "Y", {"c_m", "b_l"});
    detail::mark(c, "X", {"c_m", "a_r"});
    detail::mark(c, "W", {"b_r", "a_r"});
    detail::mark(c, "Z", {"b_r", "c_r"});
    return {"c_MP", std::move(c)};
}

// Two mirrored triangles U_l, U_r plus two crossing ac-edges Z_l, Z_r.  The
// valuation mirrors each agent's vertex pair, so the whole model has a
// half-turn symmetry swapping left and right.
inline NamedModel build_xmas(bool pa, bool pb, bool pc) {
    auto val = [](bool on) { return on ? std::set<std::string>{"p"} : std::set<std::string>{}; };
    Complex c = ComplexBuilder()
                    .agents({"a", "b", "c"})
                    .vertex("va_l", "a", val(pa))
                    .vertex("vb_l", "b", val(pb))
                    .vertex("vc_l", "c", val(pc))
                    .vertex("va_r", "a", val(pa))
                    .vertex("vb_r", "b", val(pb))
                    .vertex("vc_r", "c", val(pc))
                    .facet({"va_l", "vb_l", "vc_l"})
                    .facet({"va_r", "vb_r", "vc_r"})
                    .facet({"va_l", "vc_r"})
                    .facet({"vc_l", "va_r"})
                    .build();
    detail::mark(c, "U_l", {"va_l", "vb_l", "vc_l"});
    detail::mark(c, "U_r", {"va_r", "vb_r", "vc_r"});
    detail::mark(c, "Z_l", {"va_l", "vc_r"});
    detail::mark(c, "Z_r", {"vc_l", "va_r"});
    detail::mark(c, "W_l", {"va_l", "vc_l"});
    detail::mark(c, "W_r", {"va_r", "vc_r"});
    return {"xmas", std::move(c)};
}

// One ac-edge in a three-agent language: b is dead everywhere, so neither
// K[a]p_b nor its negation is ever defined.
inline NamedModel build_b_dead_edge() {
    Complex c = ComplexBuilder()
                    .agents({"a", "b", "c"})
                    .vertex("v_a", "a")
                    .vertex("v_c", "c")
                    .facet({"v_a", "v_c"})
                    .build();
    detail::mark(c, "U", {"v_a", "v_c"});
    return {"b_dead_edge", std::move(c)};
}

inline std::vector<std::string> corpus_names() {
    return {"b_dead_edge", "c_K",       "c_MP",       "fig1_left", "fig1_mid",
            "fig1_right",  "fig2_left", "fig2_mid",   "fig2_right", "xmas"};
}

// xmas defaults to the all-false valuation; build_xmas picks the other seven.
inline NamedModel corpus_build(const std::string& name) {
    if (name == "b_dead_edge") return build_b_dead_edge();
    if (name == "c_K") return build_c_K();
    if (name == "c_MP") return build_c_MP();
    if (name == "fig1_left") return build_fig1_left();
    if (name == "fig1_mid") return build_fig1_mid();
    if (name == "fig1_right") return build_fig1_right();
    if (name == "fig2_left") return build_fig2_left();
    if (name == "fig2_mid") return build_fig2_mid();
    if (name == "fig2_right") return build_fig2_right();
    if (name == "xmas") return build_xmas(false, false, false);
    std::string known;
    for (const auto& n : corpus_names()) known += (known.empty() ? "" : ", ") + n;
    throw CorpusError("unknown corpus model: " + name + " (known: " + known + ")");
}

// Truth-set comparisons are only meaningful over a finite fragment; beyond
// size 7 the fragment explodes, so refuse rather than thrash.
inline std::vector<Formula> bounded_fragment(const std::set<Agent>& agents,
                                             const std::set<Variable>& vars, int max_size) {
    if (max_size < 1 || max_size > 7)
        throw CorpusError("fragment size must be in 1..7, got " + std::to_string(max_size));
    return enumerate_formulas(agents, vars, max_size);
}

struct Disagreement {
    Formula witness;
    TruthValue3 at_x;
    TruthValue3 at_y;
};

// Empty result means every formula in fs takes the same truth value (one of
// true/false/undefined) at x and at y.
inline std::optional<Disagreement> bounded_truth_agreement(const Complex& m, FaceId x, FaceId y,
                                                           const std::vector<Formula>& fs) {
    Evaluator ev(m);
    for (const auto& f : fs) {
        TruthValue3 vx = ev.eval(f, x);
        TruthValue3 vy = ev.eval(f, y);
        if (vx != vy) return Disagreement{f, vx, vy};
    }
    return std::nullopt;
}

struct SubsetReport {
    bool holds = true;                      // everything true at x is true at y
    std::optional<Formula> counterexample;  // first formula true at x only
    std::optional<Formula> strictness;      // first formula true at y only
    bool strict() const { return holds && strictness.has_value(); }
};

inline SubsetReport bounded_subset(const Complex& m, FaceId x, FaceId y,
                                   const std::vector<Formula>& fs) {
    SubsetReport r;
    Evaluator ev(m);
    for (const auto& f : fs) {
        bool tx = ev.eval(f, x) == TruthValue3::True;
        bool ty = ev.eval(f, y) == TruthValue3::True;
        if (tx && !ty && r.holds) {
            r.holds = false;
            r.counterexample = f;
        }
        if (ty && !tx && !r.strictness) r.strictness = f;
    }
    return r;
}

// The K[a]-prefixed members of fs that are true at x, in enumeration order.
inline std::vector<Formula> ka_local_fragment(const Complex& m, FaceId x, const Agent& a,
                                              const std::vector<Formula>& fs) {
    std::vector<Formula> out;
    Evaluator ev(m);
    for (const auto& f : fs)
        if (f.kind() == Kind::Know && f.agent() == a && ev.eval(f, x) == TruthValue3::True)
            out.push_back(f);
    return out;
}

struct DemoCheck {
    std::string label;
    std::string expected;
    std::string computed;
    bool pass = false;
};

struct DemoReport {
    std::string name;
    std::vector<DemoCheck> checks;

    bool pass() const {
        if (checks.empty()) return false;
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline std::string tv_name(TruthValue3 v) {
    switch (v) {
        case TruthValue3::True: return "true";
        case TruthValue3::False: return "false";
        default: return "undefined";
    }
}

struct DemoBuilder {
    DemoReport report;

    explicit DemoBuilder(std::string name) : report{std::move(name), {}} {}

    void check(const std::string& label, const std::string& expected,
               const std::string& computed) {
        report.checks.push_back({label, expected, computed, expected == computed});
    }

    void check_value(Evaluator& ev, const NamedModel& nm, const std::string& fsrc,
                     const std::string& face_label, TruthValue3 want) {
        TruthValue3 got = ev.eval(parse(fsrc), nm.at(face_label));
        check(fsrc + " at " + face_label, tv_name(want), tv_name(got));
    }

    void check_yesno(const std::string& label, bool expected, bool computed) {
        check(label, expected ? "yes" : "no", computed ? "yes" : "no");
    }
};

inline std::string xmas_val_name(int bits) {
    std::ostringstream os;
    os << "p_a=" << (bits & 1) << " p_b=" << ((bits >> 1) & 1) << " p_c=" << ((bits >> 2) & 1);
    return os.str();
}

inline std::set<Variable> abc_vars() {
    return {Variable{"p", "a"}, Variable{"p", "b"}, Variable{"p", "c"}};
}

}  // namespace detail

// K distribution fails: a knows the implication and its antecedent, yet the
// consequent names an agent who might be dead.  The negated instance holds
// everywhere in c_K.
inline DemoReport demo_lemma_4_2() {
    detail::DemoBuilder b("lemma_4_2");
    NamedModel nm = build_c_K();
    Evaluator ev(nm.model);
    const std::string inst = "(K[a](p_c -> p_b) -> (K[a]p_c -> K[a]p_b))";
    for (const char* face : {"X", "Y"}) {
        b.check_value(ev, nm, "K[a](p_c -> p_b)", face, TruthValue3::True);
        b.check_value(ev, nm, "K[a]p_c", face, TruthValue3::True);
        b.check_value(ev, nm, "K[a]p_b", face, TruthValue3::False);
        b.check_value(ev, nm, inst, face, TruthValue3::False);
    }
    b.check_yesno("~" + inst + " valid in c_K", true,
                  model_valid(nm.model, Formula::lnot(parse(inst))));
    return b.report;
}

// Detachment fails: the premise and the implication are valid in c_MP (the
// implication vacuously, being defined nowhere) but the conclusion is false
// at facet X.
inline DemoReport demo_lemma_4_3() {
    detail::DemoBuilder b("lemma_4_3");
    NamedModel nm = build_c_MP();
    Evaluator ev(nm.model);
    const std::string psi = "(Kh[c]Kh[a]Kh[b]p_c | Kh[c]Kh[b]Kh[a]~p_c)";
    const std::string premise = "((p_a | ~p_a) & (p_b | ~p_b))";
    b.check_value(ev, nm, "Kh[c]Kh[a]Kh[b]p_c", "X", TruthValue3::False);
    b.check_value(ev, nm, "Kh[c]Kh[b]Kh[a]~p_c", "X", TruthValue3::False);
    b.check_value(ev, nm, psi, "X", TruthValue3::False);
    b.check_yesno(premise + " valid in c_MP", true, model_valid(nm.model, parse(premise)));
    Formula impl = parse("(" + premise + " -> " + psi + ")");
    int undefined = 0;
    for (FaceId f = 0; f < nm.model.face_count(); ++f)
        if (ev.eval(impl, f) == TruthValue3::Undefined) ++undefined;
    b.check("faces where the implication is undefined",
            std::to_string(nm.model.face_count()) + " of " + std::to_string(nm.model.face_count()),
            std::to_string(undefined) + " of " + std::to_string(nm.model.face_count()));
    b.check_yesno("implication valid in c_MP (vacuously)", true, model_valid(nm.model, impl));
    b.check_yesno(psi + " valid in c_MP", false, model_valid(nm.model, parse(psi)));
    return b.report;
}

// The xmas model's half-turn symmetry equates the truth sets of mirrored
// faces, and the shared or corresponding a/c vertices equate the knowledge
// fragments of Z_l and U_l.  Checked over the whole bounded fragment for all
// eight mirrored valuations.
inline DemoReport demo_example_6_1(int fragment_size = 5) {
    detail::DemoBuilder b("example_6_1");
    auto fs = bounded_fragment({"a", "b", "c"}, detail::abc_vars(), fragment_size);
    const std::pair<const char*, const char*> mirrors[] = {
        {"U_l", "U_r"}, {"Z_l", "Z_r"}, {"W_l", "W_r"}};
    for (const auto& [lx, ly] : mirrors) {
        std::string bad;
        for (int v = 0; v < 8 && bad.empty(); ++v) {
            NamedModel nm = build_xmas(v & 1, (v >> 1) & 1, (v >> 2) & 1);
            if (auto d = bounded_truth_agreement(nm.model, nm.at(lx), nm.at(ly), fs))
                bad = "differ on " + print(d->witness, true) + " (" + detail::tv_name(d->at_x) +
                      " vs " + detail::tv_name(d->at_y) + ") under " + detail::xmas_val_name(v);
        }
        b.check("truth sets at (" + std::string(lx) + ", " + ly + "), all 8 valuations, " +
                    std::to_string(fs.size()) + " formulas",
                "agree", bad.empty() ? "agree" : bad);
    }
    for (const char* agent : {"a", "c"}) {
        std::string bad;
        for (int v = 0; v < 8 && bad.empty(); ++v) {
            NamedModel nm = build_xmas(v & 1, (v >> 1) & 1, (v >> 2) & 1);
            auto at_z = ka_local_fragment(nm.model, nm.at("Z_l"), agent, fs);
            auto at_u = ka_local_fragment(nm.model, nm.at("U_l"), agent, fs);
            if (at_z != at_u)
                bad = "differ (" + std::to_string(at_z.size()) + " vs " +
                      std::to_string(at_u.size()) + " formulas) under " + detail::xmas_val_name(v);
        }
        b.check("K[" + std::string(agent) + "] fragment at (Z_l, U_l), all 8 valuations",
                "equal", bad.empty() ? "equal" : bad);
    }
    return b.report;
}

// The edge Z_l is a strictly less informed world than the triangle U_l: its
// truths all hold at U_l, and U_l adds a fact about b that Z_l cannot state.
inline DemoReport demo_lemma_6_2(int fragment_size = 5) {
    detail::DemoBuilder b("lemma_6_2");
    auto fs = bounded_fragment({"a", "b", "c"}, detail::abc_vars(), fragment_size);
    std::string bad_fwd, bad_wit, bad_rev;
    for (int v = 0; v < 8; ++v) {
        NamedModel nm = build_xmas(v & 1, (v >> 1) & 1, (v >> 2) & 1);
        auto fwd = bounded_subset(nm.model, nm.at("Z_l"), nm.at("U_l"), fs);
        if (!fwd.holds && bad_fwd.empty())
            bad_fwd = "breaks on " + print(*fwd.counterexample, true) + " under " +
                      detail::xmas_val_name(v);
        std::string want = ((v >> 1) & 1) ? "p_b" : "~p_b";
        std::string got = fwd.strictness ? print(*fwd.strictness, true) : "(none)";
        if (got != want && bad_wit.empty())
            bad_wit = got + " under " + detail::xmas_val_name(v);
        auto rev = bounded_subset(nm.model, nm.at("U_l"), nm.at("Z_l"), fs);
        if (rev.holds && bad_rev.empty()) bad_rev = "holds under " + detail::xmas_val_name(v);
    }
    b.check("truths at Z_l hold at U_l, all 8 valuations", "holds",
            bad_fwd.empty() ? "holds" : bad_fwd);
    b.check("first formula true at U_l only", "p_b or ~p_b, tracking the valuation",
            bad_wit.empty() ? "p_b or ~p_b, tracking the valuation" : bad_wit);
    b.check("reverse inclusion (U_l into Z_l)", "fails", bad_rev.empty() ? "fails" : bad_rev);
    return b.report;
}

// With agent b dead everywhere, K[a]p_b and its negation are both undefined,
// so neither can enter any local truth set.
inline DemoReport demo_example_6_3(int fragment_size = 5) {
    detail::DemoBuilder b("example_6_3");
    NamedModel nm = build_b_dead_edge();
    Evaluator ev(nm.model);
    for (const char* fsrc : {"p_b", "K[a]p_b", "~K[a]p_b", "Kh[a]p_b", "K[a]~p_b",
                             "(K[a]p_b | ~K[a]p_b)"})
        b.check_value(ev, nm, fsrc, "U", TruthValue3::Undefined);
    auto fs = bounded_fragment({"a", "b", "c"}, detail::abc_vars(), fragment_size);
    int mentioning = 0;
    int undefined = 0;
    for (const auto& f : fs) {
        std::set<Variable> vs;
        vars_of_into(f, vs);
        if (!vs.count(Variable{"p", "b"})) continue;
        ++mentioning;
        if (ev.eval(f, nm.at("U")) == TruthValue3::Undefined) ++undefined;
    }
    b.check("formulas naming p_b that are undefined at U", "all " + std::to_string(mentioning),
            undefined == mentioning ? "all " + std::to_string(mentioning)
                                    : std::to_string(undefined) + " of " +
                                          std::to_string(mentioning));
    return b.report;
}

inline std::vector<std::string> demo_names() {
    return {"lemma_4_2", "lemma_4_3", "example_6_1", "lemma_6_2", "example_6_3"};
}

inline DemoReport run_demo(const std::string& name, int fragment_size = 5) {
    if (name == "lemma_4_2") return demo_lemma_4_2();
    if (name == "lemma_4_3") return demo_lemma_4_3();
    if (name == "example_6_1") return demo_example_6_1(fragment_size);
    if (name == "lemma_6_2") return demo_lemma_6_2(fragment_size);
    if (name == "example_6_3") return demo_example_6_3(fragment_size);
    std::string known;
    for (const auto& n : demo_names()) known += (known.empty() ? "" : ", ") + n;
    throw CorpusError("unknown demo: " + name + " (known: " + known + ")");
}

inline std::string format_demo(const DemoReport& r) {
    std::ostringstream os;
    os << "demo " << r.name << '\n';
    int passed = 0;
    for (const auto& c : r.checks) {
        os << "  [" << (c.pass ? " ok " : "FAIL") << "] " << c.label << ": expected "
           << c.expected << ", computed " << c.computed << '\n';
        if (c.pass) ++passed;
    }
    os << (r.pass() ? "PASS" : "FAIL") << " (" << passed << "/" << r.checks.size()
       << " checks)\n";
    return os.str();
}

}  // namespace se
