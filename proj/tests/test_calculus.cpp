#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "se/calculus.hpp"
#include "se/formula.hpp"

using namespace se;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string deriv_path(const std::string& name) {
    return std::string(SE_DERIV_DIR) + "/" + name + ".drv";
}

Derivation load(const std::string& name) {
    return parse_derivation(read_file(deriv_path(name)));
}

struct ProvisoTally {
    int proven = 0, assumed = 0, failed = 0;
};

ProvisoTally tally(const CheckReport& r) {
    ProvisoTally t;
    for (const ProvisoEntry& p : r.provisos) {
        if (p.state == ProvisoState::Proven) ++t.proven;
        else if (p.state == ProvisoState::Assumed) ++t.assumed;
        else ++t.failed;
    }
    return t;
}

}  // namespace

TEST_CASE("tautology_check abstracts knowledge subformulas as letters") {
    CHECK(tautology_check(parse("(p_a -> p_a)")));
    CHECK(tautology_check(parse("(p_a | ~p_a)")));
    CHECK(tautology_check(parse("((p_a & q_b) -> p_a)")));
    CHECK(tautology_check(parse("(K[a] p_b -> K[a] p_b)")));
    CHECK(tautology_check(parse("((K[a] p_b & K[b] p_a) -> K[b] p_a)")));
    CHECK(tautology_check(parse("((p_a -> q_a) -> ((q_a -> r_a) -> (p_a -> r_a)))")));

    CHECK_FALSE(tautology_check(parse("p_a")));
    CHECK_FALSE(tautology_check(parse("(p_a -> q_b)")));
    // A knowledge letter is opaque: factivity is an axiom, not a tautology.
    CHECK_FALSE(tautology_check(parse("(K[a] p_b -> p_b)")));
    CHECK_FALSE(tautology_check(parse("(K[a] (p_a & q_a) -> K[a] p_a)")));
}

TEST_CASE("tautology_check rejects oversized letter alphabets") {
    // 21 distinct atoms exceeds the truth-table guard.
    std::string big = "p0_a";
    for (int i = 1; i <= 20; ++i) big = "(" + big + " & p" + std::to_string(i) + "_a)";
    CHECK_THROWS_AS(tautology_check(parse(big)), CalculusError);
}

TEST_CASE("axiom matching recognises exactly the six schemas") {
    auto t = match_axiom("T", parse("(K[a] p_b -> p_b)"));
    REQUIRE(t.has_value());
    CHECK(t->axiom == "T");
    CHECK(t->agent == "a");
    CHECK_FALSE(match_axiom("T", parse("(K[a] p_b -> p_c)")).has_value());

    auto four = match_axiom("4", parse("(K[a] p_b -> K[a] K[a] p_b)"));
    REQUIRE(four.has_value());
    CHECK(four->agent == "a");
    CHECK_FALSE(match_axiom("4", parse("(K[a] p_b -> K[b] K[a] p_b)")).has_value());

    auto five = match_axiom("5", parse("(~K[a] p_b -> K[a] ~K[a] p_b)"));
    REQUIRE(five.has_value());
    CHECK(five->agent == "a");
    CHECK_FALSE(match_axiom("5", parse("(~K[a] p_b -> K[b] ~K[a] p_b)")).has_value());

    auto l = match_axiom("L", parse("(K[a] p_a | K[a] ~p_a)"));
    REQUIRE(l.has_value());
    CHECK(l->agent == "a");
    // The variable must belong to the knowing agent.
    CHECK_FALSE(match_axiom("L", parse("(K[a] p_b | K[a] ~p_b)")).has_value());

    auto kdef = match_axiom("Kdef", parse("(K[a] (p_b -> q_b) -> (K[a] p_b -> K[a] q_b))"));
    REQUIRE(kdef.has_value());
    REQUIRE(kdef->proviso_gamma.size() == 2);
    CHECK(kdef->proviso_gamma[0] == parse("q_b"));
    CHECK(kdef->proviso_gamma[1] == parse("K[a] p_b"));
    CHECK(kdef->proviso_psi == parse("p_b"));

    auto kkh = match_axiom("KKh", parse("(K[a] (p_b -> q_b) -> (K[a] p_b -> Kh[a] q_b))"));
    REQUIRE(kkh.has_value());
    CHECK(kkh->proviso_gamma.empty());
    CHECK_FALSE(kkh->proviso_psi);

    CHECK_THROWS_AS(match_axiom("Z", parse("p_a")), CalculusError);
    CHECK(match_any_axiom(parse("(K[b] q_b -> q_b)")).has_value());
    CHECK_FALSE(match_any_axiom(parse("(p_a & p_b)")).has_value());
}

TEST_CASE("derivation parsing enforces shape") {
    Derivation d = parse_derivation("1 (p_a -> p_a) ; taut\n2 K[a](p_a -> p_a) ; N 1\n");
    REQUIRE(d.steps.size() == 2);
    CHECK(d.steps[0].just.rule == Rule::Taut);
    CHECK(d.steps[1].just.rule == Rule::Nec);
    CHECK(d.steps[1].just.i == 1);
    CHECK(d.conclusion() == parse("K[a] (p_a -> p_a)"));

    // Empty text parses to an empty derivation; it has no conclusion and
    // never checks out.
    Derivation none = parse_derivation("");
    CHECK(none.steps.empty());
    CHECK_THROWS_AS(none.conclusion(), CalculusError);
    CHECK_FALSE(check_derivation(none).accepted);

    CHECK_THROWS_AS(parse_derivation("2 p_a ; taut\n"), CalculusError);  // must start at 1
    CHECK_THROWS_AS(parse_derivation("1 p_a ; taut\n3 p_a ; taut\n"), CalculusError);
    CHECK_THROWS_AS(parse_derivation("1 p_a\n"), CalculusError);         // missing ';'
    CHECK_THROWS_AS(parse_derivation("1 p_a ; wow\n"), CalculusError);   // unknown rule
    CHECK_THROWS_AS(parse_derivation("1 p_a ; MP 0 0\n"), CalculusError);
    CHECK_THROWS_AS(parse_derivation("1 p_a ; macro hs\n"), CalculusError);  // needs (args)
}

TEST_CASE("the derivation corpus is accepted with every proviso proven") {
    struct Expect {
        const char* name;
        size_t steps, expanded, provisos;
        const char* conclusion;  // resugared surface form
    };
    // Frozen check statistics for the files shipped under derivations/.
    const Expect expects[] = {
        {"hs_chain", 7, 7, 3, "(K[a]~p_a -> ~K[a]p_a)"},
        {"locality_pos", 7, 9, 4, "(p_a -> K[a]p_a)"},
        {"locality_neg", 6, 9, 4, "(~p_a -> K[a]~p_a)"},
        {"weaken_neg", 3, 3, 1, "~(p_b & (p_a & ~p_a))"},
        {"imp_conj_pair", 5, 5, 2, "((K[a]p_a & K[b]p_b) -> (p_a & p_b))"},
        {"k_triple_conj", 5, 23, 14,
         "((K[a]p_a & (K[a]q_a & K[a]r_a)) -> K[a](p_a & (q_a & r_a)))"},
        {"k_conj", 8, 10, 6, "((K[a]p_b & K[a]p_c) -> K[a](p_b & p_c))"},
        {"k_idem_conj", 5, 16, 9, "((K[a]p_a & K[a]q_a) -> K[a](K[a]p_a & K[a]q_a))"},
        {"k_cons", 14, 40, 21, "~(K[a]~(K[a]p_a & K[a]q_a) & (K[a]p_a & K[a]q_a))"},
        {"k_cons_neg", 8, 12, 6, "~(~K[a]K[a]p_a & K[a]p_a)"},
        {"k_incons", 4, 25, 12, "~(K[a]p_b & K[a]~p_b)"},
    };
    CheckOptions opts;
    opts.require_proven_provisos = true;
    for (const Expect& e : expects) {
        CAPTURE(e.name);
        Derivation d = load(e.name);
        CHECK(d.steps.size() == e.steps);
        CHECK(d.conclusion() == parse(e.conclusion));
        CheckReport r = check_derivation(d, opts);
        CHECK(r.accepted);
        CHECK(r.reject_line == -1);
        CHECK(r.expanded.size() == e.expanded);
        CHECK(r.provisos.size() == e.provisos);
        ProvisoTally t = tally(r);
        CHECK(t.proven == static_cast<int>(e.provisos));
        CHECK(t.assumed == 0);
        CHECK(t.failed == 0);
        // No expanded step may still be a macro, and references stay backward.
        for (size_t k = 0; k < r.expanded.size(); ++k) {
            CHECK(r.expanded[k].rule != Rule::Macro);
            CHECK(r.expanded[k].i < static_cast<int>(k));
            CHECK(r.expanded[k].j < static_cast<int>(k));
        }
    }
}

TEST_CASE("unrestricted detachment is rejected where the proviso fails") {
    Derivation d = load("neg_mp");
    Formula hyp = parse(
        "(((p_a | ~p_a) & (p_b | ~p_b)) -> (Kh[c]Kh[a]Kh[b]p_c | Kh[c]Kh[b]Kh[a]~p_c))");
    CheckReport r = check_hypothesis_derivation({hyp}, d.conclusion(), d);
    CHECK_FALSE(r.accepted);
    CHECK(r.reject_line == 3);
    CHECK(r.reason.find("obligation refuted") != std::string::npos);
    REQUIRE_FALSE(r.provisos.empty());
    bool some_failed = false;
    for (const ProvisoEntry& p : r.provisos) some_failed |= p.state == ProvisoState::Failed;
    CHECK(some_failed);

    // Without the hypothesis the derivation cannot even introduce line 2.
    CheckReport bare = check_derivation(d);
    CHECK_FALSE(bare.accepted);
    CHECK(bare.reject_line == 2);
}

TEST_CASE("hypothesis conclusions may take conjunctive prefix form") {
    std::vector<Formula> gamma = {parse("p_a"), parse("q_a")};
    // Conclude an implication whose antecedent conjoins the hypotheses in
    // declared order.
    std::string text =
        "1 ((p_a & q_a) -> (q_a & p_a)) ; taut\n";
    Derivation d = parse_derivation(text);
    CHECK(check_hypothesis_derivation(gamma, parse("(q_a & p_a)"), d).accepted);

    // A reordered antecedent is a different formula and is not recognised.
    std::string rev =
        "1 ((q_a & p_a) -> (p_a & q_a)) ; taut\n";
    Derivation dr = parse_derivation(rev);
    CHECK_FALSE(check_hypothesis_derivation(gamma, parse("(p_a & q_a)"), dr).accepted);
}

TEST_CASE("hyp steps must restate a declared hypothesis") {
    Derivation d = parse_derivation("1 p_a ; hyp\n");
    CHECK(check_hypothesis_derivation({parse("p_a")}, parse("p_a"), d).accepted);
    CHECK_FALSE(check_hypothesis_derivation({parse("p_b")}, parse("p_a"), d).accepted);
    CHECK_FALSE(check_derivation(d).accepted);  // no hypotheses declared
}

TEST_CASE("rejections carry the failing line and a reason") {
    CheckReport bad_taut = check_derivation(parse_derivation("1 p_a ; taut\n"));
    CHECK_FALSE(bad_taut.accepted);
    CHECK(bad_taut.reject_line == 1);

    CheckReport bad_ax = check_derivation(parse_derivation("1 (K[a] p_b -> p_c) ; ax T\n"));
    CHECK_FALSE(bad_ax.accepted);
    CHECK(bad_ax.reject_line == 1);

    // Swapped MP operands: line 1 is not an implication of line 2.
    std::string swapped =
        "1 (p_a -> p_a) ; taut\n"
        "2 ((p_a -> p_a) -> (p_a | ~p_a)) ; taut\n"
        "3 (p_a | ~p_a) ; MP 1 2\n";
    CheckReport bad_mp = check_derivation(parse_derivation(swapped));
    CHECK_FALSE(bad_mp.accepted);
    CHECK(bad_mp.reject_line == 3);

    // A macro step must state exactly its expansion's conclusion.
    std::string lied =
        "1 (K[a]~p_b -> ~p_b) ; ax T\n"
        "2 ~(K[a]p_b & K[a]p_b) ; macro consrule(1, a, p_b)\n";
    CheckReport bad_macro = check_derivation(parse_derivation(lied));
    CHECK_FALSE(bad_macro.accepted);
    CHECK(bad_macro.reject_line == 2);
}

TEST_CASE("necessitation requires a derived premise") {
    std::string text =
        "1 (p_a -> p_a) ; taut\n"
        "2 K[b](p_a -> p_a) ; N 1\n"
        "3 K[a]K[b](p_a -> p_a) ; N 2\n";
    CheckReport r = check_derivation(parse_derivation(text));
    CHECK(r.accepted);
}

TEST_CASE("expand_macro produces a checkable primitive derivation") {
    Derivation hs = expand_macro("hs", {"1", "2"},
                                 {parse("(p_a -> q_a)"), parse("(q_a -> r_a)")});
    REQUIRE(hs.steps.size() >= 3);
    CHECK(hs.conclusion() == parse("(p_a -> r_a)"));
    CheckReport r = check_hypothesis_derivation(
        {parse("(p_a -> q_a)"), parse("(q_a -> r_a)")}, hs.conclusion(), hs);
    CHECK(r.accepted);

    Derivation cp = expand_macro("contrapos", {"1"}, {parse("(p_a -> q_b)")});
    CHECK(cp.conclusion() == parse("(~q_b -> ~p_a)"));

    // kaconj: knowing two things an agent owns yields knowing the conjunction.
    Derivation kc = expand_macro("kaconj", {"a", "p_a", "q_a"});
    CHECK(kc.conclusion() == parse("((K[a]p_a & K[a]q_a) -> K[a](p_a & q_a))"));
    CHECK(kc.steps.size() == 8);
    CHECK(check_derivation(kc, {}).accepted);

    CHECK_THROWS_AS(expand_macro("nope", {}), CalculusError);
    CHECK_THROWS_AS(expand_macro("hs", {"1"}, {parse("p_a")}), CalculusError);
}

TEST_CASE("locality macros derive both directions from the L axiom") {
    Derivation pos = expand_macro("locality", {"p_a"});
    CHECK(pos.conclusion() == parse("(p_a -> K[a]p_a)"));
    CHECK(check_derivation(pos).accepted);

    Derivation neg = expand_macro("locality_neg", {"p_a"});
    CHECK(neg.conclusion() == parse("(~p_a -> K[a]~p_a)"));
    CHECK(check_derivation(neg).accepted);
}

TEST_CASE("koverconj scales with its argument list") {
    Derivation one = expand_macro("koverconj", {"a", "p_b"});
    CHECK(one.conclusion() == parse("(K[a]p_b -> K[a]p_b)"));

    Derivation three = expand_macro("koverconj", {"a", "p_b", "p_c", "q_b"});
    CHECK(three.conclusion() ==
          parse("((K[a]p_b & (K[a]p_c & K[a]q_b)) -> K[a](p_b & (p_c & q_b)))"));
    CheckOptions strict;
    strict.require_proven_provisos = true;
    CHECK(check_derivation(three, strict).accepted);
}

TEST_CASE("inconsistency witnesses certify refutable hypothesis sets") {
    std::vector<Formula> gamma = {parse("K[a] p_b"), parse("K[a] ~p_b")};
    Derivation d = load("k_incons");
    CheckReport report;
    CHECK(check_inconsistency_witness(gamma, d, {}, &report));
    CHECK(report.accepted);
    // The conclusion must negate a conjunction over the declared set itself.
    CHECK_FALSE(check_inconsistency_witness({parse("K[a] p_b")}, d));
    CHECK_FALSE(check_inconsistency_witness({}, d));
    // Order matters: the reversed pair builds a different conjunction.
    CHECK_FALSE(check_inconsistency_witness({parse("K[a] ~p_b"), parse("K[a] p_b")}, d));
}

TEST_CASE("report summaries name the verdict and the proviso states") {
    CheckOptions strict;
    strict.require_proven_provisos = true;
    CheckReport good = check_derivation(load("k_conj"), strict);
    std::string s = report_summary(good);
    CHECK(s.find("ACCEPTED") != std::string::npos);
    CHECK(s.find("proven") != std::string::npos);

    CheckReport bad = check_derivation(parse_derivation("1 p_a ; taut\n"));
    std::string sb = report_summary(bad);
    CHECK(sb.find("REJECTED") != std::string::npos);
}
