#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "se/defcons.hpp"
#include "se/enumeration.hpp"
#include "se/formula.hpp"
#include "se/semantics.hpp"

using namespace se;

namespace {

std::vector<Formula> fl(std::initializer_list<const char*> texts) {
    std::vector<Formula> out;
    for (const char* t : texts) out.push_back(parse(t));
    return out;
}

DefConsStatus status_of(std::initializer_list<const char*> gamma, const char* psi,
                        const DefConsOptions& opts = {}) {
    return check_defcons(fl(gamma), parse(psi), opts).status;
}

// A refutation witness must make every premise defined and the goal not.
void check_witness(const std::vector<Formula>& gamma, const Formula& psi,
                   const DefConsResult& r) {
    REQUIRE(r.status == DefConsStatus::Refuted);
    REQUIRE(r.witness.has_value());
    const DefWitness& w = *r.witness;
    for (const Formula& g : gamma) CHECK(is_defined(w.model, w.face, g));
    CHECK_FALSE(is_defined(w.model, w.face, psi));
}

}  // namespace

TEST_CASE("the empty set entails nothing") {
    for (const char* psi : {"p_a", "~p_a", "(p_a & p_b)", "K[a] p_a", "K[a] K[b] p_b",
                            "(p_a | ~p_a)"}) {
        DefConsResult r = check_defcons({}, parse(psi));
        check_witness({}, parse(psi), r);
        CHECK(r.note == "empty set entails nothing");
        // The witness lives on a fresh agent the goal never mentions.
        std::set<Agent> used = agents_of(parse(psi));
        for (const Agent& a : r.witness->model.agents()) CHECK_FALSE(used.count(a));
    }
}

TEST_CASE("membership and weakening") {
    for (const char* phi : {"p_a", "K[a] p_b", "~(p_a & K[b] p_b)"}) {
        CHECK(status_of({phi}, phi) == DefConsStatus::Proven);
        CHECK(status_of({phi, "q_c"}, phi) == DefConsStatus::Proven);
        CHECK(status_of({"q_c", phi}, phi) == DefConsStatus::Proven);
    }
}

TEST_CASE("knowledge forces the knower's own atom") {
    CHECK(status_of({"K[a] p_b"}, "p_a") == DefConsStatus::Proven);
    CHECK(status_of({"K[a] p_b"}, "K[a] p_a") == DefConsStatus::Proven);
    CHECK(status_of({"K[a] ~K[b] p_a"}, "p_a") == DefConsStatus::Proven);
}

TEST_CASE("an agent's atom and knowing it are equidefinable") {
    auto [fwd, bwd] = equidefinable(parse("p_a"), parse("K[a] p_a"));
    CHECK(fwd.status == DefConsStatus::Proven);
    CHECK(bwd.status == DefConsStatus::Proven);
}

TEST_CASE("stacked and negated knowledge collapse definitionally") {
    auto [f1, b1] = equidefinable(parse("K[a] p_b"), parse("K[a] K[a] p_b"));
    CHECK(f1.status == DefConsStatus::Proven);
    CHECK(b1.status == DefConsStatus::Proven);

    auto [f2, b2] = equidefinable(parse("K[a] p_b"), parse("~K[a] p_b"));
    CHECK(f2.status == DefConsStatus::Proven);
    CHECK(b2.status == DefConsStatus::Proven);

    auto [f3, b3] = equidefinable(parse("K[a] p_b"), parse("K[a] ~K[a] p_b"));
    CHECK(f3.status == DefConsStatus::Proven);
    CHECK(b3.status == DefConsStatus::Proven);
}

TEST_CASE("knowing anything turns definedness into knowledge") {
    // With K[a]theta on hand, any defined formula is defined under K[a].
    CHECK(status_of({"K[a] p_b", "p_a"}, "K[a] p_a") == DefConsStatus::Proven);
    CHECK(status_of({"K[a] p_b", "K[a] p_c"}, "K[a] p_c") == DefConsStatus::Proven);
    CHECK(status_of({"K[a] p_b", "~K[a] p_c"}, "K[a] ~p_c") == DefConsStatus::Proven);
    // Without the auxiliary K[a]theta the lift can fail.
    CHECK(status_of({"p_b"}, "K[a] p_b") == DefConsStatus::Refuted);
}

TEST_CASE("implications under K distribute over knowledge conjunctions") {
    // K[a](K[a]x) -> K[a]y forces K[a](K[a]x -> y), and likewise toward Kh.
    CHECK(status_of({"(K[a] K[a] p_b -> K[a] p_c)"}, "K[a] (K[a] p_b -> p_c)") ==
          DefConsStatus::Proven);
    CHECK(status_of({"(K[a] (K[a] p_b & K[a] q_a) -> K[a] p_c)"},
                    "K[a] ((K[a] p_b & K[a] q_a) -> p_c)") == DefConsStatus::Proven);
    CHECK(status_of({"(K[a] K[a] p_b -> Kh[a] p_c)"}, "K[a] (K[a] p_b -> p_c)") ==
          DefConsStatus::Proven);
}

TEST_CASE("knowledge conjunctions wrap and unwrap under K") {
    auto [fwd, bwd] =
        equidefinable(parse("(K[a] p_b & K[a] p_c)"), parse("K[a] (K[a] p_b & K[a] p_c)"));
    CHECK(fwd.status == DefConsStatus::Proven);
    CHECK(bwd.status == DefConsStatus::Proven);
}

TEST_CASE("knowledge transfers across agents only toward the knower") {
    CHECK(status_of({"K[a] K[b] p_b"}, "K[a] p_b") == DefConsStatus::Proven);

    std::vector<Formula> gamma = fl({"K[a] K[b] p_b"});
    Formula psi = parse("K[b] p_b");
    DefConsResult r = check_defcons(gamma, psi);
    check_witness(gamma, psi, r);
}

TEST_CASE("refutation witnesses are genuine countermodels") {
    struct Case {
        std::initializer_list<const char*> gamma;
        const char* psi;
    };
    Case cases[] = {
        {{"p_b"}, "K[a] p_b"},
        {{"p_a"}, "p_b"},
        {{"K[a] p_b"}, "K[b] p_a"},
        {{"K[a] p_a"}, "K[a] p_b"},
        {{"(p_a & p_b)"}, "p_c"},
    };
    for (const Case& c : cases) {
        std::vector<Formula> gamma = fl(c.gamma);
        Formula psi = parse(c.psi);
        DefConsResult r = check_defcons(gamma, psi);
        check_witness(gamma, psi, r);
        CHECK(r.models_checked > 0);
    }
}

TEST_CASE("the definedness translation matches is_defined") {
    std::set<Agent> ags{"a", "b"};
    std::set<Variable> vars{Variable{"p", "a"}, Variable{"p", "b"}};
    std::vector<Formula> fs = enumerate_formulas(ags, vars, 4);

    EnumLimits lim;
    lim.max_vertices_per_agent = 2;
    int complexes = 0;
    enumerate_complexes({"a", "b"}, lim, [&](const Complex& m) {
        if (++complexes % 5 != 0) return true;  // sample
        for (const Formula& f : fs) {
            DefFormula d = def_translate(f);
            for (FaceId x = 0; x < m.face_count(); ++x)
                CHECK(eval_def(m, x, d) == is_defined(m, x, f));
        }
        return true;
    });
}

TEST_CASE("proven traces replay and reject tampering") {
    std::vector<Formula> gamma = fl({"K[a] K[b] p_b"});
    Formula psi = parse("K[a] p_b");
    DefConsResult r = check_defcons(gamma, psi);
    REQUIRE(r.status == DefConsStatus::Proven);
    CHECK(replay_trace(gamma, psi, r.trace));
    CHECK_FALSE(replay_trace(gamma, parse("K[a] p_c"), r.trace));
    CHECK_FALSE(replay_trace({}, psi, r.trace));
    CHECK(print_trace(r.trace).find(r.trace.rule) == 0);
    CHECK(r.prover_steps > 0);
}

TEST_CASE("exhausted budgets surface as unknown, not as answers") {
    DefConsOptions tight;
    tight.prover_budget = 1;
    tight.refuter_vertex_bound = 1;

    // True but beyond a one-step prover; too big for a one-vertex refuter.
    DefConsResult r =
        check_defcons(fl({"(K[a] K[a] p_b -> K[a] p_c)"}), parse("K[a] (K[a] p_b -> p_c)"), tight);
    CHECK(r.status == DefConsStatus::Unknown);
    CHECK(r.note.find("prover") != std::string::npos);
}

TEST_CASE("the distribution proviso pattern can fail") {
    // {y, K[a]x} |> x with x foreign to both premises is refutable.
    std::vector<Formula> gamma = fl({"p_b", "K[a] p_c"});
    Formula psi = parse("p_c");
    DefConsResult r = check_defcons(gamma, psi);
    check_witness(gamma, psi, r);
}

TEST_CASE("fresh agents avoid every agent of the goal") {
    CHECK(fresh_agent_for(parse("p_a")) == "b");
    CHECK(fresh_agent_for(parse("(p_a & p_b)")) == "c");
    CHECK(fresh_agent_for(parse("K[c] p_a")) == "b");
}

TEST_CASE("direct refuter reports exhaustion honestly") {
    RefuteOutcome out = refute_by_enumeration(fl({"p_a"}), parse("p_b"), 2);
    REQUIRE(out.witness.has_value());
    CHECK_FALSE(out.exhausted);  // stopped at the witness
    CHECK(out.complexes > 0);

    RefuteOutcome none = refute_by_enumeration(fl({"p_a"}), parse("K[a] p_a"), 2);
    CHECK_FALSE(none.witness.has_value());
    CHECK(none.exhausted);
}
