#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "se/formula.hpp"

using namespace se;

namespace {

// Independent size-count oracle.  Every formula of size k is a negation or a
// knowledge modality over a size k-1 formula, or a conjunction splitting the
// remaining k-1 between two children, so with A agents and V atoms:
//   n(1) = V,   n(k) = (1 + A) * n(k-1) + sum_{i+j=k-1} n(i) * n(j)
std::vector<std::uint64_t> counts_by_recurrence(int atoms, int agents, int max_size) {
    std::vector<std::uint64_t> n(static_cast<size_t>(max_size) + 1, 0);
    n[1] = static_cast<std::uint64_t>(atoms);
    for (int k = 2; k <= max_size; ++k) {
        std::uint64_t total = static_cast<std::uint64_t>(1 + agents) * n[static_cast<size_t>(k - 1)];
        for (int i = 1; i + 1 < k; ++i)
            total += n[static_cast<size_t>(i)] * n[static_cast<size_t>(k - 1 - i)];
        n[static_cast<size_t>(k)] = total;
    }
    return n;
}

Formula pa() { return Formula::atom(Variable{"p", "a"}); }
Formula pb() { return Formula::atom(Variable{"p", "b"}); }

}  // namespace

TEST_CASE("atoms print with their owner suffix") {
    CHECK(print(pa()) == "p_a");
    CHECK(print(Formula::atom(Variable{"q", "b"})) == "q_b");
}

TEST_CASE("surface connectives desugar to the four primitive kinds") {
    // p | q  ==  ~(~p & ~q)
    Formula dis = Formula::lor(pa(), pb());
    REQUIRE(dis.kind() == Kind::Not);
    REQUIRE(dis.child().kind() == Kind::And);
    CHECK(dis.child().left() == Formula::lnot(pa()));
    CHECK(dis.child().right() == Formula::lnot(pb()));

    // p -> q  ==  ~(p & ~q)
    Formula imp = Formula::implies(pa(), pb());
    REQUIRE(imp.kind() == Kind::Not);
    CHECK(imp.child().left() == pa());
    CHECK(imp.child().right() == Formula::lnot(pb()));

    // p <-> q  ==  (p -> q) & (q -> p)
    Formula eq = Formula::iff(pa(), pb());
    REQUIRE(eq.kind() == Kind::And);
    CHECK(eq.left() == Formula::implies(pa(), pb()));
    CHECK(eq.right() == Formula::implies(pb(), pa()));

    // Kh[a] p  ==  ~K[a]~p
    Formula kh = Formula::khat("a", pb());
    REQUIRE(kh.kind() == Kind::Not);
    REQUIRE(kh.child().kind() == Kind::Know);
    CHECK(kh.child().agent() == "a");
    CHECK(kh.child().child() == Formula::lnot(pb()));
}

TEST_CASE("iff builds both directions from one pair of operands") {
    // Regression: building the equivalence must not consume the operands
    // before the second implication is formed.
    Formula f = parse("(p_a <-> q_b)");
    Formula p = pa();
    Formula q = Formula::atom(Variable{"q", "b"});
    CHECK(f == Formula::land(Formula::implies(p, q), Formula::implies(q, p)));
    CHECK(f.size() == Formula::iff(p, q).size());
}

TEST_CASE("size counts nodes of the desugared tree") {
    CHECK(pa().size() == 1);
    CHECK(Formula::lnot(pa()).size() == 2);
    CHECK(Formula::land(pa(), pb()).size() == 3);
    CHECK(Formula::know("a", pa()).size() == 2);
    CHECK(Formula::lor(pa(), pb()).size() == 6);      // ~(~p & ~q)
    CHECK(Formula::implies(pa(), pb()).size() == 5);  // ~(p & ~q)
    CHECK(Formula::khat("a", pa()).size() == 4);      // ~K~p
}

TEST_CASE("parse round trips through print") {
    const char* samples[] = {
        "p_a",
        "~p_a",
        "(p_a & q_b)",
        "K[a] p_a",
        "K[a] K[b] p_b",
        "~K[carol] ~p_alice",
        "(K[a] p_a & ~(p_b & ~q_b))",
    };
    for (const char* s : samples) {
        Formula f = parse(s);
        CHECK(print(f) == s);
        CHECK(parse(print(f)) == f);
    }
}

TEST_CASE("resugared printing restores the dual modality") {
    Formula f = parse("Kh[a] p_b");
    CHECK(print(f) == "~K[a] ~p_b");
    CHECK(print(f, true) == "Kh[a] p_b");
    CHECK(parse(print(f, true)) == f);
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("p"), ParseError);          // no owner suffix
    CHECK_THROWS_AS(parse("(p_a & q_b"), ParseError); // unclosed paren
    CHECK_THROWS_AS(parse("p_a & q_b"), ParseError);  // binop needs parens
    CHECK_THROWS_AS(parse("K p_a"), ParseError);      // missing [agent]
    CHECK_THROWS_AS(parse("K[] p_a"), ParseError);
    CHECK_THROWS_AS(parse("p_a p_b"), ParseError);    // trailing tokens
    CHECK_THROWS_AS(parse("(p_a % q_b)"), ParseError);
}

TEST_CASE("parse with declared agents rejects stray modal owners") {
    std::set<Agent> declared{"a", "b"};
    CHECK(parse("K[a] p_b", declared) == Formula::know("a", pb()));
    CHECK_THROWS_AS(parse("K[z] p_a", declared), ParseError);
}

TEST_CASE("agents_of collects modal and owner agents") {
    Formula f = parse("(K[a] p_b & ~K[c] q_c)");
    CHECK(agents_of(f) == std::set<Agent>{"a", "b", "c"});
    CHECK(vars_of(f) == std::set<Variable>{Variable{"p", "b"}, Variable{"q", "c"}});
}

TEST_CASE("local_top is the excluded-middle disjunction for one variable") {
    Formula t = local_top(Variable{"p", "a"});
    CHECK(t == parse("(p_a | ~p_a)"));
}

TEST_CASE("structural equality is independent of node identity") {
    Formula f = parse("K[a] (p_a & q_b)");
    Formula g = parse("K[a] (p_a & q_b)");
    CHECK(f == g);
    CHECK(f.hash() == g.hash());
    CHECK(Formula::compare(f, g) == 0);
    CHECK(f.id() != nullptr);
}

TEST_CASE("enumeration matches the recurrence oracle and frozen counts") {
    std::set<Agent> agents{"a", "b"};
    std::set<Variable> vars{Variable{"p", "a"}, Variable{"p", "b"}};

    auto oracle = counts_by_recurrence(2, 2, 7);
    // Frozen expected counts per size for two agents with one variable each.
    const std::uint64_t frozen[] = {0, 2, 6, 22, 90, 394, 1806, 8558};
    for (int k = 1; k <= 7; ++k)
        REQUIRE(oracle[static_cast<size_t>(k)] == frozen[k]);

    std::vector<Formula> fs = enumerate_formulas(agents, vars, 7);
    std::map<int, std::uint64_t> by_size;
    for (const Formula& f : fs) ++by_size[f.size()];

    CHECK(fs.size() == 2 + 6 + 22 + 90 + 394 + 1806 + 8558);
    for (int k = 1; k <= 7; ++k)
        CHECK(by_size[k] == frozen[k]);
}

TEST_CASE("enumeration over three agents matches the recurrence oracle") {
    std::set<Agent> agents{"a", "b", "c"};
    std::set<Variable> vars{Variable{"p", "a"}, Variable{"p", "b"}, Variable{"p", "c"}};

    auto oracle = counts_by_recurrence(3, 3, 5);
    std::uint64_t expected = 0;
    for (int k = 1; k <= 5; ++k) expected += oracle[static_cast<size_t>(k)];
    REQUIRE(expected == 2058);  // frozen

    CHECK(enumerate_formulas(agents, vars, 5).size() == 2058);
}

TEST_CASE("enumeration is deterministic, ordered, and duplicate free") {
    std::set<Agent> agents{"a", "b"};
    std::set<Variable> vars{Variable{"p", "a"}, Variable{"p", "b"}};

    std::vector<Formula> fs = enumerate_formulas(agents, vars, 4);
    std::vector<Formula> again = enumerate_formulas(agents, vars, 4);
    REQUIRE(fs.size() == again.size());
    for (size_t i = 0; i < fs.size(); ++i) CHECK(fs[i] == again[i]);

    // Atoms come first, in variable order.
    REQUIRE(fs.size() >= 2);
    CHECK(print(fs[0]) == "p_a");
    CHECK(print(fs[1]) == "p_b");

    // Strictly increasing under the total order, hence duplicate free.
    for (size_t i = 0; i + 1 < fs.size(); ++i)
        CHECK(Formula::compare(fs[i], fs[i + 1]) < 0);

    // Sizes never decrease along the sequence.
    for (size_t i = 0; i + 1 < fs.size(); ++i)
        CHECK(fs[i].size() <= fs[i + 1].size());
}

TEST_CASE("enumerate_formulas validates its signature") {
    std::set<Agent> agents{"a"};
    std::set<Variable> vars{Variable{"p", "a"}};
    CHECK(enumerate_formulas(agents, vars, 0).empty());
    CHECK(enumerate_formulas(agents, vars, -3).empty());
    CHECK_THROWS_AS(enumerate_formulas({}, vars, 3), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_formulas(agents, {}, 3), std::invalid_argument);
    // A variable owned by an undeclared agent is a signature error.
    CHECK_THROWS_AS(enumerate_formulas(agents, {Variable{"p", "z"}}, 3),
                    std::invalid_argument);
}
