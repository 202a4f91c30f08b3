#pragma once

// Definability consequence.
//
// gamma |> psi holds when psi is defined at every face of every model where
// all of gamma is defined.  The empty set never entails anything: each
// formula mentions at least one agent, and a model over one fresh agent
// leaves it undefined.
//
// check_defcons runs a syntactic prover whose rules are the closure
// properties of definedness (projection and negation transparency, locality
// of atoms, idempotence and negation absorption under K_a, introduction of
// K_a over provable bodies, constancy of K_a-prefixed antecedents across an
// adjacency class, and unwrapping one K_a assumption against the other
// K_a assumptions).  Failures fall through to a bounded model-enumeration
// refuter.  Proven results carry a replayable trace; Refuted results carry
// a witness model and face.

#include "se/complex.hpp"
#include "se/enumeration.hpp"
#include "se/formula.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace se {

// ---------------------------------------------------------------------------
// Definability skeletons
//
// The definedness of a formula at a face ignores the valuation entirely; it
// only sees which agents are alive where.  def_translate collapses a formula
// to that skeleton: atoms ask that the owner is alive, negation vanishes,
// conjunction stays, and K_a f asks that some face sharing the a-vertex
// satisfies the skeleton of f.

namespace detail {
struct DefNode;
using DefPtr = std::shared_ptr<const DefNode>;
struct DefNode {
    enum class K : std::uint8_t { Alive, DAnd, DSome } kind{};
    Agent agent;
    DefPtr l, r;
};
}  // namespace detail

class DefFormula {
public:
    using K = detail::DefNode::K;

    static DefFormula alive(Agent a) {
        auto n = std::make_shared<detail::DefNode>();
        n->kind = K::Alive;
        n->agent = std::move(a);
        return DefFormula(std::move(n));
    }
    static DefFormula dand(DefFormula l, DefFormula r) {
        auto n = std::make_shared<detail::DefNode>();
        n->kind = K::DAnd;
        n->l = l.n_;
        n->r = r.n_;
        return DefFormula(std::move(n));
    }
    static DefFormula dsome(Agent a, DefFormula c) {
        auto n = std::make_shared<detail::DefNode>();
        n->kind = K::DSome;
        n->agent = std::move(a);
        n->l = c.n_;
        return DefFormula(std::move(n));
    }

    K kind() const { return n_->kind; }
    const Agent& agent() const { return n_->agent; }
    DefFormula left() const { return DefFormula(n_->l); }
    DefFormula right() const { return DefFormula(n_->r); }
    DefFormula child() const { return DefFormula(n_->l); }
    const void* id() const { return n_.get(); }

    std::string str() const {
        switch (kind()) {
            case K::Alive: return "alive(" + agent() + ")";
            case K::DAnd: return "(" + left().str() + " & " + right().str() + ")";
            case K::DSome: return "some[" + agent() + "] " + child().str();
        }
        return {};
    }

private:
    explicit DefFormula(detail::DefPtr n) : n_(std::move(n)) {}
    detail::DefPtr n_;
};

inline DefFormula def_translate(const Formula& f) {
    switch (f.kind()) {
        case Kind::Atom: return DefFormula::alive(f.var().owner);
        case Kind::Not: return def_translate(f.child());
        case Kind::And: return DefFormula::dand(def_translate(f.left()), def_translate(f.right()));
        case Kind::Know: return DefFormula::dsome(f.agent(), def_translate(f.child()));
    }
    throw std::logic_error("def_translate: bad kind");
}

inline bool eval_def(const Complex& m, FaceId x, const DefFormula& s) {
    switch (s.kind()) {
        case DefFormula::K::Alive: return m.alive(x, s.agent());
        case DefFormula::K::DAnd: return eval_def(m, x, s.left()) && eval_def(m, x, s.right());
        case DefFormula::K::DSome: {
            int ai = m.agent_index(s.agent());
            if (ai < 0) return false;
            VertexId v = m.agent_vertex(x, ai);
            if (v < 0) return false;
            for (FaceId y : m.faces_with_vertex(v))
                if (eval_def(m, y, s.child())) return true;
            return false;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Results

enum class DefConsStatus : std::uint8_t { Proven, Refuted, Unknown };

struct ProofNode {
    std::string rule;
    Formula goal;
    Formula aux;  // unwrapped assumption for "know-unwrap"
    std::vector<ProofNode> kids;
};

struct DefWitness {
    Complex model;
    FaceId face = -1;
    std::string note;
};

struct DefConsResult {
    DefConsStatus status = DefConsStatus::Unknown;
    ProofNode trace;                      // Proven only
    std::optional<DefWitness> witness;    // Refuted only
    std::size_t prover_steps = 0;
    std::size_t models_checked = 0;
    std::string note;
};

struct DefConsOptions {
    std::size_t prover_budget = 10000;
    int refuter_vertex_bound = 2;
    std::size_t refuter_max_complexes = 500000;
};

namespace detail {

inline const Formula& strip_not(const Formula& f) {
    const Formula* p = &f;
    while (p->kind() == Kind::Not) p = &p->child();
    return *p;
}

// Canonical body of K_a applied to `child`: outer negations are transparent
// for definedness and nested same-agent modalities collapse, so K_a child,
// K_a ~child and K_a K_a child all share one key.
inline Formula know_body_key(const Agent& a, const Formula& child) {
    Formula c = strip_not(child);
    while (c.kind() == Kind::Know && c.agent() == a) c = strip_not(c.child());
    return c;
}

// Conjunction tree whose leaves are (possibly negated) K_a formulas; the
// definedness of such a formula is constant across an a-adjacency class.
inline bool is_kconj(const Agent& a, const Formula& f) {
    const Formula& g = strip_not(f);
    if (g.kind() == Kind::Know) return g.agent() == a;
    if (g.kind() == Kind::And) return is_kconj(a, g.left()) && is_kconj(a, g.right());
    return false;
}

struct SequentCtx {
    std::set<Formula> members;  // negation-stripped assumptions and projections
    std::set<Agent> alive;
    std::map<Agent, std::set<Formula>> kentries;  // agent -> canonical K bodies

    void add(const Formula& f) {
        Formula g = strip_not(f);
        if (!members.insert(g).second) return;
        switch (g.kind()) {
            case Kind::Atom:
                alive.insert(g.var().owner);
                break;
            case Kind::And:
                add(g.left());
                add(g.right());
                break;
            case Kind::Know: {
                const Agent& a = g.agent();
                alive.insert(a);
                Formula key = know_body_key(a, g.child());
                if (kentries[a].insert(key).second && is_kconj(a, key)) add(key);
                break;
            }
            case Kind::Not:
                break;  // unreachable: stripped
        }
    }
};

struct BudgetExhausted {};

class SequentProver {
public:
    explicit SequentProver(std::size_t budget) : budget_(budget), initial_(budget) {}

    std::size_t steps_used() const { return initial_ - budget_; }

    bool prove(const std::vector<Formula>& gamma, const Formula& goal, ProofNode& out) {
        SequentCtx ctx;
        for (const Formula& f : gamma) ctx.add(f);
        return try_goal(ctx, goal, {}, out);
    }

private:
    bool try_goal(const SequentCtx& ctx, const Formula& g, std::set<Formula> unwrapped,
                  ProofNode& out) {
        if (budget_ == 0) throw BudgetExhausted{};
        --budget_;
        out.goal = g;
        out.kids.clear();
        Formula s = strip_not(g);
        if (ctx.members.count(s)) {
            out.rule = "member";
            return true;
        }
        switch (s.kind()) {
            case Kind::Atom:
                if (ctx.alive.count(s.var().owner)) {
                    out.rule = "atom-alive";
                    return true;
                }
                return false;
            case Kind::And: {
                ProofNode l, r;
                if (try_goal(ctx, s.left(), unwrapped, l) &&
                    try_goal(ctx, s.right(), unwrapped, r)) {
                    out.rule = "and-split";
                    out.kids = {std::move(l), std::move(r)};
                    return true;
                }
                return false;
            }
            case Kind::Know: {
                const Agent& a = s.agent();
                Formula key = know_body_key(a, s.child());
                auto it = ctx.kentries.find(a);
                const std::set<Formula>* entries = it == ctx.kentries.end() ? nullptr : &it->second;
                if (entries && entries->count(key)) {
                    out.rule = "know-member";
                    return true;
                }
                if (ctx.alive.count(a)) {
                    ProofNode body;
                    if (try_goal(ctx, key, unwrapped, body)) {
                        out.rule = "know-intro";
                        out.kids = {std::move(body)};
                        return true;
                    }
                }
                // K_a over an implication (or conjunction) whose antecedent is
                // a K_a-conjunction: its definedness is class-constant, so the
                // two halves can be established under separate K_a.
                if (key.kind() == Kind::And && is_kconj(a, key.left())) {
                    ProofNode l, r;
                    if (try_goal(ctx, Formula::know(a, key.left()), unwrapped, l) &&
                        try_goal(ctx, Formula::know(a, key.right()), unwrapped, r)) {
                        out.rule = "know-impl";
                        out.kids = {std::move(l), std::move(r)};
                        return true;
                    }
                }
                if (entries) {
                    for (const Formula& e : *entries) {
                        if (unwrapped.count(e)) continue;
                        SequentCtx sub;
                        for (const Formula& k : *entries) sub.add(Formula::know(a, k));
                        sub.add(e);
                        auto unwrapped2 = unwrapped;
                        unwrapped2.insert(e);
                        ProofNode kid;
                        if (try_goal(sub, g, std::move(unwrapped2), kid)) {
                            out.rule = "know-unwrap";
                            out.aux = e;
                            out.kids = {std::move(kid)};
                            return true;
                        }
                    }
                }
                return false;
            }
            case Kind::Not:
                return false;  // unreachable: stripped
        }
        return false;
    }

    std::size_t budget_;
    std::size_t initial_;
};

inline bool replay_node(const SequentCtx& ctx, const ProofNode& n) {
    Formula s = strip_not(n.goal);
    if (n.rule == "member") return ctx.members.count(s) > 0;
    if (n.rule == "atom-alive")
        return s.kind() == Kind::Atom && ctx.alive.count(s.var().owner) > 0;
    if (n.rule == "and-split")
        return s.kind() == Kind::And && n.kids.size() == 2 && n.kids[0].goal == s.left() &&
               n.kids[1].goal == s.right() && replay_node(ctx, n.kids[0]) &&
               replay_node(ctx, n.kids[1]);
    if (s.kind() != Kind::Know) return false;
    const Agent& a = s.agent();
    Formula key = know_body_key(a, s.child());
    auto it = ctx.kentries.find(a);
    const std::set<Formula>* entries = it == ctx.kentries.end() ? nullptr : &it->second;
    if (n.rule == "know-member") return entries && entries->count(key) > 0;
    if (n.rule == "know-intro")
        return ctx.alive.count(a) > 0 && n.kids.size() == 1 && n.kids[0].goal == key &&
               replay_node(ctx, n.kids[0]);
    if (n.rule == "know-impl")
        return key.kind() == Kind::And && is_kconj(a, key.left()) && n.kids.size() == 2 &&
               n.kids[0].goal == Formula::know(a, key.left()) &&
               n.kids[1].goal == Formula::know(a, key.right()) &&
               replay_node(ctx, n.kids[0]) && replay_node(ctx, n.kids[1]);
    if (n.rule == "know-unwrap") {
        if (!entries || !n.aux || !entries->count(n.aux) || n.kids.size() != 1 ||
            n.kids[0].goal != n.goal)
            return false;
        SequentCtx sub;
        for (const Formula& k : *entries) sub.add(Formula::know(a, k));
        sub.add(n.aux);
        return replay_node(sub, n.kids[0]);
    }
    return false;
}

}  // namespace detail

// Structurally re-checks a Proven trace against the original sequent.
inline bool replay_trace(const std::vector<Formula>& gamma, const Formula& psi,
                         const ProofNode& trace) {
    detail::SequentCtx ctx;
    for (const Formula& f : gamma) ctx.add(f);
    return trace.goal == psi && detail::replay_node(ctx, trace);
}

inline std::string print_trace(const ProofNode& n, int indent = 0) {
    std::string out(static_cast<size_t>(indent) * 2, ' ');
    out += n.rule;
    out += ": ";
    out += print(n.goal);
    if (n.aux) {
        out += "   [unwrap ";
        out += print(n.aux);
        out += "]";
    }
    out += "\n";
    for (const ProofNode& k : n.kids) out += print_trace(k, indent + 1);
    return out;
}

// First agent name, in the order a..z, a', b', ..., not mentioned by psi.
inline Agent fresh_agent_for(const Formula& psi) {
    std::set<Agent> used = agents_of(psi);
    for (int ticks = 0;; ++ticks)
        for (char c = 'a'; c <= 'z'; ++c) {
            Agent a = std::string(1, c) + std::string(static_cast<size_t>(ticks), '\'');
            if (!used.count(a)) return a;
        }
}

struct RefuteOutcome {
    std::optional<DefWitness> witness;
    bool exhausted = false;  // full enumeration completed within the caps
    std::size_t complexes = 0;
};

// Searches models over the agents of gamma and psi (vertex counts up to the
// bound) for a face where all of gamma is defined and psi is not.  With an
// empty gamma a single fresh-agent vertex refutes immediately.
inline RefuteOutcome refute_by_enumeration(const std::vector<Formula>& gamma, const Formula& psi,
                                           int vertex_bound, std::size_t max_complexes = 500000) {
    RefuteOutcome out;
    if (gamma.empty()) {
        Agent fresh = fresh_agent_for(psi);
        ComplexBuilder b;
        b.agents({fresh});
        b.vertex(fresh + "_0", fresh);
        b.facet({fresh + "_0"});
        Complex m = b.build();
        FaceId x = 0;
        if (eval_def(m, x, def_translate(psi)))
            throw std::logic_error("fresh-agent face defines psi");
        out.witness = DefWitness{std::move(m), x, "empty set entails nothing"};
        out.exhausted = true;
        out.complexes = 1;
        return out;
    }
    std::set<Agent> agset;
    for (const Formula& f : gamma) agents_of_into(f, agset);
    agents_of_into(psi, agset);
    std::vector<Agent> agents(agset.begin(), agset.end());
    std::vector<DefFormula> gs;
    gs.reserve(gamma.size());
    for (const Formula& f : gamma) gs.push_back(def_translate(f));
    DefFormula ps = def_translate(psi);
    EnumLimits lim;
    lim.max_vertices_per_agent = vertex_bound;
    lim.max_complexes = max_complexes;
    EnumStats stats = enumerate_complexes(agents, lim, [&](const Complex& m) {
        for (FaceId x = 0; x < m.face_count(); ++x) {
            bool all = true;
            for (const DefFormula& g : gs)
                if (!eval_def(m, x, g)) {
                    all = false;
                    break;
                }
            if (all && !eval_def(m, x, ps)) {
                out.witness = DefWitness{m, x, ""};
                return false;
            }
        }
        return true;
    });
    out.complexes = stats.complexes;
    out.exhausted = !stats.truncated && !out.witness.has_value();
    return out;
}

inline DefConsResult check_defcons(const std::vector<Formula>& gamma, const Formula& psi,
                                   const DefConsOptions& opts = {}) {
    DefConsResult r;
    if (gamma.empty()) {
        RefuteOutcome ro = refute_by_enumeration(gamma, psi, opts.refuter_vertex_bound,
                                                 opts.refuter_max_complexes);
        r.status = DefConsStatus::Refuted;
        r.witness = std::move(ro.witness);
        r.models_checked = ro.complexes;
        r.note = "empty set entails nothing";
        return r;
    }
    detail::SequentProver prover(opts.prover_budget);
    bool budget_hit = false;
    bool ok = false;
    ProofNode trace;
    try {
        ok = prover.prove(gamma, psi, trace);
    } catch (const detail::BudgetExhausted&) {
        budget_hit = true;
    }
    r.prover_steps = prover.steps_used();
    if (ok) {
        r.status = DefConsStatus::Proven;
        r.trace = std::move(trace);
        return r;
    }
    RefuteOutcome ro =
        refute_by_enumeration(gamma, psi, opts.refuter_vertex_bound, opts.refuter_max_complexes);
    r.models_checked = ro.complexes;
    if (ro.witness) {
        r.status = DefConsStatus::Refuted;
        r.witness = std::move(ro.witness);
        return r;
    }
    r.status = DefConsStatus::Unknown;
    r.note = budget_hit ? "prover budget exhausted; no witness within the vertex bound"
                        : "prover found no derivation; no witness within the vertex bound";
    return r;
}

// Both directions of definability equivalence.
inline std::pair<DefConsResult, DefConsResult> equidefinable(const Formula& f, const Formula& g,
                                                             const DefConsOptions& opts = {}) {
    return {check_defcons({f}, g, opts), check_defcons({g}, f, opts)};
}

}  // namespace se
