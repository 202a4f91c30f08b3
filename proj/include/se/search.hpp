#pragma once

// Bounded model enumeration and countermodel search.
//
// Models are enumerated in a fixed order: complexes as produced by
// enumerate_complexes, then valuations as ascending binary counters over
// (vertex, variable) cells.  Countermodel search walks that order and returns
// the first face where the query evaluates to False, so results are stable
// across runs and machines.
//
// Evaluation inside the search is vectorized: definedness is independent of
// the valuation and is computed once per (subformula, face); truth is then
// computed for 64 valuations at a time as bit masks.  Every witness is
// re-verified with the scalar evaluator before it is returned.

#include "se/complex.hpp"
#include "se/defcons.hpp"
#include "se/enumeration.hpp"
#include "se/formula.hpp"
#include "se/semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace se {

class SearchError : public std::runtime_error {
public:
    explicit SearchError(const std::string& what) : std::runtime_error(what) {}
};

struct Bounds {
    std::vector<Agent> agents = {"a"};
    int max_vertices_per_agent = 2;
    int vars_per_agent = 1;
    int max_facets = 0;             // 0 = no cap
    bool dedup_isomorphic = false;  // prune to canonical complexes
    std::uint64_t max_models = 0;   // 0 = no cap; safety valve for sweeps
};

// Variable names used by bounded enumeration: p, q, r, ...
inline std::vector<std::string> bound_variable_names(int vars_per_agent) {
    static const char* names[] = {"p", "q", "r", "s", "t", "u", "v", "w"};
    if (vars_per_agent < 0 || vars_per_agent > 8)
        throw SearchError("vars_per_agent must be between 0 and 8");
    return std::vector<std::string>(names, names + vars_per_agent);
}

namespace detail {

// Valuation cells: one bit per (vertex, variable name applicable to it).
// Vertex-major, names ascending within a vertex.  An ascending counter over
// these bits enumerates valuations.
struct Cells {
    std::vector<std::pair<VertexId, std::string>> cells;

    static Cells all_vars(const Complex& c, const std::vector<std::string>& names) {
        Cells cs;
        for (VertexId v = 0; v < static_cast<VertexId>(c.vertices().size()); ++v)
            for (const std::string& n : names) cs.cells.emplace_back(v, n);
        return cs;
    }

    // Only the cells a specific formula can read: its variables, placed on
    // the vertices of their owners.  Order remains vertex-major.
    static Cells for_formula(const Complex& c, const Formula& f) {
        std::set<Variable> vars;
        vars_of_into(f, vars);
        Cells cs;
        for (VertexId v = 0; v < static_cast<VertexId>(c.vertices().size()); ++v) {
            const Agent& owner = c.vertices()[static_cast<std::size_t>(v)].agent;
            for (const Variable& var : vars)
                if (var.owner == owner) cs.cells.emplace_back(v, var.name);
        }
        // vars is ordered by (name, owner); within one vertex all owners
        // coincide, so the emitted names are ascending as required
        return cs;
    }

    int bits() const { return static_cast<int>(cells.size()); }

    std::vector<std::set<std::string>> labels(const Complex& c, std::uint64_t m) const {
        std::vector<std::set<std::string>> out(c.vertices().size());
        for (std::size_t k = 0; k < cells.size(); ++k)
            if ((m >> k) & 1)
                out[static_cast<std::size_t>(cells[k].first)].insert(cells[k].second);
        return out;
    }
};

}  // namespace detail

// Calls fn for every labeled model within bounds; fn returns false to stop.
// Returns the number of models delivered.
template <typename F>
std::uint64_t enumerate_models(const Bounds& b, F&& fn) {
    std::vector<std::string> names = bound_variable_names(b.vars_per_agent);
    EnumLimits lim;
    lim.max_vertices_per_agent = b.max_vertices_per_agent;
    lim.dedup_isomorphic = b.dedup_isomorphic;
    std::uint64_t delivered = 0;
    enumerate_complexes(b.agents, lim, [&](const Complex& c) {
        if (b.max_facets > 0 && static_cast<int>(c.facets().size()) > b.max_facets) return true;
        detail::Cells cs = detail::Cells::all_vars(c, names);
        if (cs.bits() > 30) throw SearchError("valuation space too large; tighten the bounds");
        std::uint64_t total = std::uint64_t{1} << cs.bits();
        for (std::uint64_t m = 0; m < total; ++m) {
            if (b.max_models && delivered >= b.max_models) return false;
            ++delivered;
            if (!fn(c.with_valuation(cs.labels(c, m)))) return false;
        }
        return true;
    });
    return delivered;
}

inline std::uint64_t count_models(const Bounds& b) {
    return enumerate_models(b, [](const Complex&) { return true; });
}

// ---------------------------------------------------------------------------
// Vectorized evaluation
//
// For one unlabeled complex and one formula, computes False-masks per face
// over chunks of 64 consecutive valuations.  Bit i of a mask refers to
// valuation chunk*64 + i.

class MaskEvaluator {
public:
    MaskEvaluator(const Complex& c, const Formula& f)
        : c_(c), cells_(detail::Cells::for_formula(c, f)) {
        if (cells_.bits() > 30)
            throw SearchError("valuation space too large; tighten the bounds");
        root_ = compile(f);
        int nf = c.face_count();
        defined_.assign(nodes_.size(), std::vector<char>(static_cast<std::size_t>(nf), 0));
        for (std::size_t n = 0; n < nodes_.size(); ++n)
            for (FaceId x = 0; x < nf; ++x) defined_[n][static_cast<std::size_t>(x)] =
                static_cast<char>(compute_defined(static_cast<int>(n), x));
        truth_.assign(nodes_.size(), std::vector<std::uint64_t>(static_cast<std::size_t>(nf), 0));
    }

    int bits() const { return cells_.bits(); }
    std::uint64_t valuations() const { return std::uint64_t{1} << cells_.bits(); }
    std::uint64_t chunks() const { return (valuations() + 63) / 64; }
    // In the final (possibly partial) chunk only these bits index valuations.
    std::uint64_t valid_mask(std::uint64_t chunk) const {
        std::uint64_t rest = valuations() - chunk * 64;
        return rest >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << rest) - 1;
    }

    bool defined_at(FaceId x) const {
        return defined_[static_cast<std::size_t>(root_)][static_cast<std::size_t>(x)] != 0;
    }
    bool defined_somewhere() const {
        const auto& row = defined_[static_cast<std::size_t>(root_)];
        return std::find(row.begin(), row.end(), char(1)) != row.end();
    }

    // Fills out[x] with the False-mask of the root at face x for this chunk.
    void false_masks(std::uint64_t chunk, std::vector<std::uint64_t>& out) {
        compute_truth(chunk);
        int nf = c_.face_count();
        out.assign(static_cast<std::size_t>(nf), 0);
        std::uint64_t vm = valid_mask(chunk);
        const auto& t = truth_[static_cast<std::size_t>(root_)];
        const auto& d = defined_[static_cast<std::size_t>(root_)];
        for (FaceId x = 0; x < nf; ++x)
            if (d[static_cast<std::size_t>(x)])
                out[static_cast<std::size_t>(x)] = ~t[static_cast<std::size_t>(x)] & vm;
    }

    std::vector<std::set<std::string>> labels(std::uint64_t valuation) const {
        return cells_.labels(c_, valuation);
    }

private:
    struct Node {
        Kind kind;
        int a = -1, b = -1;   // children
        int agent_idx = -1;   // Know
        std::string var;      // Atom
        Agent owner;          // Atom
    };

    int compile(const Formula& f) {
        auto it = memo_.find(f.id());
        if (it != memo_.end()) return it->second;
        Node n;
        n.kind = f.kind();
        switch (f.kind()) {
            case Kind::Atom:
                n.var = f.var().name;
                n.owner = f.var().owner;
                break;
            case Kind::Not: n.a = compile(f.child()); break;
            case Kind::And:
                n.a = compile(f.left());
                n.b = compile(f.right());
                break;
            case Kind::Know:
                n.a = compile(f.child());
                n.agent_idx = c_.agent_index(f.agent());
                break;
        }
        nodes_.push_back(std::move(n));
        int idx = static_cast<int>(nodes_.size()) - 1;
        memo_[f.id()] = idx;
        return idx;
    }

    bool compute_defined(int ni, FaceId x) {
        const Node& n = nodes_[static_cast<std::size_t>(ni)];
        switch (n.kind) {
            case Kind::Atom: return c_.alive(x, n.owner);
            case Kind::Not: return defined_[static_cast<std::size_t>(n.a)][static_cast<std::size_t>(x)];
            case Kind::And:
                return defined_[static_cast<std::size_t>(n.a)][static_cast<std::size_t>(x)] &&
                       defined_[static_cast<std::size_t>(n.b)][static_cast<std::size_t>(x)];
            case Kind::Know: {
                if (n.agent_idx < 0) return false;
                VertexId v = c_.agent_vertex(x, n.agent_idx);
                if (v < 0) return false;
                for (FaceId y : c_.faces_with_vertex(v))
                    if (defined_[static_cast<std::size_t>(n.a)][static_cast<std::size_t>(y)])
                        return true;
                return false;
            }
        }
        return false;
    }

    // Truth-mask of cell k across the 64 valuations of a chunk: low cells
    // follow fixed periodic patterns, high cells are constant per chunk.
    std::uint64_t cell_mask(int k, std::uint64_t chunk) const {
        static const std::uint64_t pattern[6] = {
            0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
            0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull};
        if (k < 6) return pattern[k];
        return ((chunk >> (k - 6)) & 1) ? ~std::uint64_t{0} : 0;
    }

    void compute_truth(std::uint64_t chunk) {
        int nf = c_.face_count();
        for (std::size_t ni = 0; ni < nodes_.size(); ++ni) {
            const Node& n = nodes_[ni];
            auto& t = truth_[ni];
            const auto& d = defined_[ni];
            switch (n.kind) {
                case Kind::Atom: {
                    int ai = c_.agent_index(n.owner);
                    for (FaceId x = 0; x < nf; ++x) {
                        if (!d[static_cast<std::size_t>(x)]) {
                            t[static_cast<std::size_t>(x)] = 0;
                            continue;
                        }
                        VertexId v = c_.agent_vertex(x, ai);
                        int cell = cell_index(v, n.var);
                        t[static_cast<std::size_t>(x)] =
                            cell < 0 ? 0 : cell_mask(cell, chunk);
                    }
                    break;
                }
                case Kind::Not: {
                    const auto& ct = truth_[static_cast<std::size_t>(n.a)];
                    const auto& cd = defined_[static_cast<std::size_t>(n.a)];
                    for (FaceId x = 0; x < nf; ++x)
                        t[static_cast<std::size_t>(x)] =
                            cd[static_cast<std::size_t>(x)]
                                ? ~ct[static_cast<std::size_t>(x)] & full_
                                : 0;
                    break;
                }
                case Kind::And: {
                    const auto& lt = truth_[static_cast<std::size_t>(n.a)];
                    const auto& rt = truth_[static_cast<std::size_t>(n.b)];
                    for (FaceId x = 0; x < nf; ++x)
                        t[static_cast<std::size_t>(x)] =
                            lt[static_cast<std::size_t>(x)] & rt[static_cast<std::size_t>(x)];
                    break;
                }
                case Kind::Know: {
                    const auto& ct = truth_[static_cast<std::size_t>(n.a)];
                    const auto& cd = defined_[static_cast<std::size_t>(n.a)];
                    for (FaceId x = 0; x < nf; ++x) {
                        if (!d[static_cast<std::size_t>(x)]) {
                            t[static_cast<std::size_t>(x)] = 0;
                            continue;
                        }
                        VertexId v = c_.agent_vertex(x, n.agent_idx);
                        std::uint64_t acc = full_;
                        for (FaceId y : c_.faces_with_vertex(v))
                            if (cd[static_cast<std::size_t>(y)])
                                acc &= ct[static_cast<std::size_t>(y)];
                        t[static_cast<std::size_t>(x)] = acc;
                    }
                    break;
                }
            }
        }
    }

    int cell_index(VertexId v, const std::string& name) const {
        for (std::size_t k = 0; k < cells_.cells.size(); ++k)
            if (cells_.cells[k].first == v && cells_.cells[k].second == name)
                return static_cast<int>(k);
        return -1;
    }

    const Complex& c_;
    detail::Cells cells_;
    std::vector<Node> nodes_;
    std::map<const void*, int> memo_;
    int root_ = -1;
    std::vector<std::vector<char>> defined_;
    std::vector<std::vector<std::uint64_t>> truth_;
    static constexpr std::uint64_t full_ = ~std::uint64_t{0};
};

// ---------------------------------------------------------------------------
// Countermodel search

struct Witness {
    Complex model;
    FaceId face = -1;
    std::uint64_t models_checked = 0;  // labeled models inspected before the hit
};

namespace detail {

template <typename ComplexSource>
std::optional<Witness> find_countermodel_over(const Formula& f, ComplexSource&& complexes,
                                              std::uint64_t max_models) {
    std::optional<Witness> found;
    std::uint64_t seen = 0;
    complexes([&](const Complex& c) {
        MaskEvaluator ev(c, f);
        if (!ev.defined_somewhere()) {
            // definedness ignores labels, so no valuation can falsify here
            seen += ev.valuations();
            return true;
        }
        std::vector<std::uint64_t> masks;
        for (std::uint64_t chunk = 0; chunk < ev.chunks(); ++chunk) {
            if (max_models && seen >= max_models) return false;
            ev.false_masks(chunk, masks);
            std::uint64_t any = 0;
            for (std::uint64_t m : masks) any |= m;
            if (!any) {
                seen += std::min<std::uint64_t>(64, ev.valuations() - chunk * 64);
                continue;
            }
            int bit = __builtin_ctzll(any);
            std::uint64_t valuation = chunk * 64 + static_cast<std::uint64_t>(bit);
            for (FaceId x = 0; x < static_cast<FaceId>(masks.size()); ++x) {
                if (!((masks[static_cast<std::size_t>(x)] >> bit) & 1)) continue;
                Witness w{c.with_valuation(ev.labels(valuation)), x,
                          seen + static_cast<std::uint64_t>(bit)};
                if (eval3(w.model, x, f) != TruthValue3::False)
                    throw SearchError("mask search disagrees with the scalar evaluator");
                found = std::move(w);
                return false;
            }
            throw SearchError("lost the falsifying face");
        }
        return true;
    });
    return found;
}

}  // namespace detail

// First (model, face) in enumeration order where f evaluates to False.
// Valuations range over the variables of f only; other variables stay false,
// which cannot change eval3 and keeps the first witness identical.
inline std::optional<Witness> find_countermodel(const Formula& f, const Bounds& b) {
    EnumLimits lim;
    lim.max_vertices_per_agent = b.max_vertices_per_agent;
    lim.dedup_isomorphic = b.dedup_isomorphic;
    return detail::find_countermodel_over(
        f,
        [&](const std::function<bool(const Complex&)>& cb) {
            enumerate_complexes(b.agents, lim, [&](const Complex& c) {
                if (b.max_facets > 0 &&
                    static_cast<int>(c.facets().size()) > b.max_facets)
                    return true;
                return cb(c);
            });
        },
        b.max_models);
}

inline bool bounded_valid(const Formula& f, const Bounds& b) {
    return !find_countermodel(f, b).has_value();
}

// ---------------------------------------------------------------------------
// Soundness sweep
//
// Samples instances of every axiom schema, plus rule applications with valid
// premises, and checks that none has a countermodel within bounds.  K-
// distribution instances enter the sweep only when the definability
// obligation {g, K_a f} |> f is Proven; others are counted as excluded.

struct SweepOptions {
    int body_size = 3;         // max AST size of schema bodies
    int max_per_schema = 120;  // instance cap per schema
    DefConsOptions defcons;    // prover/refuter budgets for the Kdef filter
};

struct SweepEntry {
    int instances = 0;
    int failures = 0;
};

struct SweepReport {
    std::map<std::string, SweepEntry> schemas;
    std::vector<std::pair<std::string, Formula>> failures;  // (schema, instance)
    int kdef_excluded = 0;
    std::uint64_t complexes = 0;

    std::uint64_t instances() const {
        std::uint64_t n = 0;
        for (const auto& [name, e] : schemas) n += static_cast<std::uint64_t>(e.instances);
        return n;
    }
    bool ok() const { return failures.empty(); }
};

inline SweepReport soundness_sweep(const Bounds& b, const SweepOptions& opts = {}) {
    SweepReport report;

    // materialize the complexes once; every instance is checked against all
    std::vector<Complex> complexes;
    {
        EnumLimits lim;
        lim.max_vertices_per_agent = b.max_vertices_per_agent;
        lim.dedup_isomorphic = b.dedup_isomorphic;
        enumerate_complexes(b.agents, lim, [&](const Complex& c) {
            if (b.max_facets > 0 && static_cast<int>(c.facets().size()) > b.max_facets)
                return true;
            complexes.push_back(c);
            return true;
        });
        report.complexes = complexes.size();
    }
    auto cached = [&](const std::function<bool(const Complex&)>& cb) {
        for (const Complex& c : complexes)
            if (!cb(c)) return;
    };
    auto sweep_one = [&](const std::string& schema, const Formula& inst) {
        SweepEntry& e = report.schemas[schema];
        ++e.instances;
        if (detail::find_countermodel_over(inst, cached, b.max_models)) {
            ++e.failures;
            report.failures.emplace_back(schema, inst);
        }
    };

    std::set<Agent> agents(b.agents.begin(), b.agents.end());
    std::set<Variable> vars;
    for (const Agent& a : b.agents)
        for (const std::string& n : bound_variable_names(std::max(b.vars_per_agent, 1)))
            vars.insert(Variable{n, a});
    std::vector<Formula> bodies = enumerate_formulas(agents, vars, opts.body_size);

    for (const Agent& a : b.agents) {
        int n = 0;
        for (const Formula& f : bodies) {
            if (n >= opts.max_per_schema) break;
            Formula kf = Formula::know(a, f);
            sweep_one("T", Formula::implies(kf, f));
            sweep_one("4", Formula::implies(kf, Formula::know(a, kf)));
            sweep_one("5", Formula::implies(Formula::lnot(kf),
                                            Formula::know(a, Formula::lnot(kf))));
            ++n;
        }
        for (const Variable& v : vars) {
            if (v.owner != a) continue;
            Formula p = Formula::atom(v);
            sweep_one("L", Formula::lor(Formula::know(a, p),
                                        Formula::know(a, Formula::lnot(p))));
        }
    }

    // only Proven matters for the schema filters, so keep the refuter cheap
    DefConsOptions filter = opts.defcons;
    filter.refuter_max_complexes = 1;

    // implication schemas over body pairs; Kdef filtered by its obligation
    for (const Agent& a : b.agents) {
        int n = 0;
        for (const Formula& f : bodies) {
            if (n >= opts.max_per_schema) break;
            for (const Formula& g : bodies) {
                if (n >= opts.max_per_schema) break;
                Formula kimp = Formula::know(a, Formula::implies(f, g));
                sweep_one("KKh",
                          Formula::implies(kimp, Formula::implies(Formula::know(a, f),
                                                                  Formula::khat(a, g))));
                DefConsResult pr =
                    check_defcons({g, Formula::know(a, f)}, f, filter);
                if (pr.status == DefConsStatus::Proven) {
                    sweep_one("Kdef",
                              Formula::implies(kimp,
                                               Formula::implies(Formula::know(a, f),
                                                                Formula::know(a, g))));
                } else {
                    ++report.kdef_excluded;
                }
                ++n;
            }
        }
    }

    // rule N: valid premises (T instances) stay valid under any K
    {
        int n = 0;
        for (const Formula& f : bodies) {
            if (n >= opts.max_per_schema) break;
            for (const Agent& a : b.agents) {
                Formula premise = Formula::implies(Formula::know(a, f), f);
                for (const Agent& outer : b.agents)
                    sweep_one("N", Formula::know(outer, premise));
            }
            ++n;
        }
    }

    // restricted modus ponens: from the valid g -> inst and the valid g,
    // conclude inst when {inst} |> g is Proven; the conclusion is swept
    {
        int n = 0;
        for (const Formula& f : bodies) {
            if (n >= opts.max_per_schema / 4) break;
            for (const Agent& a : b.agents) {
                Formula inst = Formula::implies(Formula::know(a, f), f);
                for (const Agent& o : b.agents) {
                    Formula g = Formula::implies(Formula::know(o, f), f);
                    if (check_defcons({inst}, g, filter).status != DefConsStatus::Proven)
                        continue;
                    sweep_one("MP", inst);
                }
            }
            ++n;
        }
    }

    return report;
}

}  // namespace se
