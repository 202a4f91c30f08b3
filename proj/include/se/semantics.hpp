#pragma once

// Three-valued evaluation over chromatic simplicial models.
//
// A formula may be undefined at a face; False always means "defined and not
// true".  An atom is defined where its owner is alive; negation and
// conjunction are transparent; K_a f is defined at X when some face sharing
// X's a-vertex defines f, and true when f is moreover true at every such
// face where it is defined.

#include "se/complex.hpp"
#include "se/formula.hpp"

#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace se {

enum class TruthValue3 : std::uint8_t { True, False, Undefined };

inline char truth_char(TruthValue3 v) {
    switch (v) {
        case TruthValue3::True: return 'T';
        case TruthValue3::False: return 'F';
        default: return 'U';
    }
}

class Evaluator {
public:
    explicit Evaluator(const Complex& m) : m_(m) {}

    const Complex& model() const { return m_; }

    bool is_defined(const Formula& f, FaceId x) { return eval(f, x) != TruthValue3::Undefined; }

    TruthValue3 eval(const Formula& f, FaceId x) {
        check_face(x);
        // The know memo is keyed by node address, so every formula evaluated
        // here must stay alive as long as the memo does: pin the root.
        if (pinned_ids_.insert(f.id()).second) pinned_.push_back(f);
        return eval_rec(f, x);
    }

private:
    TruthValue3 eval_rec(const Formula& f, FaceId x) {
        switch (f.kind()) {
            case Kind::Atom: {
                int ai = m_.agent_index(f.var().owner);
                if (ai < 0) return TruthValue3::Undefined;
                VertexId v = m_.agent_vertex(x, ai);
                if (v < 0) return TruthValue3::Undefined;
                return m_.var_true_at(v, f.var().name) ? TruthValue3::True : TruthValue3::False;
            }
            case Kind::Not: {
                TruthValue3 c = eval_rec(f.child(), x);
                if (c == TruthValue3::Undefined) return c;
                return c == TruthValue3::True ? TruthValue3::False : TruthValue3::True;
            }
            case Kind::And: {
                TruthValue3 l = eval_rec(f.left(), x);
                if (l == TruthValue3::Undefined) return l;
                TruthValue3 r = eval_rec(f.right(), x);
                if (r == TruthValue3::Undefined) return r;
                return (l == TruthValue3::True && r == TruthValue3::True) ? TruthValue3::True
                                                                          : TruthValue3::False;
            }
            case Kind::Know: {
                int ai = m_.agent_index(f.agent());
                if (ai < 0) return TruthValue3::Undefined;
                VertexId v = m_.agent_vertex(x, ai);
                if (v < 0) return TruthValue3::Undefined;
                // Value depends only on the a-vertex shared by the adjacency class.
                auto& slot = know_memo_[f.id()];
                if (slot.empty()) slot.assign(m_.vertices().size(), 0);
                if (int8_t cached = slot[static_cast<size_t>(v)]; cached != 0)
                    return static_cast<TruthValue3>(cached - 1);
                bool defined = false, all_true = true;
                for (FaceId y : m_.faces_with_vertex(v)) {
                    TruthValue3 c = eval_rec(f.child(), y);
                    if (c == TruthValue3::Undefined) continue;
                    defined = true;
                    if (c != TruthValue3::True) { all_true = false; }
                }
                TruthValue3 r = !defined ? TruthValue3::Undefined
                                         : (all_true ? TruthValue3::True : TruthValue3::False);
                slot[static_cast<size_t>(v)] = static_cast<int8_t>(static_cast<int>(r) + 1);
                return r;
            }
        }
        return TruthValue3::Undefined;
    }

    void check_face(FaceId x) const {
        if (x < 0 || x >= m_.face_count()) throw ModelError("face id out of range");
    }

    const Complex& m_;
    std::unordered_map<const void*, std::vector<int8_t>> know_memo_;
    std::unordered_set<const void*> pinned_ids_;
    std::vector<Formula> pinned_;
};

inline TruthValue3 eval3(const Complex& m, FaceId x, const Formula& f) {
    Evaluator e(m);
    return e.eval(f, x);
}

inline bool is_defined(const Complex& m, FaceId x, const Formula& f) {
    return eval3(m, x, f) != TruthValue3::Undefined;
}

struct TruthPartition {
    std::vector<FaceId> true_faces, false_faces, undefined_faces;
};

inline TruthPartition truth_partition(const Complex& m, const Formula& f) {
    TruthPartition p;
    Evaluator e(m);
    for (FaceId x = 0; x < m.face_count(); ++x) {
        switch (e.eval(f, x)) {
            case TruthValue3::True: p.true_faces.push_back(x); break;
            case TruthValue3::False: p.false_faces.push_back(x); break;
            default: p.undefined_faces.push_back(x); break;
        }
    }
    return p;
}

// Validity on a model asks that the formula is never False: true wherever
// defined.  model_valid scans every face; facet_valid scans facets only.
// The two verdicts agree (truth and definedness propagate between a face
// and the facets above it), a fact the test suite checks by sweep.
inline std::optional<FaceId> falsifying_face(const Complex& m, const Formula& f) {
    Evaluator e(m);
    for (FaceId x = 0; x < m.face_count(); ++x)
        if (e.eval(f, x) == TruthValue3::False) return x;
    return std::nullopt;
}

inline std::optional<FaceId> falsifying_facet(const Complex& m, const Formula& f) {
    Evaluator e(m);
    for (FaceId x : m.facets())
        if (e.eval(f, x) == TruthValue3::False) return x;
    return std::nullopt;
}

inline bool model_valid(const Complex& m, const Formula& f) {
    return !falsifying_face(m, f).has_value();
}

inline bool facet_valid(const Complex& m, const Formula& f) {
    return !falsifying_facet(m, f).has_value();
}

}  // namespace se
