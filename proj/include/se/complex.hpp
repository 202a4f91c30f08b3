#pragma once

// Chromatic simplicial complexes with vertex valuations.
//
// A model is a set of vertices, each carrying an agent colour and a set of
// variable names considered true there, together with a family of facets.
// Faces are all nonempty subsets of facets; a facet family must be an
// antichain under inclusion and no face may contain two vertices of the
// same colour.

#include "se/formula.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace se {

using VertexId = int;
using FaceId = int;

struct Vertex {
    std::string name;
    Agent agent;
    std::set<std::string> vars;  // names without the owner suffix
};

class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Immutable once built; construct through ComplexBuilder or parse_model.
class Complex {
public:
    const std::vector<Agent>& agents() const { return agents_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }

    int agent_index(const Agent& a) const {
        auto it = std::lower_bound(agents_.begin(), agents_.end(), a);
        if (it == agents_.end() || *it != a) return -1;
        return static_cast<int>(it - agents_.begin());
    }

    VertexId vertex_id(const std::string& name) const {
        auto it = vertex_index_.find(name);
        return it == vertex_index_.end() ? -1 : it->second;
    }

    // Faces are sorted vertex-id vectors, ordered by (size, lexicographic).
    int face_count() const { return static_cast<int>(faces_.size()); }
    const std::vector<VertexId>& face(FaceId f) const { return faces_.at(static_cast<size_t>(f)); }
    const std::vector<FaceId>& facets() const { return facets_; }
    bool is_facet(FaceId f) const { return facet_flag_.at(static_cast<size_t>(f)); }

    // Vertex of colour `agent_idx` in face f, or -1 when the agent is dead there.
    VertexId agent_vertex(FaceId f, int agent_idx) const {
        return agent_vertex_.at(static_cast<size_t>(f)).at(static_cast<size_t>(agent_idx));
    }

    bool alive(FaceId f, const Agent& a) const {
        int ai = agent_index(a);
        return ai >= 0 && agent_vertex(f, ai) >= 0;
    }

    // Faces containing a given vertex, ascending.
    const std::vector<FaceId>& faces_with_vertex(VertexId v) const {
        return vertex_faces_.at(static_cast<size_t>(v));
    }

    // X and Y are a-adjacent when they share an a-coloured vertex.  K_a at X
    // therefore only depends on X's a-vertex; the adjacency class of X under
    // a is exactly faces_with_vertex(agent_vertex(X, a)).
    bool a_adjacent(FaceId x, FaceId y, const Agent& a) const {
        int ai = agent_index(a);
        if (ai < 0) return false;
        VertexId v = agent_vertex(x, ai);
        return v >= 0 && v == agent_vertex(y, ai);
    }

    bool var_true_at(VertexId v, const std::string& var) const {
        const auto& vs = vertices_.at(static_cast<size_t>(v)).vars;
        return vs.count(var) > 0;
    }

    FaceId find_face(const std::vector<VertexId>& verts) const {
        std::vector<VertexId> key(verts);
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        auto it = face_index_.find(key);
        return it == face_index_.end() ? -1 : it->second;
    }

    std::string face_name(FaceId f) const {
        std::ostringstream os;
        os << '{';
        const auto& vs = face(f);
        for (size_t i = 0; i < vs.size(); ++i) {
            if (i) os << ',';
            os << vertices_[static_cast<size_t>(vs[i])].name;
        }
        os << '}';
        return os.str();
    }

    bool pure() const {
        size_t top = faces_.at(static_cast<size_t>(facets_.front())).size();
        for (FaceId f : facets_)
            if (face(f).size() != top) return false;
        return top == agents_.size();
    }

    // Largest facet cardinality minus one.
    int dimension() const {
        size_t d = 0;
        for (FaceId f : facets_) d = std::max(d, face(f).size());
        return static_cast<int>(d) - 1;
    }

    const std::map<std::string, FaceId>& landmarks() const { return landmarks_; }

    void set_landmark(const std::string& label, FaceId f) {
        if (f < 0 || f >= face_count()) throw ModelError("landmark face out of range: " + label);
        landmarks_[label] = f;
    }

    FaceId landmark(const std::string& label) const {
        auto it = landmarks_.find(label);
        if (it == landmarks_.end()) throw ModelError("unknown landmark: @" + label);
        return it->second;
    }

    // Copy with replaced vertex valuations (vertex order preserved).
    Complex with_valuation(const std::vector<std::set<std::string>>& vars_per_vertex) const {
        if (vars_per_vertex.size() != vertices_.size())
            throw ModelError("valuation vector size mismatch");
        Complex c(*this);
        for (size_t i = 0; i < vertices_.size(); ++i) c.vertices_[i].vars = vars_per_vertex[i];
        return c;
    }

private:
    friend class ComplexBuilder;
    Complex() = default;

    std::vector<Agent> agents_;  // sorted
    std::vector<Vertex> vertices_;
    std::map<std::string, VertexId> vertex_index_;
    std::vector<std::vector<VertexId>> faces_;
    std::map<std::vector<VertexId>, FaceId> face_index_;
    std::vector<FaceId> facets_;
    std::vector<bool> facet_flag_;
    std::vector<std::vector<VertexId>> agent_vertex_;  // [face][agent idx]
    std::vector<std::vector<FaceId>> vertex_faces_;
    std::map<std::string, FaceId> landmarks_;
};

class ComplexBuilder {
public:
    ComplexBuilder& agents(const std::vector<Agent>& as) {
        for (const auto& a : as) declare_agent(a);
        return *this;
    }

    ComplexBuilder& vertex(const std::string& name, const Agent& agent,
                           const std::set<std::string>& vars = {}) {
        if (name_to_id_.count(name)) throw ModelError("duplicate vertex name: " + name);
        if (!agent_set_.count(agent))
            throw ModelError("vertex " + name + " uses undeclared agent: " + agent);
        name_to_id_[name] = static_cast<VertexId>(verts_.size());
        verts_.push_back(Vertex{name, agent, vars});
        return *this;
    }

    ComplexBuilder& facet(const std::vector<std::string>& vertex_names) {
        if (vertex_names.empty()) throw ModelError("empty facet");
        std::vector<VertexId> ids;
        for (const auto& n : vertex_names) {
            auto it = name_to_id_.find(n);
            if (it == name_to_id_.end()) throw ModelError("facet uses undeclared vertex: " + n);
            ids.push_back(it->second);
        }
        std::sort(ids.begin(), ids.end());
        if (std::unique(ids.begin(), ids.end()) != ids.end())
            throw ModelError("facet repeats a vertex");
        std::set<Agent> colours;
        for (VertexId v : ids) {
            const Agent& a = verts_[static_cast<size_t>(v)].agent;
            if (!colours.insert(a).second)
                throw ModelError("facet has two vertices of colour " + a);
        }
        decl_facets_.push_back(std::move(ids));
        return *this;
    }

    // Warnings (non-maximal or duplicate declared facets) are appended when a
    // sink is supplied; both conditions are repaired rather than fatal.
    Complex build(std::vector<std::string>* warnings = nullptr) const {
        if (verts_.empty()) throw ModelError("model has no vertices");
        if (decl_facets_.empty()) throw ModelError("model has no facets");

        std::vector<bool> used(verts_.size(), false);
        for (const auto& f : decl_facets_)
            for (VertexId v : f) used[static_cast<size_t>(v)] = true;
        for (size_t i = 0; i < verts_.size(); ++i)
            if (!used[i]) throw ModelError("vertex not in any facet: " + verts_[i].name);

        // Drop duplicates and faces contained in other declared facets.
        std::vector<std::vector<VertexId>> maximal;
        for (size_t i = 0; i < decl_facets_.size(); ++i) {
            const auto& f = decl_facets_[i];
            bool keep = true;
            for (size_t j = 0; j < decl_facets_.size(); ++j) {
                if (i == j) continue;
                const auto& g = decl_facets_[j];
                bool sub = std::includes(g.begin(), g.end(), f.begin(), f.end());
                if (sub && f.size() < g.size()) {
                    warn(warnings, "declared facet is not maximal, demoted to face");
                    keep = false;
                    break;
                }
                if (sub && f == g && j < i) {
                    warn(warnings, "duplicate facet ignored");
                    keep = false;
                    break;
                }
            }
            if (keep) maximal.push_back(f);
        }

        Complex c;
        c.agents_.assign(agent_set_.begin(), agent_set_.end());
        c.vertices_ = verts_;
        c.vertex_index_ = name_to_id_;

        // All nonempty subsets of each facet, deduplicated.
        std::set<std::vector<VertexId>> face_set;
        for (const auto& f : maximal) {
            size_t n = f.size();
            for (std::uint32_t m = 1; m < (1u << n); ++m) {
                std::vector<VertexId> sub;
                for (size_t b = 0; b < n; ++b)
                    if (m & (1u << b)) sub.push_back(f[b]);
                face_set.insert(std::move(sub));
            }
        }
        c.faces_.assign(face_set.begin(), face_set.end());
        std::stable_sort(c.faces_.begin(), c.faces_.end(),
                         [](const std::vector<VertexId>& x, const std::vector<VertexId>& y) {
                             if (x.size() != y.size()) return x.size() < y.size();
                             return x < y;
                         });
        for (FaceId i = 0; i < static_cast<FaceId>(c.faces_.size()); ++i)
            c.face_index_[c.faces_[static_cast<size_t>(i)]] = i;

        std::set<std::vector<VertexId>> maximal_set(maximal.begin(), maximal.end());
        c.facet_flag_.assign(c.faces_.size(), false);
        for (FaceId i = 0; i < static_cast<FaceId>(c.faces_.size()); ++i) {
            if (maximal_set.count(c.faces_[static_cast<size_t>(i)])) {
                c.facet_flag_[static_cast<size_t>(i)] = true;
                c.facets_.push_back(i);
            }
        }

        c.agent_vertex_.assign(c.faces_.size(), std::vector<VertexId>(c.agents_.size(), -1));
        for (size_t fi = 0; fi < c.faces_.size(); ++fi)
            for (VertexId v : c.faces_[fi]) {
                int ai = c.agent_index(c.vertices_[static_cast<size_t>(v)].agent);
                c.agent_vertex_[fi][static_cast<size_t>(ai)] = v;
            }

        c.vertex_faces_.assign(verts_.size(), {});
        for (FaceId i = 0; i < static_cast<FaceId>(c.faces_.size()); ++i)
            for (VertexId v : c.faces_[static_cast<size_t>(i)])
                c.vertex_faces_[static_cast<size_t>(v)].push_back(i);

        return c;
    }

private:
    void declare_agent(const Agent& a) {
        if (a.empty()) throw ModelError("empty agent name");
        if (!agent_set_.insert(a).second) throw ModelError("duplicate agent: " + a);
    }

    static void warn(std::vector<std::string>* sink, const std::string& msg) {
        if (sink) sink->push_back(msg);
    }

    std::set<Agent> agent_set_;
    std::vector<Vertex> verts_;
    std::map<std::string, VertexId> name_to_id_;
    std::vector<std::vector<VertexId>> decl_facets_;
};

// Line-oriented model text:
//   agents a b c
//   vertex v_a0 a { p q }
//   vertex v_b0 b {}
//   facet v_a0 v_b0
// '#' starts a comment; blank lines are skipped; the agents line comes first.
inline Complex parse_model(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    ComplexBuilder b;
    std::istringstream in(text);
    std::string line;
    bool agents_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        auto fail = [&](const std::string& msg) {
            throw ModelError("line " + std::to_string(lineno) + ": " + msg);
        };
        if (head == "agents") {
            if (agents_seen) fail("repeated agents line");
            std::vector<Agent> as;
            for (std::string a; ls >> a;) as.push_back(a);
            if (as.empty()) fail("agents line lists no agents");
            b.agents(as);
            agents_seen = true;
        } else if (head == "vertex") {
            if (!agents_seen) fail("vertex before agents line");
            std::string name, agent, tok;
            if (!(ls >> name >> agent)) fail("vertex needs a name and an agent");
            std::set<std::string> vars;
            if (ls >> tok) {
                if (tok != "{") fail("expected '{' after vertex agent");
                bool closed = false;
                while (ls >> tok) {
                    if (tok == "}") { closed = true; break; }
                    vars.insert(tok);
                }
                if (!closed) fail("missing '}' in vertex line");
            }
            b.vertex(name, agent, vars);
        } else if (head == "facet") {
            if (!agents_seen) fail("facet before agents line");
            std::vector<std::string> names;
            for (std::string n; ls >> n;) names.push_back(n);
            b.facet(names);
        } else {
            fail("unknown directive: " + head);
        }
    }
    if (!agents_seen) throw ModelError("model text has no agents line");
    return b.build(warnings);
}

inline std::string write_model(const Complex& c) {
    std::ostringstream os;
    os << "agents";
    for (const auto& a : c.agents()) os << ' ' << a;
    os << '\n';
    for (const auto& v : c.vertices()) {
        os << "vertex " << v.name << ' ' << v.agent << " {";
        for (const auto& p : v.vars) os << ' ' << p;
        os << " }" << '\n';
    }
    for (FaceId f : c.facets()) {
        os << "facet";
        for (VertexId v : c.face(f)) os << ' ' << c.vertices()[static_cast<size_t>(v)].name;
        os << '\n';
    }
    return os.str();
}

}  // namespace se
