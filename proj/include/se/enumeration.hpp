#pragma once

// Bounded enumeration of chromatic simplicial complexes.
//
// For a fixed agent list and a per-agent vertex budget, every complex is
// produced exactly once: vertex counts are swept lexicographically, and for
// each count tuple the facet families are exactly the inclusion antichains
// of chromatic faces that cover every vertex.  Antichains are generated
// layer by layer from the top dimension down; a face of dimension >= 1 may
// be chosen only when no chosen larger face contains it, and uncovered
// vertices become singleton facets at the end, which makes the generation
// bijective with covering antichains.

#include "se/complex.hpp"

#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace se {

struct EnumLimits {
    int max_vertices_per_agent = 2;
    std::size_t max_complexes = 0;  // 0 = unbounded
    bool dedup_isomorphic = false;  // keep only canonical representatives
};

struct EnumStats {
    std::size_t complexes = 0;  // number of complexes delivered
    bool truncated = false;     // stopped by max_complexes
    bool stopped = false;       // callback asked to stop
};

namespace detail {

// A chromatic face as sorted (agent index, vertex ordinal) pairs.
using EFace = std::vector<std::pair<int, int>>;

inline bool eface_contains(const EFace& big, const EFace& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline std::string enum_vertex_name(const Agent& a, int ordinal) {
    return a + "_" + std::to_string(ordinal);
}

// Lexicomin of the facet family encoding over per-agent vertex permutations.
inline bool is_canonical_family(const std::vector<EFace>& facets, const std::vector<int>& counts) {
    std::vector<std::vector<int>> perms(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) {
        perms[i].resize(static_cast<size_t>(counts[i]));
        std::iota(perms[i].begin(), perms[i].end(), 0);
    }
    auto encode = [&](std::vector<EFace>& out) {
        out.clear();
        out.reserve(facets.size());
        for (const EFace& f : facets) {
            EFace g;
            g.reserve(f.size());
            for (auto [ai, k] : f)
                g.emplace_back(ai, perms[static_cast<size_t>(ai)][static_cast<size_t>(k)]);
            std::sort(g.begin(), g.end());
            out.push_back(std::move(g));
        }
        std::sort(out.begin(), out.end());
    };
    std::vector<EFace> identity, candidate;
    encode(identity);
    // Walk the permutation product; reject as soon as a smaller encoding appears.
    std::function<bool(size_t)> walk = [&](size_t level) -> bool {
        if (level == perms.size()) {
            encode(candidate);
            return candidate >= identity;
        }
        auto& p = perms[level];
        std::sort(p.begin(), p.end());
        do {
            if (!walk(level + 1)) {
                std::iota(p.begin(), p.end(), 0);
                return false;
            }
        } while (std::next_permutation(p.begin(), p.end()));
        std::iota(p.begin(), p.end(), 0);
        return true;
    };
    return walk(0);
}

}  // namespace detail

// Enumerates complexes over `agents` (sorted ascending is recommended; order
// is preserved) with up to lim.max_vertices_per_agent vertices per agent.
// The callback returns false to stop early.  Vertices carry empty valuations.
inline EnumStats enumerate_complexes(const std::vector<Agent>& agents, const EnumLimits& lim,
                                     const std::function<bool(const Complex&)>& fn) {
    EnumStats stats;
    if (agents.empty()) return stats;
    const int n = static_cast<int>(agents.size());
    const int maxv = lim.max_vertices_per_agent;

    std::vector<int> counts(static_cast<size_t>(n), 0);
    std::vector<detail::EFace> chosen;

    auto deliver = [&](const std::vector<detail::EFace>& facets) -> bool {
        if (lim.dedup_isomorphic && !detail::is_canonical_family(facets, counts)) return true;
        if (lim.max_complexes && stats.complexes >= lim.max_complexes) {
            stats.truncated = true;
            return false;
        }
        ComplexBuilder b;
        b.agents(agents);
        for (int ai = 0; ai < n; ++ai)
            for (int k = 0; k < counts[static_cast<size_t>(ai)]; ++k)
                b.vertex(detail::enum_vertex_name(agents[static_cast<size_t>(ai)], k),
                         agents[static_cast<size_t>(ai)]);
        for (const detail::EFace& f : facets) {
            std::vector<std::string> names;
            names.reserve(f.size());
            for (auto [ai, k] : f)
                names.push_back(detail::enum_vertex_name(agents[static_cast<size_t>(ai)], k));
            b.facet(names);
        }
        ++stats.complexes;
        if (!fn(b.build())) {
            stats.stopped = true;
            return false;
        }
        return true;
    };

    // All chromatic faces of a given size over the current counts, in
    // ascending (agent set, ordinals) order.
    auto faces_of_size = [&](int s) {
        std::vector<detail::EFace> out;
        std::vector<int> agset;
        std::function<void(int)> pick_agents = [&](int from) {
            if (static_cast<int>(agset.size()) == s) {
                detail::EFace face(agset.size());
                std::function<void(size_t)> pick_verts = [&](size_t i) {
                    if (i == agset.size()) {
                        out.push_back(face);
                        return;
                    }
                    int ai = agset[i];
                    for (int k = 0; k < counts[static_cast<size_t>(ai)]; ++k) {
                        face[i] = {ai, k};
                        pick_verts(i + 1);
                    }
                };
                pick_verts(0);
                return;
            }
            for (int ai = from; ai < n; ++ai) {
                if (counts[static_cast<size_t>(ai)] == 0) continue;
                agset.push_back(ai);
                pick_agents(ai + 1);
                agset.pop_back();
            }
        };
        pick_agents(0);
        return out;
    };

    // Recurse over layers from `size` down to 2; singletons are forced.
    std::function<bool(int)> layers = [&](int size) -> bool {
        if (size < 2) {
            std::vector<detail::EFace> facets(chosen);
            for (int ai = 0; ai < n; ++ai)
                for (int k = 0; k < counts[static_cast<size_t>(ai)]; ++k) {
                    detail::EFace single{{ai, k}};
                    bool covered = false;
                    for (const auto& f : chosen)
                        if (detail::eface_contains(f, single)) {
                            covered = true;
                            break;
                        }
                    if (!covered) facets.push_back(single);
                }
            std::sort(facets.begin(), facets.end());
            return deliver(facets);
        }
        std::vector<detail::EFace> cands;
        for (detail::EFace& f : faces_of_size(size)) {
            bool inside = false;
            for (const auto& g : chosen)
                if (detail::eface_contains(g, f)) {
                    inside = true;
                    break;
                }
            if (!inside) cands.push_back(std::move(f));
        }
        if (cands.size() > 24)  // 2^24 subsets is already far beyond practical budgets
            throw ModelError("enumerate_complexes: layer too wide; tighten the bounds");
        const std::uint32_t subsets = 1u << cands.size();
        for (std::uint32_t m = 0; m < subsets; ++m) {
            size_t before = chosen.size();
            for (size_t i = 0; i < cands.size(); ++i)
                if (m & (1u << i)) chosen.push_back(cands[i]);
            bool go = layers(size - 1);
            chosen.resize(before);
            if (!go) return false;
        }
        return true;
    };

    // Count tuples in ascending lexicographic order, skipping the all-zero one.
    std::function<bool(int)> tuples = [&](int ai) -> bool {
        if (ai == n) {
            bool any = false;
            for (int c : counts) any = any || c > 0;
            if (!any) return true;
            int top = 0;
            for (int c : counts) top += c > 0 ? 1 : 0;
            return layers(top);
        }
        for (int c = 0; c <= maxv; ++c) {
            counts[static_cast<size_t>(ai)] = c;
            if (!tuples(ai + 1)) return false;
        }
        counts[static_cast<size_t>(ai)] = 0;
        return true;
    };
    tuples(0);
    return stats;
}

}  // namespace se
