#pragma once

// Exact relative-distance oracle: breadth-first search from the solved
// state up to a depth cap. Ground truth for labels, optimality checks and
// level-structure statistics. The full graph (~4.3e19 states) is far out
// of reach; depth 7 (~9.2M states) is the supported maximum.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubegnn/cube.hpp"

namespace cubegnn {

inline constexpr int kMaxOracleDepth = 7;

class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DistanceTable {
    int depth_cap = 0;
    std::vector<std::vector<StateKey>> layers;  // layers[d] sorted ascending

    std::optional<int> lookup(const StateKey& k) const {
        for (int d = 0; d <= depth_cap; ++d) {
            if (std::binary_search(layers[d].begin(), layers[d].end(), k))
                return d;
        }
        return std::nullopt;
    }
    std::optional<int> lookup(const CubeState& g) const { return lookup(encode_state(g)); }

    std::uint64_t size() const {
        std::uint64_t n = 0;
        for (const auto& l : layers) n += l.size();
        return n;
    }

    std::vector<std::uint64_t> layer_counts() const {
        std::vector<std::uint64_t> c;
        c.reserve(layers.size());
        for (const auto& l : layers) c.push_back(l.size());
        return c;
    }
};

namespace detail {

inline CubeState unpack_state(const StateKey& k) {
    CubeState g;
    for (int i = 0; i < 21; ++i) g.facelets[i] = (k.w0 >> (3 * i)) & 7;
    for (int i = 21; i < 42; ++i) g.facelets[i] = (k.w1 >> (3 * (i - 21))) & 7;
    for (int i = 42; i < 54; ++i) g.facelets[i] = (k.w2 >> (3 * (i - 42))) & 7;
    return g;
}

}  // namespace detail

// Exact distances for every state with d0 <= depth_cap. Layered frontier
// expansion; on this bipartite-or-not graph candidates can only fall in
// layers d-2..d, so dedup needs just the two preceding layers.
inline DistanceTable bfs_distances(int depth_cap) {
    if (depth_cap < 0) throw std::invalid_argument("depth_cap must be >= 0");
    if (depth_cap > kMaxOracleDepth)
        throw ResourceLimitError("BFS depth cap " + std::to_string(depth_cap) +
                                 " exceeds the supported maximum of 7 (~10^7 states)");
    DistanceTable t;
    t.depth_cap = depth_cap;
    t.layers.resize(depth_cap + 1);
    t.layers[0] = {encode_state(solved_state())};

    std::vector<StateKey> cand;
    for (int d = 1; d <= depth_cap; ++d) {
        const std::vector<StateKey>& prev = t.layers[d - 1];
        cand.clear();
        cand.reserve(prev.size() * kNumMoves);
        for (const StateKey& k : prev) {
            const CubeState g = detail::unpack_state(k);
            for (Move m : all_moves()) cand.push_back(encode_state(apply_move(g, m)));
        }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

        std::vector<StateKey>& out = t.layers[d];
        out.reserve(cand.size());
        auto skip = [](const std::vector<StateKey>& sorted, const StateKey& k) {
            return std::binary_search(sorted.begin(), sorted.end(), k);
        };
        const std::vector<StateKey>& prev2 = t.layers[d >= 2 ? d - 2 : 0];
        for (const StateKey& k : cand) {
            if (skip(prev, k)) continue;
            if (d >= 2 && skip(prev2, k)) continue;
            out.push_back(k);
        }
        out.shrink_to_fit();
    }
    return t;
}

// Number of the 12 edges of g that decrease the distance. Requires g and
// all its neighbors to be inside the table cap.
inline int count_decreasing_edges(const DistanceTable& t, const CubeState& g) {
    auto d0 = t.lookup(g);
    if (!d0)
        throw std::invalid_argument(
            "count_decreasing_edges: state is outside the oracle depth cap");
    int k = 0;
    for (Move m : all_moves()) {
        auto dn = t.lookup(apply_move(g, m));
        if (!dn)
            throw std::invalid_argument(
                "count_decreasing_edges: a neighbor falls outside the depth cap " +
                std::to_string(t.depth_cap) + "; build a deeper table");
        if (*dn == *d0 - 1) ++k;
    }
    return k;
}

// "depth count" lines, one per layer.
inline void dump_layer_counts(const DistanceTable& t, std::ostream& out) {
    for (int d = 0; d <= t.depth_cap; ++d)
        out << d << ' ' << t.layers[d].size() << '\n';
}

}  // namespace cubegnn
