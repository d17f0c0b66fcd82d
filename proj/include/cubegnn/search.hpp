#pragma once

// A* over the implicit Cayley graph with unit edge costs.
//
// Ordering: f = depth + h ascending; ties broken by larger depth, then by
// discovery order (parent pop order + move enumeration within a parent).
//
// Expensive heuristics are evaluated lazily: a newly discovered non-goal
// node enters the queue with the optimistic key depth + lambda (class >= 1
// would be its value if the classifier said so; the true value is computed
// when the entry first reaches the front, and the entry is re-queued if
// the corrected key is larger). Goal states are always queued with their
// exact value 0, so a delayed pop can only reorder true-f ties at the
// optimal cost, which preserves optimality for any consistent heuristic.
// expanded_nodes counts frontier pops that pass the correction step, i.e.
// nodes that are goal-tested and have their successors generated; each
// state is expanded at most once.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "cubegnn/cube.hpp"
#include "cubegnn/heuristic.hpp"
#include "cubegnn/oracle.hpp"

namespace cubegnn {

struct SearchLimits {
    std::uint64_t node_budget = 1'000'000;  // expansions before giving up

    // Optional known upper bound on the solution length (e.g. the scramble
    // length, whose inverse is a witness solution). Children whose queue
    // key exceeds it are pruned, which caps memory on the last layer and
    // cannot affect optimality as long as the bound is valid.
    double f_bound = std::numeric_limits<double>::infinity();
};

struct SearchResult {
    std::vector<Move> path;
    std::uint64_t expanded_nodes = 0;
    std::uint64_t generated_nodes = 0;
    std::uint64_t heuristic_evals = 0;
    std::uint64_t re_expansions = 0;  // stays 0 with a consistent heuristic
    double wall_time = 0.0;           // seconds, the search loop only
    bool solved = false;
};

namespace detail {

// Open-addressing StateKey -> node-index map; keys live in the node pool.
class NodeIndexMap {
public:
    explicit NodeIndexMap(std::size_t initial_pow2 = 16)
        : mask_((std::size_t(1) << initial_pow2) - 1),
          slots_(std::size_t(1) << initial_pow2, kEmpty) {}

    template <typename KeyOf>
    std::uint32_t* find_or_slot(const StateKey& k, KeyOf&& key_of) {
        std::size_t i = StateKeyHash{}(k) & mask_;
        while (true) {
            std::uint32_t& s = slots_[i];
            if (s == kEmpty || key_of(s) == k) return &s;
            i = (i + 1) & mask_;
        }
    }

    template <typename KeyOf>
    void grow_if_needed(std::size_t size, KeyOf&& key_of) {
        if (size * 5 < slots_.size() * 3) return;
        std::vector<std::uint32_t> old = std::move(slots_);
        mask_ = mask_ * 2 + 1;
        slots_.assign(mask_ + 1, kEmpty);
        for (std::uint32_t idx : old) {
            if (idx == kEmpty) continue;
            std::size_t i = StateKeyHash{}(key_of(idx)) & mask_;
            while (slots_[i] != kEmpty) i = (i + 1) & mask_;
            slots_[i] = idx;
        }
    }

    static constexpr std::uint32_t kEmpty = 0xffffffffu;

private:
    std::size_t mask_;
    std::vector<std::uint32_t> slots_;
};

}  // namespace detail

inline SearchResult astar(const CubeState& start, const Heuristic& h,
                          const SearchLimits& limits = {}) {
    const auto t0 = std::chrono::steady_clock::now();

    struct Node {
        StateKey key;
        std::uint32_t parent;
        std::uint8_t move;
        std::uint8_t depth;
        std::uint8_t hlabel;  // 0xff = not yet evaluated
        std::uint8_t closed;
    };
    struct Entry {
        double f;
        std::uint32_t seq;
        std::uint32_t node;
        std::uint8_t depth;
        std::uint8_t evaluated;
    };
    struct EntryOrder {
        // std::priority_queue pops the largest, so invert: best = smallest f,
        // then largest depth, then smallest seq
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.f != b.f) return a.f > b.f;
            if (a.depth != b.depth) return a.depth < b.depth;
            return a.seq > b.seq;
        }
    };

    const CubeState goal = solved_state();
    const double lambda = h.lambda();
    const bool lazy = h.prefers_lazy();

    std::vector<Node> pool;
    pool.reserve(1 << 16);
    detail::NodeIndexMap index;
    auto key_of = [&pool](std::uint32_t i) -> const StateKey& { return pool[i].key; };
    std::priority_queue<Entry, std::vector<Entry>, EntryOrder> open;

    SearchResult res;
    std::uint32_t seq = 0;

    {
        Node n{encode_state(start), detail::NodeIndexMap::kEmpty, 0, 0, 0xff, 0};
        const int y = start == goal ? 0 : h.label_of(start);
        ++res.heuristic_evals;
        n.hlabel = static_cast<std::uint8_t>(y);
        *index.find_or_slot(n.key, key_of) = 0;
        pool.push_back(n);
        open.push(Entry{start == goal ? 0.0 : lambda * y, seq++, 0, 0, 1});
        res.generated_nodes = 1;
    }

    while (!open.empty()) {
        Entry e = open.top();
        open.pop();
        Node& node = pool[e.node];
        if (node.closed || node.depth != e.depth) continue;  // stale

        const CubeState state = detail::unpack_state(node.key);
        if (!e.evaluated) {
            // first time at the front: compute the real value
            int y = node.hlabel;
            if (node.hlabel == 0xff) {
                y = h.label_of(state);
                ++res.heuristic_evals;
                node.hlabel = static_cast<std::uint8_t>(y);
            }
            const double f = node.depth + lambda * y;
            if (f > e.f) {
                if (f <= limits.f_bound) open.push(Entry{f, e.seq, e.node, e.depth, 1});
                continue;
            }
        }

        node.closed = 1;
        ++res.expanded_nodes;

        if (state == goal) {
            res.path.reserve(node.depth);
            for (const Node* cur = &node; cur->parent != detail::NodeIndexMap::kEmpty;
                 cur = &pool[cur->parent])
                res.path.push_back(Move(cur->move));
            std::reverse(res.path.begin(), res.path.end());
            res.solved = true;
            break;
        }
        if (res.expanded_nodes >= limits.node_budget) break;  // resource cap, not failure proof

        const std::uint32_t parent_idx = e.node;
        const std::uint8_t child_depth = static_cast<std::uint8_t>(node.depth + 1);
        index.grow_if_needed(pool.size() + kNumMoves, key_of);
        for (Move m : all_moves()) {
            const CubeState child = apply_move(state, m);
            const StateKey ck = encode_state(child);
            std::uint32_t* slot = index.find_or_slot(ck, key_of);
            if (*slot == detail::NodeIndexMap::kEmpty) {
                Node c{ck, parent_idx, static_cast<std::uint8_t>(m.index()), child_depth,
                       0xff, 0};
                double f;
                std::uint8_t evaluated;
                if (child == goal) {
                    c.hlabel = 0;
                    f = child_depth;
                    evaluated = 1;
                } else if (lazy) {
                    f = child_depth + lambda;  // optimistic; corrected on pop
                    evaluated = 0;
                } else {
                    const int y = h.label_of(child);
                    ++res.heuristic_evals;
                    c.hlabel = static_cast<std::uint8_t>(y);
                    f = child_depth + lambda * y;
                    evaluated = 1;
                }
                if (f > limits.f_bound) continue;
                const std::uint32_t idx = static_cast<std::uint32_t>(pool.size());
                *slot = idx;
                pool.push_back(c);
                // pool may have been reallocated; `node` is no longer used
                open.push(Entry{f, seq++, idx, child_depth, evaluated});
                ++res.generated_nodes;
            } else {
                Node& existing = pool[*slot];
                if (child_depth < existing.depth && !existing.closed) {
                    existing.depth = child_depth;
                    existing.parent = parent_idx;
                    existing.move = static_cast<std::uint8_t>(m.index());
                    double f;
                    std::uint8_t evaluated;
                    if (existing.hlabel != 0xff) {
                        f = child_depth + (child == goal ? 0.0 : lambda * existing.hlabel);
                        evaluated = 1;
                    } else {
                        f = child_depth + lambda;
                        evaluated = 0;
                    }
                    open.push(Entry{f, seq++, *slot, child_depth, evaluated});
                } else if (child_depth < existing.depth && existing.closed) {
                    ++res.re_expansions;  // cannot happen with a consistent heuristic
                }
            }
        }
    }

    res.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// Uniform-cost search; equivalent to astar with h == 0.
inline SearchResult zero_heuristic_search(const CubeState& start,
                                          const SearchLimits& limits = {}) {
    return astar(start, ZeroHeuristic(), limits);
}

}  // namespace cubegnn
