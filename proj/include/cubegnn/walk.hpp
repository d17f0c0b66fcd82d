#pragma once

// Random-walk training-set sampler: runs K uniform walks of length l from
// the solved state and assembles the induced subgraph with walk-depth
// labels. Labels are the minimum step index at which any walk reached a
// state, which makes them upper bounds on the true distance.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cubegnn/cube.hpp"
#include "cubegnn/detail/rng.hpp"

namespace cubegnn {

struct WalkConfig {
    std::uint32_t num_walks = 1;
    int walk_length = 7;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (num_walks < 1) throw std::invalid_argument("num_walks must be >= 1");
        if (walk_length < 1 || walk_length > kDiameter)
            throw std::invalid_argument("walk_length must be in [1, 26]");
    }
};

struct GraphEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    Move move;  // b = move applied to a

    friend bool operator==(const GraphEdge& x, const GraphEdge& y) {
        return x.a == y.a && x.b == y.b && x.move == y.move;
    }
};

// Sampled subgraph: node 0 is the solved state (label 0); the remaining
// nodes are sorted by (label, key) so the layout is independent of walk
// execution order. Edges are the full induced edge set.
struct TrainGraph {
    std::vector<CubeState> states;
    std::vector<std::uint8_t> labels;
    std::vector<GraphEdge> edges;

    std::size_t size() const { return states.size(); }

    const CubeState& state(std::size_t i) const { return states[i]; }
    int label(std::size_t i) const { return labels[i]; }

    // adjacency[i] lists (neighbor index, move from i to neighbor)
    std::vector<std::vector<std::pair<std::uint32_t, Move>>> adjacency() const {
        std::vector<std::vector<std::pair<std::uint32_t, Move>>> adj(states.size());
        for (const GraphEdge& e : edges) {
            adj[e.a].push_back({e.b, e.move});
            adj[e.b].push_back({e.a, e.move.inverse()});
        }
        return adj;
    }
};

// 324-dim one-hot encoding: facelet i with color c sets entry 6*i + c.
using FeatureVector = std::array<double, kNumFacelets * kNumColors>;

inline FeatureVector featurize(const CubeState& g) {
    FeatureVector x{};
    for (int i = 0; i < kNumFacelets; ++i) x[kNumColors * i + g.facelets[i]] = 1.0;
    return x;
}

// 12-dim one-hot over the fixed move ordering U,U',D,D',L,L',R,R',F,F',B,B'.
inline std::array<double, kNumMoves> edge_feature(Move m) {
    std::array<double, kNumMoves> e{};
    e[m.index()] = 1.0;
    return e;
}

namespace detail {

// Recomputes the induced edge set by probing all 12 moves per node against
// the node-key set. Each undirected edge is stored once with a < b.
inline std::vector<GraphEdge> induced_edges(
    const std::vector<CubeState>& states,
    const std::unordered_map<StateKey, std::uint32_t, StateKeyHash>& index) {
    std::vector<GraphEdge> edges;
    for (std::uint32_t i = 0; i < states.size(); ++i) {
        for (Move m : all_moves()) {
            CubeState n = apply_move(states[i], m);
            auto it = index.find(encode_state(n));
            if (it != index.end() && it->second > i)
                edges.push_back({i, it->second, m});
        }
    }
    return edges;
}

inline TrainGraph graph_from_label_map(std::map<StateKey, int>&& by_key) {
    TrainGraph gr;
    const StateKey solved_key = encode_state(solved_state());
    auto solved_it = by_key.find(solved_key);
    if (solved_it == by_key.end() || solved_it->second != 0)
        throw std::runtime_error("walk data must contain the solved state with label 0");

    // node 0 = solved; the rest sorted by (label, key). std::map iteration
    // is already key-sorted, so a stable sort on labels finishes the job.
    std::vector<std::pair<StateKey, int>> rest;
    rest.reserve(by_key.size() - 1);
    for (const auto& [key, label] : by_key)
        if (!(key == solved_key)) rest.push_back({key, label});
    std::stable_sort(rest.begin(), rest.end(),
                     [](const auto& x, const auto& y) { return x.second < y.second; });

    gr.states.reserve(by_key.size());
    gr.labels.reserve(by_key.size());
    std::unordered_map<StateKey, std::uint32_t, StateKeyHash> index;
    index.reserve(by_key.size() * 2);

    gr.states.push_back(solved_state());
    gr.labels.push_back(0);
    index[solved_key] = 0;
    for (const auto& [key, label] : rest) {
        index[key] = static_cast<std::uint32_t>(gr.states.size());
        gr.states.push_back(decode_state(key));
        gr.labels.push_back(static_cast<std::uint8_t>(label));
    }
    gr.edges = induced_edges(gr.states, index);
    return gr;
}

}  // namespace detail

// Runs cfg.num_walks independent uniform random walks of cfg.walk_length
// steps from the solved state. Per-walk RNG streams are derived from the
// master seed, so the min-label merge is order independent and the result
// is deterministic for a given config.
inline TrainGraph run_walks(const WalkConfig& cfg) {
    cfg.validate();
    std::map<StateKey, int> label_by_key;
    label_by_key[encode_state(solved_state())] = 0;

    for (std::uint32_t w = 0; w < cfg.num_walks; ++w) {
        detail::SplitMix64 rng(detail::substream_seed(cfg.rng_seed, w));
        CubeState g = solved_state();
        for (int step = 1; step <= cfg.walk_length; ++step) {
            g = apply_move(g, detail::random_move(rng));
            auto [it, fresh] = label_by_key.try_emplace(encode_state(g), step);
            if (!fresh && step < it->second) it->second = step;
        }
    }
    return detail::graph_from_label_map(std::move(label_by_key));
}

// --- dataset file format ---
// header:  cubegnn-walks <K> <l> <seed>
// body:    <54-char facelet string> <label>      (one node per line)
// Edges are not stored; they are a deterministic function of the node set.

inline void save_graph(const TrainGraph& gr, const std::string& path,
                       const WalkConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "cubegnn-walks " << cfg.num_walks << ' ' << cfg.walk_length << ' '
        << cfg.rng_seed << '\n';
    for (std::size_t i = 0; i < gr.size(); ++i)
        out << to_facelet_string(gr.states[i]) << ' ' << int(gr.labels[i]) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline TrainGraph load_graph(const std::string& path, WalkConfig* cfg_out = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": no nodes");
    {
        std::istringstream hdr(line);
        std::string magic;
        WalkConfig cfg;
        if (!(hdr >> magic >> cfg.num_walks >> cfg.walk_length >> cfg.rng_seed) ||
            magic != "cubegnn-walks")
            throw std::runtime_error(path + ":1: bad header, expected 'cubegnn-walks K l seed'");
        if (cfg_out) *cfg_out = cfg;
    }

    std::map<StateKey, int> by_key;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string facelets;
        int label = -1;
        if (!(ls >> facelets >> label) || label < 0 || label > kDiameter)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed node line");
        CubeState g;
        try {
            g = state_from_facelets(facelets);
        } catch (const ParseError& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        auto [it, fresh] = by_key.try_emplace(encode_state(g), label);
        if (!fresh && label < it->second) it->second = label;
    }
    if (by_key.empty()) throw std::runtime_error(path + ": no nodes");
    return detail::graph_from_label_map(std::move(by_key));
}

}  // namespace cubegnn
