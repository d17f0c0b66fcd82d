#pragma once

// Single-state class prediction on the implicit full Cayley graph.
//
// Evaluating the 2-layer model at one node needs its 2-hop ego network.
// ego_graph + forward_model is the reference route. FastPredictor is the
// production route: on the full graph every node has exactly the 12 moves
// as neighbors, so the layer-1 neighbor sum collapses into a single
// precomputed matrix applied to the node's own features, and the edge
// terms fold into constant vectors. Both routes agree to floating-point
// associativity; tests pin them against each other.

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cubegnn/cube.hpp"
#include "cubegnn/gnn.hpp"

namespace cubegnn {

// Induced subgraph on all states within `hops` moves of `center`.
// Node 0 is the center.
inline GnnGraph ego_graph(const CubeState& center, int hops = 2) {
    std::vector<CubeState> states{center};
    std::unordered_map<StateKey, std::uint32_t, StateKeyHash> index;
    index[encode_state(center)] = 0;
    std::size_t layer_begin = 0;
    for (int h = 0; h < hops; ++h) {
        const std::size_t layer_end = states.size();
        for (std::size_t v = layer_begin; v < layer_end; ++v) {
            const CubeState src = states[v];
            for (Move m : all_moves()) {
                CubeState n = apply_move(src, m);
                StateKey k = encode_state(n);
                if (index.emplace(k, static_cast<std::uint32_t>(states.size())).second)
                    states.push_back(n);
            }
        }
        layer_begin = layer_end;
    }

    GnnGraph g;
    g.feat.reserve(states.size());
    for (const CubeState& s : states) g.feat.push_back(feature_indices(s));
    g.adj.assign(states.size(), {});
    for (std::uint32_t v = 0; v < states.size(); ++v) {
        for (Move m : all_moves()) {
            auto it = index.find(encode_state(apply_move(states[v], m)));
            if (it != index.end())
                g.adj[v].push_back({it->second, static_cast<std::uint8_t>(m.index())});
        }
    }
    return g;
}

// Reference prediction: argmax class of the center of the 2-hop ego
// network, ties broken toward the smaller class index.
inline int predict_class_ego(const GnnModel& m, const CubeState& g) {
    GnnGraph ego = ego_graph(g, 2);
    Mat p = forward_model(m, ego);
    int best = 0;
    for (int c = 1; c < m.num_classes; ++c)
        if (p.at(0, c) > p.at(0, best)) best = c;
    return best;
}

// Fused single-state inference bound to one immutable model.
class FastPredictor {
public:
    static constexpr int kMaxHidden = 1024;

    explicit FastPredictor(const GnnModel& m)
        : model_(&m),
          hd_(m.hidden_dim),
          nc_(m.num_classes),
          u1t_(kInputDim, m.hidden_dim),
          ws2t_(m.hidden_dim, m.hidden_dim),
          wn2t_(m.hidden_dim, m.hidden_dim),
          wt_(m.hidden_dim, m.num_classes),
          d1_(m.hidden_dim, 0.0),
          d2_(m.hidden_dim, 0.0) {
        detail::check_graph_dims(m, GnnGraph{}, "FastPredictor");
        if (hd_ > kMaxHidden || nc_ > kMaxHidden)
            throw std::invalid_argument("FastPredictor supports at most 1024 units");
        detail::transpose_into(m.ws2, ws2t_);
        detail::transpose_into(m.wn2, wn2t_);
        detail::transpose_into(m.w, wt_);
        // u1 = ws1 + (1/12) * wn1 * A, where A sums the 12 one-move feature
        // permutations; stored transposed so per-facelet rows are contiguous.
        Mat wn1t(kInputDim, hd_);
        detail::transpose_into(m.ws1, u1t_);
        detail::transpose_into(m.wn1, wn1t);
        const double inv = 1.0 / kGraphDegree;
        for (int mv = 0; mv < kNumMoves; ++mv) {
            const std::uint8_t* src = detail_move_src(mv);
            for (int i = 0; i < kNumFacelets; ++i) {
                const int from = i, to = src[i];
                // sticker at `to` appears at facelet `from` of the neighbor
                for (int c = 0; c < kNumColors; ++c)
                    detail::add_scaled(u1t_.row(kNumColors * to + c),
                                       wn1t.row(kNumColors * from + c), inv, hd_);
            }
        }
        // constant edge-feature aggregates: every move appears exactly once
        for (int r = 0; r < hd_; ++r) {
            double e1 = 0.0, e2 = 0.0;
            for (int mv = 0; mv < kNumMoves; ++mv) {
                e1 += m.we1.at(r, mv);
                e2 += m.we2.at(r, mv);
            }
            d1_[r] = m.b1[r] + inv * e1;
            d2_[r] = m.b2[r] + inv * e2;
        }
    }

    const GnnModel& model() const { return *model_; }

    // argmax class of p(g); ties toward the smaller class index
    int predict(const CubeState& g) const {
        double pre_c[kMaxHidden], pre_n[kMaxHidden], h1[kMaxHidden], hsum[kMaxHidden];
        double h2[kMaxHidden], z[kMaxHidden];

        // layer-1 pre-activation of the center, then each neighbor as a
        // delta over the 20 facelets its move displaces
        for (int r = 0; r < hd_; ++r) pre_c[r] = d1_[r];
        for (int i = 0; i < kNumFacelets; ++i)
            detail::add_vec(pre_c, u1t_.row(kNumColors * i + g.facelets[i]), hd_);

        std::fill(hsum, hsum + hd_, 0.0);
        for (int mv = 0; mv < kNumMoves; ++mv) {
            std::copy(pre_c, pre_c + hd_, pre_n);
            const std::uint8_t* src = detail::kMoveSrc[mv];
            for (std::uint8_t i : detail::moved_positions()[mv]) {
                detail::add_scaled(pre_n, u1t_.row(kNumColors * i + g.facelets[i]), -1.0,
                                   hd_);
                detail::add_vec(pre_n, u1t_.row(kNumColors * i + g.facelets[src[i]]), hd_);
            }
            for (int r = 0; r < hd_; ++r) hsum[r] += pre_n[r] > 0.0 ? pre_n[r] : 0.0;
        }
        for (int r = 0; r < hd_; ++r) h1[r] = pre_c[r] > 0.0 ? pre_c[r] : 0.0;

        detail::sweep_matvec(ws2t_, h1, z);
        detail::sweep_matvec(wn2t_, hsum, h2);
        const double inv = 1.0 / kGraphDegree;
        for (int r = 0; r < hd_; ++r) {
            const double a = z[r] + inv * h2[r] + d2_[r];
            h2[r] = a > 0.0 ? a : 0.0;
        }
        detail::sweep_matvec(wt_, h2, z);
        int best = 0;
        for (int c = 0; c < nc_; ++c) z[c] += model_->b[c];
        for (int c = 1; c < nc_; ++c)
            if (z[c] > z[best]) best = c;
        return best;
    }

private:
    const GnnModel* model_;
    int hd_, nc_;
    Mat u1t_, ws2t_, wn2t_, wt_;
    std::vector<double> d1_, d2_;
};

// Convenience wrapper; building the predictor costs one small matrix fold,
// so hot paths should hold a FastPredictor instead.
inline int predict_class(const GnnModel& m, const CubeState& g) {
    return FastPredictor(m).predict(g);
}

}  // namespace cubegnn
