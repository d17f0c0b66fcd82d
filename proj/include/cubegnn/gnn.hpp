#pragma once

// Two-layer message-passing classifier over cube states.
//
// Layer update for node g with neighbors N(g):
//   msg(g<-g') = Wn * h(g') + We * e(g,g')
//   h'(g)      = relu(Ws * h(g) + mean_{g' in N(g)} msg(g<-g') + b)
// followed by a softmax classifier p(g) = softmax(W * h(g) + b) over the
// 27 distance classes. All arithmetic is in double precision and every
// summation order is fixed, so training is bit-reproducible for a seed.
//
// forward_layer/forward_model are the plain reference implementation;
// training runs an algebraically identical fused path that exploits the
// one-hot structure of the input features.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubegnn/cube.hpp"
#include "cubegnn/detail/rng.hpp"
#include "cubegnn/walk.hpp"

namespace cubegnn {

inline constexpr int kInputDim = kNumFacelets * kNumColors;  // 324
inline constexpr int kNumClasses = kDiameter + 1;            // 27
inline constexpr int kDefaultHiddenDim = 128;

// Dense row-major matrix; deliberately minimal.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    double* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

// Graph view consumed by the network: one-hot feature indices per node and
// a per-node list of (neighbor, move) pairs, where the move is the one
// taking this node to the neighbor (the edge feature of the message).
struct GnnGraph {
    std::vector<std::array<std::uint16_t, kNumFacelets>> feat;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint8_t>>> adj;
    std::vector<int> labels;  // empty when unlabeled

    std::size_t size() const { return feat.size(); }
};

inline std::array<std::uint16_t, kNumFacelets> feature_indices(const CubeState& g) {
    std::array<std::uint16_t, kNumFacelets> idx;
    for (int i = 0; i < kNumFacelets; ++i)
        idx[i] = static_cast<std::uint16_t>(kNumColors * i + g.facelets[i]);
    return idx;
}

inline GnnGraph gnn_graph_from(const TrainGraph& tg) {
    GnnGraph g;
    g.feat.reserve(tg.size());
    for (const CubeState& s : tg.states) g.feat.push_back(feature_indices(s));
    g.adj.assign(tg.size(), {});
    for (const GraphEdge& e : tg.edges) {
        g.adj[e.a].push_back({e.b, static_cast<std::uint8_t>(e.move.index())});
        g.adj[e.b].push_back({e.a, static_cast<std::uint8_t>(e.move.inverse().index())});
    }
    g.labels.assign(tg.labels.begin(), tg.labels.end());
    return g;
}

struct TrainConfig {
    double learning_rate = 0.05;
    int epochs = 300;
    std::uint64_t rng_seed = 0;
    double weight_init_scale = 1.0;

    void validate() const {
        if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
        if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
        if (!(weight_init_scale > 0.0))
            throw std::invalid_argument("weight_init_scale must be > 0");
    }
};

struct GnnModel {
    int input_dim = kInputDim;
    int hidden_dim = kDefaultHiddenDim;
    int num_classes = kNumClasses;

    Mat ws1, wn1, we1;  // H x I, H x I, H x 12
    std::vector<double> b1;
    Mat ws2, wn2, we2;  // H x H, H x H, H x 12
    std::vector<double> b2;
    Mat w;  // C x H
    std::vector<double> b;

    static GnnModel zeros(int input_dim = kInputDim, int hidden_dim = kDefaultHiddenDim,
                          int num_classes = kNumClasses) {
        GnnModel m;
        m.input_dim = input_dim;
        m.hidden_dim = hidden_dim;
        m.num_classes = num_classes;
        m.ws1 = Mat(hidden_dim, input_dim);
        m.wn1 = Mat(hidden_dim, input_dim);
        m.we1 = Mat(hidden_dim, kNumMoves);
        m.b1.assign(hidden_dim, 0.0);
        m.ws2 = Mat(hidden_dim, hidden_dim);
        m.wn2 = Mat(hidden_dim, hidden_dim);
        m.we2 = Mat(hidden_dim, kNumMoves);
        m.b2.assign(hidden_dim, 0.0);
        m.w = Mat(num_classes, hidden_dim);
        m.b.assign(num_classes, 0.0);
        return m;
    }

    // Weights uniform in [-s, s] with s = scale / sqrt(fan_in); biases zero.
    static GnnModel random_init(std::uint64_t seed, int input_dim = kInputDim,
                                int hidden_dim = kDefaultHiddenDim,
                                int num_classes = kNumClasses, double scale = 1.0) {
        GnnModel m = zeros(input_dim, hidden_dim, num_classes);
        detail::SplitMix64 rng(mix64(seed ^ 0x6e6e67u));
        auto fill = [&](Mat& mat) {
            const double s = scale / std::sqrt(static_cast<double>(mat.cols));
            for (double& x : mat.v) x = (2.0 * rng.next_unit() - 1.0) * s;
        };
        fill(m.ws1);
        fill(m.wn1);
        fill(m.we1);
        fill(m.ws2);
        fill(m.wn2);
        fill(m.we2);
        fill(m.w);
        return m;
    }

    // Named views over all parameter blocks (bias vectors as 1 x n blocks).
    template <typename F>
    void for_each_param(F&& f) {
        f("ws1", ws1.v, hidden_dim, input_dim);
        f("wn1", wn1.v, hidden_dim, input_dim);
        f("we1", we1.v, hidden_dim, kNumMoves);
        f("b1", b1, 1, hidden_dim);
        f("ws2", ws2.v, hidden_dim, hidden_dim);
        f("wn2", wn2.v, hidden_dim, hidden_dim);
        f("we2", we2.v, hidden_dim, kNumMoves);
        f("b2", b2, 1, hidden_dim);
        f("w", w.v, num_classes, hidden_dim);
        f("b", b, 1, num_classes);
    }
};

namespace detail {

inline void check_graph_dims(const GnnModel& m, const GnnGraph& g, const char* where) {
    if (m.input_dim != kInputDim)
        throw std::invalid_argument(std::string(where) + ": model input dim " +
                                    std::to_string(m.input_dim) +
                                    " does not match one-hot cube features (324)");
    (void)g;
}

inline void add_scaled(double* __restrict acc, const double* __restrict x, double s, int n) {
    for (int i = 0; i < n; ++i) acc[i] += s * x[i];
}

inline void add_vec(double* __restrict acc, const double* __restrict x, int n) {
    for (int i = 0; i < n; ++i) acc[i] += x[i];
}

// y = A * x for row-major A (rows x cols)
inline void matvec(const Mat& a, const double* __restrict x, double* __restrict y) {
    for (int r = 0; r < a.rows; ++r) {
        const double* __restrict row = a.row(r);
        double acc = 0.0;
        for (int c = 0; c < a.cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

// y += A^T * d  accumulated row-wise (keeps memory access contiguous)
inline void matvec_t_add(const Mat& a, const double* __restrict d, double* __restrict y) {
    for (int r = 0; r < a.rows; ++r) add_scaled(y, a.row(r), d[r], a.cols);
}

// A += d (x) h  (outer product accumulate)
inline void outer_add(Mat& a, const double* __restrict d, const double* __restrict h) {
    for (int r = 0; r < a.rows; ++r) add_scaled(a.row(r), h, d[r], a.cols);
}

}  // namespace detail

// --- reference forward path (Eq.-style, dense) ---

// One message-passing layer on dense per-node vectors h_prev (N x d_in).
// t selects the parameter set (1 or 2).
inline Mat forward_layer(const GnnModel& m, int t, const Mat& h_prev, const GnnGraph& g) {
    if (t != 1 && t != 2) throw std::invalid_argument("layer index must be 1 or 2");
    const Mat& ws = t == 1 ? m.ws1 : m.ws2;
    const Mat& wn = t == 1 ? m.wn1 : m.wn2;
    const Mat& we = t == 1 ? m.we1 : m.we2;
    const std::vector<double>& bias = t == 1 ? m.b1 : m.b2;

    if (h_prev.cols != ws.cols)
        throw std::invalid_argument("layer " + std::to_string(t) + " expects input dim " +
                                    std::to_string(ws.cols) + ", got " +
                                    std::to_string(h_prev.cols));
    if (static_cast<std::size_t>(h_prev.rows) != g.size())
        throw std::invalid_argument("layer " + std::to_string(t) + " expects " +
                                    std::to_string(g.size()) + " node rows, got " +
                                    std::to_string(h_prev.rows));

    const int hd = ws.rows;
    Mat out(h_prev.rows, hd);
    std::vector<double> msg(hd), agg(hd), pre(hd);
    for (std::size_t v = 0; v < g.size(); ++v) {
        std::fill(agg.begin(), agg.end(), 0.0);
        for (const auto& [u, mv] : g.adj[v]) {
            detail::matvec(wn, h_prev.row(static_cast<int>(u)), msg.data());
            for (int r = 0; r < hd; ++r) msg[r] += we.at(r, mv);
            detail::add_vec(agg.data(), msg.data(), hd);
        }
        if (!g.adj[v].empty()) {
            const double inv = 1.0 / static_cast<double>(g.adj[v].size());
            for (int r = 0; r < hd; ++r) agg[r] *= inv;
        }
        detail::matvec(ws, h_prev.row(static_cast<int>(v)), pre.data());
        double* o = out.row(static_cast<int>(v));
        for (int r = 0; r < hd; ++r) {
            const double a = pre[r] + agg[r] + bias[r];
            o[r] = a > 0.0 ? a : 0.0;
        }
    }
    return out;
}

inline Mat densify_features(const GnnGraph& g) {
    Mat x(static_cast<int>(g.size()), kInputDim);
    for (std::size_t v = 0; v < g.size(); ++v)
        for (int i = 0; i < kNumFacelets; ++i) x.at(static_cast<int>(v), g.feat[v][i]) = 1.0;
    return x;
}

// Full reference forward: two layers plus stabilized softmax classifier.
// Returns the N x 27 class-probability matrix.
inline Mat forward_model(const GnnModel& m, const GnnGraph& g) {
    detail::check_graph_dims(m, g, "forward_model");
    Mat h1 = forward_layer(m, 1, densify_features(g), g);
    Mat h2 = forward_layer(m, 2, h1, g);
    Mat p(h2.rows, m.num_classes);
    std::vector<double> z(m.num_classes);
    for (int v = 0; v < h2.rows; ++v) {
        detail::matvec(m.w, h2.row(v), z.data());
        for (int c = 0; c < m.num_classes; ++c) z[c] += m.b[c];
        double zmax = z[0];
        for (int c = 1; c < m.num_classes; ++c) zmax = std::max(zmax, z[c]);
        double sum = 0.0;
        for (int c = 0; c < m.num_classes; ++c) {
            p.at(v, c) = std::exp(z[c] - zmax);
            sum += p.at(v, c);
        }
        for (int c = 0; c < m.num_classes; ++c) p.at(v, c) /= sum;
    }
    return p;
}

// --- fused training path ---

namespace detail {

// Per-run scratch; sized lazily so one workspace serves many calls.
struct GnnWorkspace {
    Mat wnx;   // per-node neighbor transform of the previous layer
    Mat h1, h2, p;
    Mat dh;    // gradient buffer for the deeper of the two layers
    Mat tagg;  // edge-aggregated gradient sums
    Mat dh1;
    Mat ws1t, wn1t;          // transposed layer-1 weights (contiguous column access)
    Mat ws2t, wn2t, wt;      // transposed dense weights for sweep products
    Mat gws1t, gwn1t;        // transposed layer-1 gradients

    void resize(int n, int h, int c, int input_dim) {
        auto fit = [](Mat& m, int r, int cc) {
            if (m.rows != r || m.cols != cc) m = Mat(r, cc);
        };
        fit(wnx, n, h);
        fit(h1, n, h);
        fit(h2, n, h);
        fit(p, n, c);
        fit(dh, n, h);
        fit(tagg, n, h);
        fit(dh1, n, h);
        fit(ws1t, input_dim, h);
        fit(wn1t, input_dim, h);
        fit(ws2t, h, h);
        fit(wn2t, h, h);
        fit(wt, h, c);
        fit(gws1t, input_dim, h);
        fit(gwn1t, input_dim, h);
    }
};

inline void transpose_into(const Mat& a, Mat& out) {
    for (int r = 0; r < a.rows; ++r)
        for (int c = 0; c < a.cols; ++c) out.at(c, r) = a.at(r, c);
}

// y = A * x written as a column sweep over the transposed matrix, which
// keeps the inner loops vectorizable without reassociating reductions.
// Exact zeros in x are skipped; they contribute nothing either way.
inline void sweep_matvec(const Mat& at, const double* __restrict x,
                         double* __restrict y) {
    std::fill(y, y + at.cols, 0.0);
    for (int c = 0; c < at.rows; ++c)
        if (x[c] != 0.0) add_scaled(y, at.row(c), x[c], at.cols);
}

// out.row(v) = A * in.row(v) for v in [v0, v1), processed together so each
// streamed matrix row is reused across the block. Per-element summation
// order matches sweep_matvec exactly.
inline void sweep_matvec_block(const Mat& at, const Mat& in, int v0, int v1, Mat& out) {
    constexpr int kBlock = 4;
    for (int b0 = v0; b0 < v1; b0 += kBlock) {
        const int nb = std::min(kBlock, v1 - b0);
        const double* x[kBlock];
        double* y[kBlock];
        for (int k = 0; k < nb; ++k) {
            x[k] = in.row(b0 + k);
            y[k] = out.row(b0 + k);
            std::fill(y[k], y[k] + at.cols, 0.0);
        }
        for (int c = 0; c < at.rows; ++c) {
            const double* row = at.row(c);
            for (int k = 0; k < nb; ++k)
                if (x[k][c] != 0.0) add_scaled(y[k], row, x[k][c], at.cols);
        }
    }
}

// Fused self-path backward for a node block:
//   grad += d.row(v) (x) h.row(v)   and   out.row(v) += W^T d.row(v)
// with the same per-element accumulation order as the per-node loops.
inline void outer_tmatvec_block(const Mat& w, Mat& grad, const Mat& d, const Mat& h,
                                Mat& out, int v0, int v1) {
    constexpr int kBlock = 4;
    for (int b0 = v0; b0 < v1; b0 += kBlock) {
        const int nb = std::min(kBlock, v1 - b0);
        for (int r = 0; r < w.rows; ++r) {
            const double* wrow = w.row(r);
            double* grow = grad.row(r);
            for (int k = 0; k < nb; ++k) {
                const double dr = d.at(b0 + k, r);
                if (dr == 0.0) continue;
                add_scaled(grow, h.row(b0 + k), dr, w.cols);
                add_scaled(out.row(b0 + k), wrow, dr, w.cols);
            }
        }
    }
}

// Forward pass exploiting one-hot inputs: layer-1 transforms are gathered
// from transposed weight rows, and per-node neighbor transforms are
// computed once and reused across incident edges. Matches forward_model
// up to floating-point associativity.
inline void forward_fused(const GnnModel& m, const GnnGraph& g, GnnWorkspace& ws) {
    check_graph_dims(m, g, "forward");
    const int n = static_cast<int>(g.size());
    const int hd = m.hidden_dim;
    const int nc = m.num_classes;
    ws.resize(n, hd, nc, m.input_dim);
    transpose_into(m.ws1, ws.ws1t);
    transpose_into(m.wn1, ws.wn1t);
    transpose_into(m.ws2, ws.ws2t);
    transpose_into(m.wn2, ws.wn2t);
    transpose_into(m.w, ws.wt);

    // layer 1
    for (int u = 0; u < n; ++u) {
        double* acc = ws.wnx.row(u);
        std::fill(acc, acc + hd, 0.0);
        for (int i = 0; i < kNumFacelets; ++i)
            add_vec(acc, ws.wn1t.row(g.feat[u][i]), hd);
    }
    std::vector<double> agg(hd);
    for (int v = 0; v < n; ++v) {
        std::fill(agg.begin(), agg.end(), 0.0);
        for (const auto& [u, mv] : g.adj[v]) {
            add_vec(agg.data(), ws.wnx.row(static_cast<int>(u)), hd);
            for (int r = 0; r < hd; ++r) agg[r] += m.we1.at(r, mv);
        }
        const double inv = g.adj[v].empty() ? 0.0 : 1.0 / static_cast<double>(g.adj[v].size());
        double* h = ws.h1.row(v);
        std::fill(h, h + hd, 0.0);
        for (int i = 0; i < kNumFacelets; ++i) add_vec(h, ws.ws1t.row(g.feat[v][i]), hd);
        for (int r = 0; r < hd; ++r) {
            const double a = h[r] + inv * agg[r] + m.b1[r];
            h[r] = a > 0.0 ? a : 0.0;
        }
    }

    // layer 2 (wnx reused for Wn2 * h1; self transform staged in h2)
    sweep_matvec_block(ws.wn2t, ws.h1, 0, n, ws.wnx);
    sweep_matvec_block(ws.ws2t, ws.h1, 0, n, ws.h2);
    for (int v = 0; v < n; ++v) {
        std::fill(agg.begin(), agg.end(), 0.0);
        for (const auto& [u, mv] : g.adj[v]) {
            add_vec(agg.data(), ws.wnx.row(static_cast<int>(u)), hd);
            for (int r = 0; r < hd; ++r) agg[r] += m.we2.at(r, mv);
        }
        const double inv = g.adj[v].empty() ? 0.0 : 1.0 / static_cast<double>(g.adj[v].size());
        double* h = ws.h2.row(v);
        for (int r = 0; r < hd; ++r) {
            const double a = h[r] + inv * agg[r] + m.b2[r];
            h[r] = a > 0.0 ? a : 0.0;
        }
    }

    // classifier (pre-softmax logits staged in p)
    sweep_matvec_block(ws.wt, ws.h2, 0, n, ws.p);
    for (int v = 0; v < n; ++v) {
        double* z = ws.p.row(v);
        for (int c = 0; c < nc; ++c) z[c] += m.b[c];
        double zmax = z[0];
        for (int c = 1; c < nc; ++c) zmax = std::max(zmax, z[c]);
        double sum = 0.0;
        for (int c = 0; c < nc; ++c) {
            z[c] = std::exp(z[c] - zmax);
            sum += z[c];
        }
        for (int c = 0; c < nc; ++c) z[c] /= sum;
    }
}

inline void check_labels(const GnnModel& m, const GnnGraph& g, const char* where) {
    if (g.labels.size() != g.size())
        throw std::invalid_argument(std::string(where) + ": graph has no labels");
    for (std::size_t v = 0; v < g.labels.size(); ++v)
        if (g.labels[v] < 0 || g.labels[v] >= m.num_classes)
            throw std::invalid_argument(std::string(where) + ": label " +
                                        std::to_string(g.labels[v]) + " of node " +
                                        std::to_string(v) + " outside [0, " +
                                        std::to_string(m.num_classes - 1) + "]");
}

inline double loss_from_probs(const Mat& p, const std::vector<int>& labels) {
    double acc = 0.0;
    for (int v = 0; v < p.rows; ++v)
        acc += -std::log(p.at(v, labels[static_cast<std::size_t>(v)]));
    return acc / static_cast<double>(p.rows);
}

}  // namespace detail

// Mean cross-entropy of the model's predictions against the graph labels.
inline double loss(const GnnModel& m, const GnnGraph& g) {
    detail::check_labels(m, g, "loss");
    static thread_local detail::GnnWorkspace ws;
    detail::forward_fused(m, g, ws);
    return detail::loss_from_probs(ws.p, g.labels);
}

namespace detail {

// Gradient computation given a completed forward pass in ws.
// Consumes ws.p (the softmax-CE delta is folded into it in place).
inline GnnModel backward_tail(const GnnModel& m, const GnnGraph& g, GnnWorkspace& ws) {
    const int n = static_cast<int>(g.size());
    const int hd = m.hidden_dim;
    const int nc = m.num_classes;
    GnnModel grad = GnnModel::zeros(m.input_dim, hd, nc);
    ws.gws1t.zero();
    ws.gwn1t.zero();

    // softmax cross-entropy: dz = (p - onehot(y)) / n, folded into ws.p
    const double invn = 1.0 / static_cast<double>(n);
    for (int v = 0; v < n; ++v) {
        double* pr = ws.p.row(v);
        pr[g.labels[static_cast<std::size_t>(v)]] -= 1.0;
        for (int c = 0; c < nc; ++c) pr[c] *= invn;
    }

    // classifier
    for (int v = 0; v < n; ++v) {
        const double* dz = ws.p.row(v);
        outer_add(grad.w, dz, ws.h2.row(v));
        add_vec(grad.b.data(), dz, nc);
        double* dh2 = ws.dh.row(v);
        std::fill(dh2, dh2 + hd, 0.0);
        matvec_t_add(m.w, dz, dh2);
        const double* h2 = ws.h2.row(v);
        for (int r = 0; r < hd; ++r)
            if (h2[r] <= 0.0) dh2[r] = 0.0;  // dh2 is now dA2
    }

    // layer 2: self path, then edge-aggregated neighbor path
    ws.tagg.zero();
    ws.dh1.zero();
    for (int v = 0; v < n; ++v) {
        const double* da2 = ws.dh.row(v);
        add_vec(grad.b2.data(), da2, hd);
        const double inv = g.adj[v].empty() ? 0.0 : 1.0 / static_cast<double>(g.adj[v].size());
        for (const auto& [u, mv] : g.adj[v]) {
            add_scaled(ws.tagg.row(static_cast<int>(u)), da2, inv, hd);
            for (int r = 0; r < hd; ++r) grad.we2.at(r, mv) += inv * da2[r];
        }
    }
    outer_tmatvec_block(m.ws2, grad.ws2, ws.dh, ws.h1, ws.dh1, 0, n);
    outer_tmatvec_block(m.wn2, grad.wn2, ws.tagg, ws.h1, ws.dh1, 0, n);

    // relu mask of layer 1
    for (int v = 0; v < n; ++v) {
        double* dh1 = ws.dh1.row(v);
        const double* h1 = ws.h1.row(v);
        for (int r = 0; r < hd; ++r)
            if (h1[r] <= 0.0) dh1[r] = 0.0;  // now dA1
    }

    // layer 1: one-hot scatters into transposed gradient blocks
    ws.tagg.zero();
    for (int v = 0; v < n; ++v) {
        const double* da1 = ws.dh1.row(v);
        for (int i = 0; i < kNumFacelets; ++i)
            add_vec(ws.gws1t.row(g.feat[v][i]), da1, hd);
        add_vec(grad.b1.data(), da1, hd);
        const double inv = g.adj[v].empty() ? 0.0 : 1.0 / static_cast<double>(g.adj[v].size());
        for (const auto& [u, mv] : g.adj[v]) {
            add_scaled(ws.tagg.row(static_cast<int>(u)), da1, inv, hd);
            for (int r = 0; r < hd; ++r) grad.we1.at(r, mv) += inv * da1[r];
        }
    }
    for (int u = 0; u < n; ++u) {
        const double* s = ws.tagg.row(u);
        for (int i = 0; i < kNumFacelets; ++i)
            add_vec(ws.gwn1t.row(g.feat[u][i]), s, hd);
    }
    transpose_into(ws.gws1t, grad.ws1);
    transpose_into(ws.gwn1t, grad.wn1);
    return grad;
}

}  // namespace detail

// Exact analytic gradients of loss() with respect to every parameter.
// ReLU subgradient at 0 is taken as 0.
inline GnnModel backward(const GnnModel& m, const GnnGraph& g) {
    detail::check_labels(m, g, "backward");
    static thread_local detail::GnnWorkspace ws;
    detail::forward_fused(m, g, ws);
    return detail::backward_tail(m, g, ws);
}

// Full-batch gradient descent. Deterministic: single thread, fixed orders.
// trace[e] is the loss entering epoch e; the post-final-step loss is
// appended, so trace.size() == epochs + 1.
inline std::vector<double> train(GnnModel& m, const GnnGraph& g, const TrainConfig& cfg) {
    cfg.validate();
    detail::check_labels(m, g, "train");
    detail::GnnWorkspace ws;
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
    const double lr = cfg.learning_rate;
    auto upd = [lr](std::vector<double>& p, const std::vector<double>& gr) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * gr[i];
    };
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        detail::forward_fused(m, g, ws);
        const double l = detail::loss_from_probs(ws.p, g.labels);
        trace.push_back(l);
        if (!std::isfinite(l))
            throw std::runtime_error("non-finite training loss " + std::to_string(l) +
                                     " at epoch " + std::to_string(epoch));
        GnnModel grad = detail::backward_tail(m, g, ws);
        upd(m.ws1.v, grad.ws1.v);
        upd(m.wn1.v, grad.wn1.v);
        upd(m.we1.v, grad.we1.v);
        upd(m.b1, grad.b1);
        upd(m.ws2.v, grad.ws2.v);
        upd(m.wn2.v, grad.wn2.v);
        upd(m.we2.v, grad.we2.v);
        upd(m.b2, grad.b2);
        upd(m.w.v, grad.w.v);
        upd(m.b, grad.b);
    }
    trace.push_back(loss(m, g));
    return trace;
}

// Fraction of nodes whose argmax prediction equals the label.
inline double train_accuracy(const GnnModel& m, const GnnGraph& g) {
    detail::check_labels(m, g, "train_accuracy");
    static thread_local detail::GnnWorkspace ws;
    detail::forward_fused(m, g, ws);
    int hits = 0;
    for (int v = 0; v < static_cast<int>(g.size()); ++v) {
        const double* pr = ws.p.row(v);
        int best = 0;
        for (int c = 1; c < m.num_classes; ++c)
            if (pr[c] > pr[best]) best = c;
        if (best == g.labels[static_cast<std::size_t>(v)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(g.size());
}

// --- checkpoint format ---
// line 1: gnn-v1 <input_dim> <hidden_dim> <num_classes>
// then per block: "<name> <rows> <cols>" followed by rows lines of cols
// decimal doubles printed with round-trip precision.

inline void save_model(const GnnModel& m_in, const std::string& path) {
    GnnModel& m = const_cast<GnnModel&>(m_in);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "gnn-v1 " << m.input_dim << ' ' << m.hidden_dim << ' ' << m.num_classes << '\n';
    out << std::setprecision(17);
    m.for_each_param([&](const char* name, std::vector<double>& p, int rows, int cols) {
        out << name << ' ' << rows << ' ' << cols << '\n';
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                if (c) out << ' ';
                out << p[static_cast<std::size_t>(r) * cols + c];
            }
            out << '\n';
        }
    });
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline GnnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    int input_dim = 0, hidden_dim = 0, num_classes = 0;
    if (!(in >> magic >> input_dim >> hidden_dim >> num_classes) || magic != "gnn-v1")
        throw std::runtime_error(path + ": bad checkpoint header (expected gnn-v1)");
    if (input_dim < 1 || hidden_dim < 1 || num_classes < 1)
        throw std::runtime_error(path + ": non-positive dimension in header");
    GnnModel m = GnnModel::zeros(input_dim, hidden_dim, num_classes);
    m.for_each_param([&](const char* name, std::vector<double>& p, int rows, int cols) {
        std::string got;
        int r = 0, c = 0;
        if (!(in >> got >> r >> c))
            throw std::runtime_error(path + ": truncated checkpoint, expected block " +
                                     name);
        if (got != name)
            throw std::runtime_error(path + ": expected block '" + name + "', got '" +
                                     got + "'");
        if (r != rows || c != cols)
            throw std::runtime_error(path + ": block " + name + " has shape " +
                                     std::to_string(r) + "x" + std::to_string(c) +
                                     ", header implies " + std::to_string(rows) + "x" +
                                     std::to_string(cols));
        for (double& x : p)
            if (!(in >> x))
                throw std::runtime_error(path + ": truncated values in block " + name);
    });
    return m;
}

}  // namespace cubegnn
