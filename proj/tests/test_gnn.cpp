#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "cubegnn/cube.hpp"
#include "cubegnn/detail/rng.hpp"
#include "cubegnn/gnn.hpp"
#include "cubegnn/predict.hpp"
#include "cubegnn/walk.hpp"

using namespace cubegnn;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const char* name) : path(std::string("gnn_test_") + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

// Random node set (walk states) with random induced-looking edges; some
// nodes stay isolated on purpose.
GnnGraph random_graph(std::uint64_t seed, int n, int num_edges, int max_label = 26) {
    detail::SplitMix64 rng(seed);
    GnnGraph g;
    CubeState s = solved_state();
    for (int i = 0; i < n; ++i) {
        s = apply_move(s, detail::random_move(rng));
        g.feat.push_back(feature_indices(s));
        g.labels.push_back(static_cast<int>(rng.next_below(max_label + 1)));
    }
    g.adj.assign(n, {});
    for (int e = 0; e < num_edges; ++e) {
        const auto a = static_cast<std::uint32_t>(rng.next_below(n));
        const auto b = static_cast<std::uint32_t>(rng.next_below(n));
        if (a == b) continue;
        const Move m = detail::random_move(rng);
        g.adj[a].push_back({b, static_cast<std::uint8_t>(m.index())});
        g.adj[b].push_back({a, static_cast<std::uint8_t>(m.inverse().index())});
    }
    return g;
}

double max_fd_rel_error(GnnModel& m, const GnnGraph& g, double eps) {
    const GnnModel analytic = backward(m, g);
    double worst = 0.0;
    m.for_each_param([&](const char* name, std::vector<double>& p, int, int) {
        std::vector<double>* ga = nullptr;
        GnnModel& a = const_cast<GnnModel&>(analytic);
        a.for_each_param([&](const char* n2, std::vector<double>& p2, int, int) {
            if (std::string(name) == n2) ga = &p2;
        });
        REQUIRE(ga != nullptr);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double save = p[i];
            p[i] = save + eps;
            const double lp = loss(m, g);
            p[i] = save - eps;
            const double lm = loss(m, g);
            p[i] = save;
            const double fd = (lp - lm) / (2.0 * eps);
            const double an = (*ga)[i];
            const double rel =
                std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-3});
            worst = std::max(worst, rel);
        }
    });
    return worst;
}

}  // namespace

TEST_CASE("zero model predicts the uniform distribution", "[gnn]") {
    const GnnModel m = GnnModel::zeros();
    const GnnGraph g = random_graph(1, 12, 20, 7);
    const Mat p = forward_model(m, g);
    for (int v = 0; v < p.rows; ++v)
        for (int c = 0; c < 27; ++c)
            CHECK(p.at(v, c) == Catch::Approx(1.0 / 27.0).epsilon(0).margin(1e-15));
    CHECK(std::abs(loss(m, g) - std::log(27.0)) < 1e-12);
}

TEST_CASE("softmax rows are normalized distributions", "[gnn]") {
    const GnnModel m = GnnModel::random_init(7);
    const GnnGraph g = random_graph(2, 30, 60, 7);
    const Mat p = forward_model(m, g);
    for (int v = 0; v < p.rows; ++v) {
        double sum = 0.0;
        for (int c = 0; c < 27; ++c) {
            CHECK(p.at(v, c) >= 0.0);
            sum += p.at(v, c);
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("neighbor order does not change the forward pass", "[gnn]") {
    const GnnModel m = GnnModel::random_init(11, kInputDim, 64);
    GnnGraph g = random_graph(3, 20, 50, 7);
    const Mat p0 = forward_model(m, g);

    std::mt19937 shuffle_rng(99);
    for (auto& lst : g.adj) std::shuffle(lst.begin(), lst.end(), shuffle_rng);
    const Mat p1 = forward_model(m, g);
    for (int v = 0; v < p0.rows; ++v)
        for (int c = 0; c < 27; ++c)
            CHECK(std::abs(p0.at(v, c) - p1.at(v, c)) < 1e-12);
}

TEST_CASE("isolated nodes use only the self path", "[gnn]") {
    const GnnModel m = GnnModel::random_init(5, kInputDim, 16);
    GnnGraph g = random_graph(4, 3, 0, 7);  // no edges at all
    const Mat x = densify_features(g);
    const Mat h1 = forward_layer(m, 1, x, g);
    for (int v = 0; v < 3; ++v) {
        for (int r = 0; r < 16; ++r) {
            double pre = m.b1[r];
            for (int c = 0; c < kInputDim; ++c) pre += m.ws1.at(r, c) * x.at(v, c);
            CHECK(h1.at(v, r) == Catch::Approx(std::max(pre, 0.0)).margin(1e-12));
        }
    }

    // and the unused edge blocks get exactly zero gradient
    const GnnModel grad = backward(m, g);
    for (double v : grad.we1.v) CHECK(v == 0.0);
    for (double v : grad.we2.v) CHECK(v == 0.0);
    for (double v : grad.wn1.v) CHECK(v == 0.0);
    for (double v : grad.wn2.v) CHECK(v == 0.0);
}

TEST_CASE("all-zero parameters give an all-zero layer output", "[gnn]") {
    const GnnModel m = GnnModel::zeros(kInputDim, 8);
    const GnnGraph g = random_graph(6, 10, 15, 7);
    const Mat h1 = forward_layer(m, 1, densify_features(g), g);
    for (double v : h1.v) CHECK(v == 0.0);
}

TEST_CASE("shape errors name the layer and dimensions", "[gnn]") {
    const GnnModel m = GnnModel::random_init(8, kInputDim, 8);
    const GnnGraph g = random_graph(7, 5, 6, 7);
    Mat wrong(5, 17);
    CHECK_THROWS_WITH(forward_layer(m, 1, wrong, g),
                      Catch::Matchers::ContainsSubstring("324") &&
                          Catch::Matchers::ContainsSubstring("17"));
    Mat wrong_rows(4, kInputDim);
    CHECK_THROWS_AS(forward_layer(m, 1, wrong_rows, g), std::invalid_argument);
    CHECK_THROWS_AS(forward_layer(m, 3, wrong, g), std::invalid_argument);
}

TEST_CASE("fused training forward matches the reference forward", "[gnn]") {
    const GnnModel m = GnnModel::random_init(9, kInputDim, 32);
    const GnnGraph g = random_graph(10, 40, 100, 7);
    const Mat ref = forward_model(m, g);
    detail::GnnWorkspace ws;
    detail::forward_fused(m, g, ws);
    for (int v = 0; v < ref.rows; ++v)
        for (int c = 0; c < 27; ++c)
            CHECK(std::abs(ref.at(v, c) - ws.p.at(v, c)) < 1e-12);
}

TEST_CASE("analytic gradients match central finite differences", "[gnn]") {
    GnnModel m = GnnModel::random_init(13, kInputDim, 8);
    const GnnGraph g = random_graph(14, 20, 30, 26);
    const double worst = max_fd_rel_error(m, g, 1e-5);
    INFO("max relative gradient error " << worst);
    CHECK(worst < 1e-5);
}

TEST_CASE("classifier bias gradient has its closed form", "[gnn]") {
    const GnnModel m = GnnModel::random_init(15, kInputDim, 8);
    const GnnGraph g = random_graph(16, 15, 25, 7);
    const GnnModel grad = backward(m, g);
    const Mat p = forward_model(m, g);
    for (int c = 0; c < 27; ++c) {
        double expect = 0.0;
        for (int v = 0; v < p.rows; ++v)
            expect += (p.at(v, c) - (g.labels[v] == c ? 1.0 : 0.0));
        expect /= p.rows;
        CHECK(grad.b[c] == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("labels are validated", "[gnn]") {
    const GnnModel m = GnnModel::random_init(17, kInputDim, 8);
    GnnGraph g = random_graph(18, 5, 5, 7);
    g.labels[2] = 27;
    CHECK_THROWS_AS(loss(m, g), std::invalid_argument);
    g.labels[2] = -1;
    CHECK_THROWS_AS(backward(m, g), std::invalid_argument);
    g.labels.clear();
    CHECK_THROWS_AS(loss(m, g), std::invalid_argument);
}

TEST_CASE("training config is validated", "[gnn]") {
    CHECK_THROWS_AS((TrainConfig{0.05, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((TrainConfig{-1.0, 10}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((TrainConfig{0.05, 10, 0, 0.0}).validate(), std::invalid_argument);
}

TEST_CASE("loss decreases over the first epochs of a toy problem", "[gnn]") {
    const TrainGraph tg = run_walks({30, 4, 21});
    GnnGraph g = gnn_graph_from(tg);
    GnnModel m = GnnModel::random_init(22, kInputDim, 32);
    const auto trace = train(m, g, TrainConfig{0.05, 10, 22});
    REQUIRE(trace.size() == 11);
    for (std::size_t e = 0; e + 1 < trace.size(); ++e) {
        CHECK(std::isfinite(trace[e]));
        CHECK(trace[e + 1] < trace[e]);
    }
}

TEST_CASE("training is bit-deterministic for a fixed seed", "[gnn]") {
    const TrainGraph tg = run_walks({40, 5, 33});
    const GnnGraph g = gnn_graph_from(tg);
    GnnModel a = GnnModel::random_init(44, kInputDim, 16);
    GnnModel b = GnnModel::random_init(44, kInputDim, 16);
    const auto ta = train(a, g, TrainConfig{0.1, 25, 44});
    const auto tb = train(b, g, TrainConfig{0.1, 25, 44});
    CHECK(ta == tb);
    bool identical = true;
    a.for_each_param([&](const char* name, std::vector<double>& pa, int, int) {
        b.for_each_param([&](const char* n2, std::vector<double>& pb, int, int) {
            if (std::string(name) == n2 && pa != pb) identical = false;
        });
    });
    CHECK(identical);
}

TEST_CASE("trained toy model beats the majority class", "[gnn]") {
    const TrainGraph tg = run_walks({35, 5, 55});  // ~100 nodes
    const GnnGraph g = gnn_graph_from(tg);
    std::array<int, 27> freq{};
    for (int y : g.labels) ++freq[y];
    const double majority =
        static_cast<double>(*std::max_element(freq.begin(), freq.end())) / g.size();

    GnnModel m = GnnModel::random_init(56, kInputDim, 64);
    train(m, g, TrainConfig{0.1, 150, 56});
    const double acc = train_accuracy(m, g);
    INFO("accuracy " << acc << " vs majority baseline " << majority);
    CHECK(acc > majority);
}

TEST_CASE("checkpoint round trip is bit exact", "[gnn]") {
    GnnModel m = GnnModel::random_init(60, kInputDim, 16);
    const GnnGraph g = random_graph(61, 10, 20, 7);
    TempFile f("model.txt");
    save_model(m, f.path);
    GnnModel back = load_model(f.path);

    CHECK(back.hidden_dim == 16);
    bool identical = true;
    m.for_each_param([&](const char* name, std::vector<double>& pa, int, int) {
        back.for_each_param([&](const char* n2, std::vector<double>& pb, int, int) {
            if (std::string(name) == n2 && pa != pb) identical = false;
        });
    });
    CHECK(identical);

    const double la = loss(m, g), lb = loss(back, g);
    CHECK(la == lb);  // bit-for-bit
}

TEST_CASE("checkpoint loader rejects damaged files", "[gnn]") {
    GnnModel m = GnnModel::random_init(62, kInputDim, 8);
    TempFile f("damaged.txt");
    save_model(m, f.path);

    // header tampering: hidden size that contradicts the blocks
    {
        std::ifstream in(f.path);
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        in.close();
        const auto pos = content.find("gnn-v1 324 8 27");
        REQUIRE(pos != std::string::npos);
        content.replace(pos, 15, "gnn-v1 324 9 27");
        std::ofstream out(f.path);
        out << content;
    }
    CHECK_THROWS_WITH(load_model(f.path), Catch::Matchers::ContainsSubstring("ws1"));

    // truncation
    save_model(m, f.path);
    {
        std::ifstream in(f.path);
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        in.close();
        std::ofstream out(f.path);
        out << content.substr(0, content.size() / 2);
    }
    CHECK_THROWS_WITH(load_model(f.path), Catch::Matchers::ContainsSubstring("truncated"));

    CHECK_THROWS_AS(load_model("does_not_exist.txt"), std::runtime_error);
}

TEST_CASE("fast predictor agrees with the ego-network reference", "[gnn]") {
    const GnnModel m = GnnModel::random_init(70, kInputDim, 24);
    const FastPredictor fast(m);
    detail::SplitMix64 rng(71);
    CubeState g = solved_state();
    for (int trial = 0; trial < 60; ++trial) {
        g = apply_move(g, detail::random_move(rng));
        CHECK(fast.predict(g) == predict_class_ego(m, g));
    }
    CHECK(fast.predict(solved_state()) == predict_class_ego(m, solved_state()));
}

TEST_CASE("prediction is deterministic and shift invariant", "[gnn]") {
    GnnModel m = GnnModel::random_init(80, kInputDim, 16);
    const CubeState g = apply_moves(solved_state(), parse_scramble("U R F' L B"));
    const int cls = predict_class(m, g);
    CHECK(predict_class(m, g) == cls);

    // adding a constant to every logit leaves the argmax untouched
    for (double& bc : m.b) bc += 3.75;
    CHECK(predict_class(m, g) == cls);
}

TEST_CASE("random init respects the declared shapes", "[gnn]") {
    const GnnModel m = GnnModel::random_init(90);
    CHECK(m.ws1.rows == 128);
    CHECK(m.ws1.cols == 324);
    CHECK(m.we2.cols == 12);
    CHECK(m.w.rows == 27);
    CHECK(m.b.size() == 27);
    bool finite = true, nonzero = false;
    const_cast<GnnModel&>(m).for_each_param(
        [&](const char*, std::vector<double>& p, int, int) {
            for (double v : p) {
                if (!std::isfinite(v)) finite = false;
                if (v != 0.0) nonzero = true;
            }
        });
    CHECK(finite);
    CHECK(nonzero);
}
