#include <catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "cubegnn/bench.hpp"
#include "cubegnn/cube.hpp"
#include "cubegnn/gnn.hpp"
#include "cubegnn/oracle.hpp"

using namespace cubegnn;

namespace {

// strips the trailing wall_s field from a csv data row
std::string drop_wall_column(const std::string& line) {
    const auto pos = line.rfind(',');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#' && line.find("instance,") != 0)
            rows.push_back(drop_wall_column(line));
    return rows;
}

}  // namespace

TEST_CASE("scramble generation is seeded and well formed", "[bench]") {
    const auto one = make_scramble(1, 5);
    CHECK(one.size() == 1);
    const auto a = make_scramble(7, 42);
    const auto b = make_scramble(7, 42);
    const auto c = make_scramble(7, 43);
    REQUIRE(a.size() == 7);
    bool same = true, diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same = same && a[i] == b[i];
        diff = diff || !(a[i] == c[i]);
    }
    CHECK(same);
    CHECK(diff);
    for (Move m : a) {
        CHECK(m.index() >= 0);
        CHECK(m.index() < 12);
    }
    CHECK_THROWS_AS(make_scramble(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_scramble(27, 1), std::invalid_argument);
}

TEST_CASE("bench config validation", "[bench]") {
    BenchConfig bad;
    bad.num_instances = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = BenchConfig{};
    bad.scramble_min = 6;
    bad.scramble_max = 5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = BenchConfig{};
    bad.scramble_max = 27;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = BenchConfig{};
    bad.lambda = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK_THROWS_AS(run_bench(BenchConfig{}, nullptr, nullptr), std::invalid_argument);
}

TEST_CASE("bench scramble lengths stay in range and are deterministic", "[bench]") {
    BenchConfig cfg;
    cfg.num_instances = 40;
    cfg.scramble_min = 5;
    cfg.scramble_max = 7;
    cfg.rng_seed = 9;
    const auto a = bench_scrambles(cfg);
    const auto b = bench_scrambles(cfg);
    REQUIRE(a.size() == 40);
    bool seen[8] = {};
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].size() >= 5);
        REQUIRE(a[i].size() <= 7);
        seen[a[i].size()] = true;
        REQUIRE(a[i].size() == b[i].size());
        for (std::size_t k = 0; k < a[i].size(); ++k) CHECK(a[i][k] == b[i][k]);
    }
    CHECK(seen[5]);
    CHECK(seen[6]);
    CHECK(seen[7]);
}

TEST_CASE("single trivial instance produces one optimal row", "[bench]") {
    const DistanceTable oracle = bfs_distances(2);
    BenchConfig cfg;
    cfg.num_instances = 1;
    cfg.scramble_min = 1;
    cfg.scramble_max = 1;
    cfg.rng_seed = 3;
    cfg.heuristic = HeuristicKind::zero;
    const BenchReport rep = run_bench(cfg, nullptr, &oracle);
    REQUIRE(rep.rows.size() == 1);
    const BenchRow& r = rep.rows[0];
    CHECK(r.solved);
    CHECK(r.replay_ok);
    CHECK(r.optimal);
    CHECK(r.optimal_len == 1);
    CHECK(r.solution_len == 1);
    CHECK(r.scramble_len == 1);
}

TEST_CASE("gnn bench yields oracle-exact rows with correct aggregates", "[bench]") {
    const DistanceTable oracle = bfs_distances(4);
    const GnnModel model = GnnModel::random_init(777, kInputDim, 16);
    BenchConfig cfg;
    cfg.num_instances = 6;
    cfg.scramble_min = 3;
    cfg.scramble_max = 4;
    cfg.rng_seed = 21;
    cfg.heuristic = HeuristicKind::gnn;
    const BenchReport rep = run_bench(cfg, &model, &oracle);
    REQUIRE(rep.rows.size() == 6);

    double sum_len = 0.0, sum_exp = 0.0;
    for (int i = 0; i < 6; ++i) {
        const BenchRow& r = rep.rows[static_cast<std::size_t>(i)];
        CHECK(r.instance == i);  // ordered by index
        CHECK(r.solved);
        CHECK(r.replay_ok);
        CHECK(r.optimal);
        CHECK(r.solution_len == r.optimal_len);
        sum_len += r.solution_len;
        sum_exp += static_cast<double>(r.expanded);
    }
    CHECK(rep.mean_solution_len() == Catch::Approx(sum_len / 6.0).margin(1e-12));
    CHECK(rep.mean_expanded() == Catch::Approx(sum_exp / 6.0).margin(1e-12));
    CHECK(rep.all_optimal());
    CHECK(rep.solved_count() == 6);
}

TEST_CASE("zero and oracle heuristics run the same instance set", "[bench]") {
    const DistanceTable oracle = bfs_distances(4);
    BenchConfig cfg;
    cfg.num_instances = 5;
    cfg.scramble_min = 3;
    cfg.scramble_max = 4;
    cfg.rng_seed = 33;
    cfg.heuristic = HeuristicKind::zero;
    const BenchReport zero = run_bench(cfg, nullptr, &oracle);
    cfg.heuristic = HeuristicKind::oracle_capped;
    const BenchReport orc = run_bench(cfg, nullptr, &oracle);
    REQUIRE(zero.rows.size() == orc.rows.size());
    for (std::size_t i = 0; i < zero.rows.size(); ++i) {
        CHECK(zero.rows[i].scramble == orc.rows[i].scramble);
        CHECK(zero.rows[i].solution_len == orc.rows[i].solution_len);
        CHECK(zero.rows[i].optimal);
        CHECK(orc.rows[i].optimal);
        // the exact-distance heuristic is at least as informed
        CHECK(orc.rows[i].expanded <= zero.rows[i].expanded);
    }
}

TEST_CASE("csv report is stable apart from wall time", "[bench]") {
    const DistanceTable oracle = bfs_distances(3);
    const GnnModel model = GnnModel::random_init(50, kInputDim, 16);
    BenchConfig cfg;
    cfg.num_instances = 4;
    cfg.scramble_min = 2;
    cfg.scramble_max = 3;
    cfg.rng_seed = 8;
    cfg.heuristic = HeuristicKind::gnn;

    std::ostringstream a, b;
    write_report_csv(run_bench(cfg, &model, &oracle), a);
    write_report_csv(run_bench(cfg, &model, &oracle), b);

    const std::string sa = a.str();
    CHECK(sa.find("# cubegnn-bench seed=8") != std::string::npos);
    CHECK(sa.find("instance,scramble,scramble_len,solution,") != std::string::npos);
    CHECK(sa.find("# aggregate mean_solution_len=") != std::string::npos);

    const auto ra = data_rows(sa), rb = data_rows(b.str());
    REQUIRE(ra.size() == 4);
    CHECK(ra == rb);
}

TEST_CASE("threaded bench matches the single-threaded rows", "[bench]") {
    const DistanceTable oracle = bfs_distances(3);
    BenchConfig cfg;
    cfg.num_instances = 8;
    cfg.scramble_min = 2;
    cfg.scramble_max = 3;
    cfg.rng_seed = 14;
    cfg.heuristic = HeuristicKind::zero;
    const BenchReport seq = run_bench(cfg, nullptr, &oracle);
    cfg.threads = 3;
    const BenchReport par = run_bench(cfg, nullptr, &oracle);
    REQUIRE(seq.rows.size() == par.rows.size());
    for (std::size_t i = 0; i < seq.rows.size(); ++i) {
        CHECK(seq.rows[i].scramble == par.rows[i].scramble);
        CHECK(seq.rows[i].solution == par.rows[i].solution);
        CHECK(seq.rows[i].expanded == par.rows[i].expanded);
        CHECK(seq.rows[i].optimal == par.rows[i].optimal);
    }
}

TEST_CASE("budget failures surface as unsolved rows", "[bench]") {
    BenchConfig cfg;
    cfg.num_instances = 2;
    cfg.scramble_min = 5;
    cfg.scramble_max = 5;
    cfg.rng_seed = 19;
    cfg.heuristic = HeuristicKind::zero;
    cfg.node_budget = 2;
    const BenchReport rep = run_bench(cfg, nullptr, nullptr);
    CHECK(rep.solved_count() == 0);
    for (const auto& r : rep.rows) {
        CHECK_FALSE(r.solved);
        CHECK_FALSE(r.optimal);
        CHECK(r.expanded <= 2);
    }
}
