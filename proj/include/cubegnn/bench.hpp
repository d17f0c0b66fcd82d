#pragma once

// Benchmark harness: scramble generation, per-instance search runs with
// independent replay verification, optimality flags against the BFS
// oracle, and a CSV report. Instances may run on a thread pool; rows are
// stored by instance index so the report content does not depend on
// scheduling (only the wall-time fields vary between runs).

#include <atomic>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cubegnn/cube.hpp"
#include "cubegnn/detail/rng.hpp"
#include "cubegnn/heuristic.hpp"
#include "cubegnn/oracle.hpp"
#include "cubegnn/predict.hpp"
#include "cubegnn/search.hpp"

namespace cubegnn {

enum class HeuristicKind { gnn, zero, oracle_capped };

inline const char* heuristic_kind_name(HeuristicKind k) {
    switch (k) {
        case HeuristicKind::gnn: return "gnn";
        case HeuristicKind::zero: return "zero";
        case HeuristicKind::oracle_capped: return "oracle";
    }
    return "?";
}

struct BenchConfig {
    int num_instances = 100;
    int scramble_min = 5;
    int scramble_max = 7;
    std::uint64_t rng_seed = 0;
    HeuristicKind heuristic = HeuristicKind::gnn;
    double lambda = 1.0 / kDiameter;
    std::uint64_t node_budget = 1'000'000;
    int threads = 1;

    void validate() const {
        if (num_instances < 1) throw std::invalid_argument("num_instances must be >= 1");
        if (scramble_min < 1 || scramble_min > scramble_max || scramble_max > kDiameter)
            throw std::invalid_argument("need 1 <= scramble_min <= scramble_max <= 26");
        if (threads < 1) throw std::invalid_argument("threads must be >= 1");
        HeuristicConfig{lambda, 0}.validate();
    }
};

// Uniform random move sequence of exactly `length` tokens.
inline std::vector<Move> make_scramble(int length, std::uint64_t seed) {
    if (length < 1 || length > kDiameter)
        throw std::invalid_argument("scramble length must be in [1, 26]");
    detail::SplitMix64 rng(mix64(seed ^ 0x5c29a3b1u));
    std::vector<Move> out;
    out.reserve(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) out.push_back(detail::random_move(rng));
    return out;
}

struct BenchRow {
    int instance = 0;
    std::string scramble;
    int scramble_len = 0;
    std::string solution;
    int solution_len = 0;
    int optimal_len = -1;  // -1 when no oracle was supplied
    bool optimal = false;
    std::uint64_t expanded = 0;
    bool solved = false;
    bool replay_ok = false;
    double wall_s = 0.0;
};

struct BenchReport {
    BenchConfig config;
    std::vector<BenchRow> rows;

    int solved_count() const {
        int n = 0;
        for (const auto& r : rows) n += r.solved ? 1 : 0;
        return n;
    }
    double mean_solution_len() const {
        double s = 0.0;
        for (const auto& r : rows) s += r.solution_len;
        return s / static_cast<double>(rows.size());
    }
    double mean_expanded() const {
        double s = 0.0;
        for (const auto& r : rows) s += static_cast<double>(r.expanded);
        return s / static_cast<double>(rows.size());
    }
    double mean_wall_s() const {
        double s = 0.0;
        for (const auto& r : rows) s += r.wall_s;
        return s / static_cast<double>(rows.size());
    }
    bool all_optimal() const {
        for (const auto& r : rows)
            if (!r.solved || !r.optimal) return false;
        return true;
    }
};

// The per-instance scrambles of a bench run, deterministic in the seed.
inline std::vector<std::vector<Move>> bench_scrambles(const BenchConfig& cfg) {
    cfg.validate();
    std::vector<std::vector<Move>> out;
    out.reserve(static_cast<std::size_t>(cfg.num_instances));
    const int span = cfg.scramble_max - cfg.scramble_min + 1;
    for (int i = 0; i < cfg.num_instances; ++i) {
        const std::uint64_t s = detail::substream_seed(cfg.rng_seed, static_cast<std::uint64_t>(i));
        detail::SplitMix64 rng(s);
        const int len = cfg.scramble_min + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(span)));
        std::vector<Move> scr;
        scr.reserve(static_cast<std::size_t>(len));
        for (int k = 0; k < len; ++k) scr.push_back(detail::random_move(rng));
        out.push_back(std::move(scr));
    }
    return out;
}

// Runs the full instance set. `model` is required for the gnn heuristic,
// `oracle` for the oracle-capped heuristic and for optimality flags.
inline BenchReport run_bench(const BenchConfig& cfg, const GnnModel* model,
                             const DistanceTable* oracle) {
    cfg.validate();
    if (cfg.heuristic == HeuristicKind::gnn && !model)
        throw std::invalid_argument("gnn heuristic needs a model");
    if (cfg.heuristic == HeuristicKind::oracle_capped && !oracle)
        throw std::invalid_argument("oracle-capped heuristic needs a distance table");

    std::optional<FastPredictor> predictor;
    if (cfg.heuristic == HeuristicKind::gnn) predictor.emplace(*model);

    const std::vector<std::vector<Move>> scrambles = bench_scrambles(cfg);
    BenchReport report;
    report.config = cfg;
    report.rows.resize(static_cast<std::size_t>(cfg.num_instances));

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.num_instances) return;
            const std::vector<Move>& scr = scrambles[static_cast<std::size_t>(i)];
            const CubeState start = apply_moves(solved_state(), scr);

            std::unique_ptr<Heuristic> h;
            switch (cfg.heuristic) {
                case HeuristicKind::gnn:
                    h = std::make_unique<GnnHeuristic>(
                        *predictor, HeuristicConfig{cfg.lambda, 0});
                    break;
                case HeuristicKind::zero:
                    h = std::make_unique<ZeroHeuristic>(cfg.lambda);
                    break;
                case HeuristicKind::oracle_capped:
                    h = std::make_unique<OracleHeuristic>(*oracle, cfg.lambda);
                    break;
            }
            SearchLimits limits;
            limits.node_budget = cfg.node_budget;
            limits.f_bound = static_cast<double>(scr.size());
            const SearchResult sr = astar(start, *h, limits);

            BenchRow row;
            row.instance = i;
            row.scramble = scramble_to_string(scr);
            row.scramble_len = static_cast<int>(scr.size());
            row.solution = scramble_to_string(sr.path);
            row.solution_len = static_cast<int>(sr.path.size());
            row.expanded = sr.expanded_nodes;
            row.solved = sr.solved;
            row.wall_s = sr.wall_time;
            // re-verify the solution independently of the searcher
            row.replay_ok = sr.solved && apply_moves(start, sr.path) == solved_state();
            if (oracle) {
                auto d0 = oracle->lookup(start);
                if (d0) {
                    row.optimal_len = *d0;
                    row.optimal = sr.solved && row.solution_len == *d0;
                }
            }
            report.rows[static_cast<std::size_t>(i)] = std::move(row);
        }
    };

    if (cfg.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return report;
}

// CSV: config comment, header, one row per instance, aggregate footer.
// wall_s is the final column; every other field is run-to-run identical
// for a fixed seed and config.
inline void write_report_csv(const BenchReport& rep, std::ostream& out) {
    const BenchConfig& c = rep.config;
    out << "# cubegnn-bench seed=" << c.rng_seed << " instances=" << c.num_instances
        << " scramble=" << c.scramble_min << ".." << c.scramble_max
        << " heuristic=" << heuristic_kind_name(c.heuristic) << " lambda="
        << std::setprecision(17) << c.lambda << " budget=" << c.node_budget << '\n';
    out << "instance,scramble,scramble_len,solution,solution_len,optimal_len,optimal,"
           "expanded,solved,wall_s\n";
    out << std::setprecision(6) << std::fixed;
    for (const BenchRow& r : rep.rows) {
        out << r.instance << ",\"" << r.scramble << "\"," << r.scramble_len << ",\""
            << r.solution << "\"," << r.solution_len << ',' << r.optimal_len << ','
            << (r.optimal ? 1 : 0) << ',' << r.expanded << ',' << (r.solved ? 1 : 0)
            << ',' << r.wall_s << '\n';
    }
    out << "# aggregate mean_solution_len=" << rep.mean_solution_len()
        << " mean_expanded=" << rep.mean_expanded() << " mean_wall_s=" << rep.mean_wall_s()
        << " solved=" << rep.solved_count() << "/" << rep.rows.size() << '\n';
}

inline void write_report_csv(const BenchReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_report_csv(rep, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace cubegnn
