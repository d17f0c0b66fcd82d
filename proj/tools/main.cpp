// cubegnn command-line driver: scramble / walk / train / solve / bench /
// oracle subcommands wiring the library end to end. All randomness flows
// from explicit --seed flags.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cubegnn/bench.hpp"
#include "cubegnn/cube.hpp"
#include "cubegnn/gnn.hpp"
#include "cubegnn/heuristic.hpp"
#include "cubegnn/oracle.hpp"
#include "cubegnn/predict.hpp"
#include "cubegnn/search.hpp"
#include "cubegnn/walk.hpp"

namespace {

using namespace cubegnn;

int cmd_scramble(int length, std::uint64_t seed) {
    std::cout << scramble_to_string(make_scramble(length, seed)) << "\n";
    return 0;
}

int cmd_walk(const WalkConfig& cfg, const std::string& out_path) {
    TrainGraph gr = run_walks(cfg);
    save_graph(gr, out_path, cfg);
    std::cout << "walks: " << cfg.num_walks << " x length " << cfg.walk_length
              << " (seed " << cfg.rng_seed << ")\n"
              << "nodes: " << gr.size() << "\nedges: " << gr.edges.size() << "\n"
              << "wrote " << out_path << "\n";
    return 0;
}

int cmd_train(const std::string& data_path, const TrainConfig& cfg, int hidden_dim,
              const std::string& model_out, const std::string& loss_csv) {
    TrainGraph tg = load_graph(data_path);
    GnnGraph g = gnn_graph_from(tg);
    std::cout << "dataset: " << g.size() << " nodes, " << tg.edges.size() << " edges\n";

    GnnModel model = GnnModel::random_init(cfg.rng_seed, kInputDim, hidden_dim,
                                           kNumClasses, cfg.weight_init_scale);
    std::vector<double> trace = train(model, g, cfg);
    save_model(model, model_out);

    if (!loss_csv.empty()) {
        std::ofstream out(loss_csv);
        if (!out) throw std::runtime_error("cannot open for writing: " + loss_csv);
        out << "epoch,loss\n" << std::setprecision(17);
        for (std::size_t e = 0; e < trace.size(); ++e) out << e << ',' << trace[e] << '\n';
    }
    std::cout << "loss: " << trace.front() << " -> " << trace.back() << " over "
              << cfg.epochs << " epochs\n"
              << "train accuracy: " << train_accuracy(model, g) << "\n"
              << "wrote " << model_out << "\n";
    return 0;
}

int cmd_solve(const std::string& scramble, const std::string& model_path, double lambda,
              std::uint64_t budget, int oracle_depth) {
    const std::vector<Move> moves = parse_scramble(scramble);
    const CubeState start = apply_moves(solved_state(), moves);

    GnnModel model = load_model(model_path);
    FastPredictor predictor(model);
    GnnHeuristic h(predictor, HeuristicConfig{lambda, 0});
    SearchLimits limits;
    limits.node_budget = budget;
    if (!moves.empty()) limits.f_bound = static_cast<double>(moves.size());

    const SearchResult res = astar(start, h, limits);
    if (!res.solved) {
        std::cout << "unsolved: node budget of " << budget << " expansions exhausted ("
                  << res.expanded_nodes << " expanded)\n";
        return 1;
    }
    std::cout << "solution: " << scramble_to_string(res.path) << "\n"
              << "length: " << res.path.size() << "\n"
              << "expanded nodes: " << res.expanded_nodes << "\n"
              << "heuristic evals: " << res.heuristic_evals << "\n"
              << "search time: " << res.wall_time << " s\n";
    if (apply_moves(start, res.path) != solved_state()) {
        std::cout << "replay check FAILED\n";
        return 1;
    }
    if (oracle_depth > 0) {
        DistanceTable t = bfs_distances(oracle_depth);
        auto d0 = t.lookup(start);
        if (d0)
            std::cout << "oracle distance: " << *d0
                      << (static_cast<int>(res.path.size()) == *d0 ? " (optimal)\n"
                                                                   : " (NOT optimal)\n");
        else
            std::cout << "oracle distance: beyond depth " << oracle_depth << "\n";
    }
    return 0;
}

int cmd_bench(BenchConfig cfg, const std::string& model_path, int oracle_depth,
              const std::string& out_path) {
    std::optional<GnnModel> model;
    if (cfg.heuristic == HeuristicKind::gnn) model = load_model(model_path);

    std::optional<DistanceTable> oracle;
    if (oracle_depth > 0) {
        std::cout << "building BFS oracle to depth " << oracle_depth << "...\n";
        oracle = bfs_distances(oracle_depth);
    }

    BenchReport rep = run_bench(cfg, model ? &*model : nullptr, oracle ? &*oracle : nullptr);
    if (out_path.empty()) {
        write_report_csv(rep, std::cout);
    } else {
        write_report_csv(rep, out_path);
        std::cout << "wrote " << out_path << "\n";
    }
    std::cout << "mean solution length: " << rep.mean_solution_len() << "\n"
              << "mean expanded nodes: " << rep.mean_expanded() << "\n"
              << "mean search time: " << rep.mean_wall_s() << " s\n"
              << "solved: " << rep.solved_count() << "/" << rep.rows.size() << "\n";
    return rep.solved_count() == static_cast<int>(rep.rows.size()) ? 0 : 1;
}

int cmd_oracle(int depth, const std::string& out_path) {
    DistanceTable t = bfs_distances(depth);
    if (out_path.empty()) {
        dump_layer_counts(t, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
        dump_layer_counts(t, out);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rubik's cube GNN-heuristic solver toolkit"};
    app.require_subcommand(1);

    // scramble
    int scr_length = 7;
    std::uint64_t scr_seed = 0;
    auto* scr = app.add_subcommand("scramble", "print a random scramble");
    scr->add_option("--length", scr_length, "number of moves")->check(CLI::Range(1, 26));
    scr->add_option("--seed", scr_seed, "rng seed");

    // walk
    WalkConfig wcfg;
    std::string walk_out = "walks.txt";
    auto* wk = app.add_subcommand("walk", "sample the training subgraph by random walks");
    wk->add_option("--num-walks", wcfg.num_walks, "number of walks K")->required();
    wk->add_option("--walk-length", wcfg.walk_length, "steps per walk l")
        ->check(CLI::Range(1, 26));
    wk->add_option("--seed", wcfg.rng_seed, "rng seed");
    wk->add_option("--out", walk_out, "dataset output path");

    // train
    TrainConfig tcfg;
    int hidden_dim = kDefaultHiddenDim;
    std::string train_data, model_out = "model.txt", loss_csv;
    auto* tr = app.add_subcommand("train", "train the classifier on a walk dataset");
    tr->add_option("--data", train_data, "walk dataset path")->required();
    tr->add_option("--epochs", tcfg.epochs, "gradient-descent epochs");
    tr->add_option("--learning-rate", tcfg.learning_rate, "step size");
    tr->add_option("--seed", tcfg.rng_seed, "init rng seed");
    tr->add_option("--init-scale", tcfg.weight_init_scale, "weight init scale");
    tr->add_option("--hidden", hidden_dim, "hidden layer width");
    tr->add_option("--out", model_out, "checkpoint output path");
    tr->add_option("--loss-csv", loss_csv, "optional per-epoch loss csv");

    // solve
    std::string solve_scramble, solve_model = "model.txt";
    double solve_lambda = 1.0 / 26.0;
    std::uint64_t solve_budget = 1'000'000;
    int solve_oracle_depth = 0;
    auto* sv = app.add_subcommand("solve", "solve one scrambled cube with A*");
    sv->add_option("--scramble", solve_scramble, "Singmaster scramble string")->required();
    sv->add_option("--model", solve_model, "model checkpoint");
    sv->add_option("--lambda", solve_lambda, "heuristic scale in (0, 1/26]");
    sv->add_option("--budget", solve_budget, "expansion budget");
    sv->add_option("--oracle-depth", solve_oracle_depth,
                   "verify optimality against a BFS oracle of this depth (0 = off)")
        ->check(CLI::Range(0, 7));

    // bench
    BenchConfig bcfg;
    std::string bench_model = "model.txt", bench_out, bench_heur = "gnn";
    int bench_oracle_depth = 0;
    auto* bn = app.add_subcommand("bench", "run the benchmark instance set");
    bn->add_option("--instances", bcfg.num_instances, "number of test instances");
    bn->add_option("--scramble-min", bcfg.scramble_min, "min scramble length");
    bn->add_option("--scramble-max", bcfg.scramble_max, "max scramble length");
    bn->add_option("--seed", bcfg.rng_seed, "instance rng seed");
    bn->add_option("--heuristic", bench_heur, "gnn | zero | oracle");
    bn->add_option("--lambda", bcfg.lambda, "heuristic scale in (0, 1/26]");
    bn->add_option("--budget", bcfg.node_budget, "expansion budget per instance");
    bn->add_option("--threads", bcfg.threads, "parallel instances");
    bn->add_option("--model", bench_model, "model checkpoint (gnn heuristic)");
    bn->add_option("--oracle-depth", bench_oracle_depth,
                   "BFS oracle depth for optimality flags / oracle heuristic (0 = off)")
        ->check(CLI::Range(0, 7));
    bn->add_option("--out", bench_out, "report csv path (default: stdout)");

    // oracle
    int oracle_depth = 4;
    std::string oracle_out;
    auto* oc = app.add_subcommand("oracle", "layer counts of the BFS distance oracle");
    oc->add_option("--depth", oracle_depth, "BFS depth cap")->check(CLI::Range(0, 7));
    oc->add_option("--out", oracle_out, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scr->parsed()) return cmd_scramble(scr_length, scr_seed);
        if (wk->parsed()) return cmd_walk(wcfg, walk_out);
        if (tr->parsed()) return cmd_train(train_data, tcfg, hidden_dim, model_out, loss_csv);
        if (sv->parsed())
            return cmd_solve(solve_scramble, solve_model, solve_lambda, solve_budget,
                             solve_oracle_depth);
        if (bn->parsed()) {
            if (bench_heur == "gnn") bcfg.heuristic = HeuristicKind::gnn;
            else if (bench_heur == "zero") bcfg.heuristic = HeuristicKind::zero;
            else if (bench_heur == "oracle") bcfg.heuristic = HeuristicKind::oracle_capped;
            else throw std::invalid_argument("unknown heuristic: " + bench_heur);
            if (bcfg.heuristic == HeuristicKind::oracle_capped && bench_oracle_depth == 0)
                throw std::invalid_argument("--heuristic oracle needs --oracle-depth >= 1");
            return cmd_bench(bcfg, bench_model, bench_oracle_depth, bench_out);
        }
        if (oc->parsed()) return cmd_oracle(oracle_depth, oracle_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
