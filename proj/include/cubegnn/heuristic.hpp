#pragma once

// Heuristic construction: h(g) = 0 when g is the solved state, lambda *
// predicted-class otherwise. With lambda in (0, 1/26] the heuristic is
// consistent for any classifier output, because class values stay in
// [0, 26] and unit edge costs absorb the maximal step |lambda * 26| <= 1.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <unordered_map>

#include "cubegnn/cube.hpp"
#include "cubegnn/oracle.hpp"
#include "cubegnn/predict.hpp"

namespace cubegnn {

struct HeuristicConfig {
    double lambda = 1.0 / kDiameter;
    std::size_t cache_capacity = 0;  // 0 = unbounded

    void validate() const {
        if (!(lambda > 0.0) || lambda > 1.0 / kDiameter)
            throw std::invalid_argument("lambda must lie in (0, 1/26]");
    }
};

class Heuristic {
public:
    virtual ~Heuristic() = default;

    // predicted distance class of a non-goal state, in [0, 26]
    virtual int label_of(const CubeState& g) const = 0;

    // true when one evaluation is costly enough that the searcher should
    // defer it until the node is actually popped
    virtual bool prefers_lazy() const { return false; }

    double lambda() const { return lambda_; }

    double value(const CubeState& g) const {
        if (g == solved_) return 0.0;
        return lambda_ * static_cast<double>(label_of(g));
    }

protected:
    explicit Heuristic(double lambda) : lambda_(lambda), solved_(solved_state()) {
        HeuristicConfig probe{lambda, 0};
        probe.validate();
    }

private:
    double lambda_;
    CubeState solved_;
};

// Uniform-cost baseline.
class ZeroHeuristic : public Heuristic {
public:
    explicit ZeroHeuristic(double lambda = 1.0 / kDiameter) : Heuristic(lambda) {}
    int label_of(const CubeState&) const override { return 0; }
};

// GNN-backed heuristic. Predictions are memoized by StateKey; a bounded
// cache stops inserting once full (hits still return the exact value a
// miss would compute). Not safe for concurrent use; give each search its
// own instance over a shared FastPredictor.
class GnnHeuristic : public Heuristic {
public:
    GnnHeuristic(const FastPredictor& predictor, HeuristicConfig cfg = {})
        : Heuristic((cfg.validate(), cfg.lambda)),
          predictor_(&predictor),
          capacity_(cfg.cache_capacity) {}

    int label_of(const CubeState& g) const override {
        const StateKey k = encode_state(g);
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        const int y = predictor_->predict(g);
        if (capacity_ == 0 || cache_.size() < capacity_)
            cache_.emplace(k, static_cast<std::uint8_t>(y));
        return y;
    }

    bool prefers_lazy() const override { return true; }

    std::size_t cache_size() const { return cache_.size(); }

private:
    const FastPredictor* predictor_;
    std::size_t capacity_;
    mutable std::unordered_map<StateKey, std::uint8_t, StateKeyHash> cache_;
};

// Oracle-capped baseline: the exact distance clamped at depth_cap + 1 for
// states beyond the table. Clamping a consistent metric keeps consistency.
class OracleHeuristic : public Heuristic {
public:
    OracleHeuristic(const DistanceTable& table, double lambda = 1.0 / kDiameter)
        : Heuristic(lambda), table_(&table) {}

    int label_of(const CubeState& g) const override {
        auto d = table_->lookup(g);
        return d ? *d : table_->depth_cap + 1;
    }

private:
    const DistanceTable* table_;
};

}  // namespace cubegnn
