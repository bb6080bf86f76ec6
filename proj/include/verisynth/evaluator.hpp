// SPDX-License-Identifier: Apache-2.0
#ifndef VERISYNTH_EVALUATOR_HPP
#define VERISYNTH_EVALUATOR_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "verisynth/core.hpp"
#include "verisynth/strategy.hpp"

namespace verisynth {

// ─── Strategy evaluator ───────────────────────────────────────
//
// Scores a strategy against seed instances. A strategy is good when
// its ranking agrees with the human-annotated ground truth:
//
//   Criterion-1  the top-ranked solution passes the annotated suite.
//   Criterion-2  each of the top-k and bottom-k solutions behaves the
//                same on the annotated suite as on the strategy's best
//                test (pointwise agreement per solution).
//
// The proportion of satisfied instances is the strategy's score.

struct EvalConfig {
    std::size_t k = 1;
    bool use_criterion1 = true;
};

struct InstanceResult {
    std::string instance_id;
    bool criterion1 = false;
    bool criterion2 = false;
    bool satisfied = false;
    std::size_t exec_count = 0;
};

struct ConsistencyReport {
    std::vector<InstanceResult> per_instance;
    double score = 0.0;        // (# satisfied) / (# instances)
    std::size_t total_exec = 0;
};

/// The evaluator's view of one instance: the binarized generated
/// matrix plus each solution's verdict on the annotated suite. Seed
/// instances and simulated worlds both reduce to this.
struct EvalInstance {
    std::string id;
    BoolGrid grid;                         // M×N generated outcomes
    std::vector<std::uint8_t> annotated_pass;  // length M
};

/// True iff the solution passes every test of the annotated suite.
inline bool passes_annotated(const std::vector<Outcome>& annotated_row) {
    if (annotated_row.empty())
        throw std::invalid_argument("passes_annotated: empty annotated suite");
    for (const Outcome& o : annotated_row)
        if (o.verdict != Verdict::Pass) return false;
    return true;
}

inline EvalInstance to_eval_instance(const SeedInstance& seed) {
    EvalInstance inst;
    inst.id = seed.problem.id;
    inst.grid = binarize(seed.generated_matrix);
    const PassMatrix& am = seed.annotated_matrix;
    inst.annotated_pass.resize(am.rows());
    for (std::size_t i = 0; i < am.rows(); ++i) {
        std::vector<Outcome> row(am.cells.begin() + i * am.cols(),
                                 am.cells.begin() + (i + 1) * am.cols());
        inst.annotated_pass[i] = passes_annotated(row) ? 1 : 0;
    }
    return inst;
}

inline bool criterion1(const StrategyOutput& output, const EvalInstance& inst) {
    return inst.annotated_pass[output.solution_ranking.front()] != 0;
}

inline bool criterion2(const StrategyOutput& output, const EvalInstance& inst, std::size_t k) {
    const std::size_t m = inst.grid.m;
    if (2 * k > m) throw std::invalid_argument("criterion2: 2k exceeds M");
    const std::size_t best_test = output.test_ranking.front();
    for (std::size_t r = 0; r < 2 * k; ++r) {
        const std::size_t pos = r < k ? r : m - 2 * k + r;  // top-k then bottom-k
        const std::size_t s = output.solution_ranking[pos];
        const bool on_annotated = inst.annotated_pass[s] != 0;
        const bool on_best_test = inst.grid.at(s, best_test);
        if (on_annotated != on_best_test) return false;
    }
    return true;
}

/// Each extreme solution is charged one annotated-suite evaluation and
/// one best-test evaluation: 4k logical executions per instance, the
/// same for k=1 (4) through k=8 (32), independent of Criterion-1.
inline std::size_t exec_count_per_instance(std::size_t k) { return 4 * k; }

inline ConsistencyReport consistency_score(const Strategy& strategy,
                                           std::span<const EvalInstance> instances,
                                           const EvalConfig& config) {
    if (instances.empty())
        throw std::invalid_argument("consistency_score: empty seed set");
    ConsistencyReport report;
    std::size_t satisfied = 0;
    for (const EvalInstance& inst : instances) {
        if (2 * config.k > inst.grid.m)
            throw std::invalid_argument("consistency_score: 2k exceeds M for instance " + inst.id);
        InstanceResult r;
        r.instance_id = inst.id;
        r.exec_count = exec_count_per_instance(config.k);
        try {
            const StrategyOutput out = apply(strategy, inst.grid);
            r.criterion1 = criterion1(out, inst);
            r.criterion2 = criterion2(out, inst, config.k);
            r.satisfied = r.criterion2 && (!config.use_criterion1 || r.criterion1);
        } catch (const StrategyFault&) {
            // Buggy strategies lose the instance instead of halting
            // the evaluation.
            r.criterion1 = false;
            r.criterion2 = false;
            r.satisfied = false;
        }
        if (r.satisfied) ++satisfied;
        report.total_exec += r.exec_count;
        report.per_instance.push_back(std::move(r));
    }
    report.score = static_cast<double>(satisfied) / static_cast<double>(instances.size());
    return report;
}

inline ConsistencyReport consistency_score(const Strategy& strategy,
                                           const std::vector<SeedInstance>& seeds,
                                           const EvalConfig& config) {
    std::vector<EvalInstance> instances;
    instances.reserve(seeds.size());
    for (const SeedInstance& s : seeds) instances.push_back(to_eval_instance(s));
    return consistency_score(strategy, std::span<const EvalInstance>(instances), config);
}

}  // namespace verisynth

#endif  // VERISYNTH_EVALUATOR_HPP
