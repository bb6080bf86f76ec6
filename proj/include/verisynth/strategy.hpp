// SPDX-License-Identifier: Apache-2.0
#ifndef VERISYNTH_STRATEGY_HPP
#define VERISYNTH_STRATEGY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "verisynth/core.hpp"

namespace verisynth {

// ─── Scoring DSL ──────────────────────────────────────────────
//
// A filtering strategy is a pair of expressions over a boolean pass
// matrix: one evaluated per solution (row), one per test (column).
// The node set is small enough to make random offspring total and
// safe, yet expressive enough to cover the six built-in strategies.
//
// Evaluation semantics per axis (B is the M×N grid, p_j the column
// pass count, row_i the row pass count):
//
//   RowPassCount        row axis: row_i.  test axis: mean of all row_i.
//   ColPassCount        test axis: p_j.   row axis: mean of all p_j.
//   Const(c)            c everywhere.
//   Normalize(u)        min-max of u's values along the current axis;
//                       all-equal values map to 0.5.
//   MeanOverPassers(u)  test axis: mean of u (evaluated per row) over
//                       the solutions passing this test; exactly 0 when
//                       the test has no passers or no failers, so
//                       all-or-none tests carry no ranking signal.
//                       row axis: symmetric over the tests this
//                       solution passes.
//   MeanOverFailers(u)  same, over the failing group.
//   IdfWeight           test axis: ln((M+1)/(1+p_j)).
//                       row axis: Σ idf over tests the row passes.
//   StrictnessWeight    test axis: 1 − p_j/M when 0 < p_j < M, else 0.
//                       row axis: Σ strictness over tests passed.
//   ExcludeSelfConsensus
//                       test axis: among solutions that pass every
//                       other test, passers-of-this-test minus failers;
//                       0 when N == 1. row axis: row_i.
//   Add/Sub/Mul/Neg     pointwise arithmetic.

enum class NodeKind {
    RowPassCount,
    ColPassCount,
    Const,
    Normalize,
    MeanOverPassers,
    MeanOverFailers,
    Sub,
    Add,
    Mul,
    IdfWeight,
    StrictnessWeight,
    ExcludeSelfConsensus,
    Neg,
};

inline int arity(NodeKind k) {
    switch (k) {
        case NodeKind::Sub:
        case NodeKind::Add:
        case NodeKind::Mul: return 2;
        case NodeKind::Normalize:
        case NodeKind::MeanOverPassers:
        case NodeKind::MeanOverFailers:
        case NodeKind::Neg: return 1;
        default: return 0;
    }
}

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::RowPassCount: return "RowPassCount";
        case NodeKind::ColPassCount: return "ColPassCount";
        case NodeKind::Const: return "Const";
        case NodeKind::Normalize: return "Normalize";
        case NodeKind::MeanOverPassers: return "MeanOverPassers";
        case NodeKind::MeanOverFailers: return "MeanOverFailers";
        case NodeKind::Sub: return "Sub";
        case NodeKind::Add: return "Add";
        case NodeKind::Mul: return "Mul";
        case NodeKind::IdfWeight: return "IdfWeight";
        case NodeKind::StrictnessWeight: return "StrictnessWeight";
        case NodeKind::ExcludeSelfConsensus: return "ExcludeSelfConsensus";
        case NodeKind::Neg: return "Neg";
    }
    return "Const";
}

struct Expr {
    NodeKind kind = NodeKind::Const;
    double value = 0.0;  // meaningful for Const only
    std::vector<Expr> children;

    Expr() = default;
    explicit Expr(NodeKind k) : kind(k) {}
    Expr(NodeKind k, std::vector<Expr> ch) : kind(k), children(std::move(ch)) {}
    static Expr constant(double c) {
        Expr e(NodeKind::Const);
        e.value = c;
        return e;
    }

    bool operator==(const Expr& o) const {
        return kind == o.kind && value == o.value && children == o.children;
    }
};

constexpr std::size_t kMaxExprDepth = 12;
constexpr std::size_t kMaxExprNodes = 64;

inline std::size_t node_count(const Expr& e) {
    std::size_t n = 1;
    for (const Expr& c : e.children) n += node_count(c);
    return n;
}

inline std::size_t depth(const Expr& e) {
    std::size_t d = 0;
    for (const Expr& c : e.children) d = std::max(d, depth(c));
    return d + 1;
}

/// Arity and size check; throws std::invalid_argument on violation.
inline void type_check(const Expr& e) {
    if (static_cast<int>(e.children.size()) != arity(e.kind))
        throw std::invalid_argument(std::string("expr: wrong arity for ") + to_string(e.kind));
    if (e.kind == NodeKind::Const && !std::isfinite(e.value))
        throw std::invalid_argument("expr: non-finite constant");
    for (const Expr& c : e.children) type_check(c);
}

inline bool well_formed(const Expr& e) {
    try {
        type_check(e);
    } catch (const std::invalid_argument&) {
        return false;
    }
    return node_count(e) <= kMaxExprNodes && depth(e) <= kMaxExprDepth;
}

/// Solution-ranking tie rule. Every strategy breaks score ties by
/// ascending index; hardness-aware additionally prefers the higher raw
/// pass count before falling back to the index.
enum class TieBreak { Index, PassCountThenIndex };

struct Strategy {
    std::string name;
    Expr expr_solution;
    Expr expr_test;
    std::map<std::string, std::string> meta;  // provenance: generation, parent ids
    TieBreak solution_tie_break = TieBreak::Index;
};

/// Scores plus induced rankings. Rankings sort scores descending;
/// best = ranking[0], worst = ranking back().
struct StrategyOutput {
    std::vector<double> solution_scores;   // length M
    std::vector<double> test_scores;       // length N
    std::vector<std::size_t> solution_ranking;  // permutation of [0, M)
    std::vector<std::size_t> test_ranking;      // permutation of [0, N)
};

/// Thrown when a strategy produces a non-finite score. Callers treat
/// the strategy as buggy rather than aborting whole runs.
class StrategyFault : public std::runtime_error {
public:
    explicit StrategyFault(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

enum class Axis { Solution, Test };

/// Per-matrix quantities shared by the leaf nodes.
struct GridStats {
    std::vector<double> row_counts;  // length M
    std::vector<double> col_counts;  // length N
    double row_mean = 0.0;
    double col_mean = 0.0;
    std::vector<double> idf;         // per test
    std::vector<double> strictness;  // per test
    std::vector<double> exclusion;   // per test

    explicit GridStats(const BoolGrid& g) {
        const double m = static_cast<double>(g.m);
        row_counts.assign(g.m, 0.0);
        col_counts.assign(g.n, 0.0);
        for (std::size_t i = 0; i < g.m; ++i)
            for (std::size_t j = 0; j < g.n; ++j)
                if (g.at(i, j)) {
                    row_counts[i] += 1.0;
                    col_counts[j] += 1.0;
                }
        row_mean = g.m ? std::accumulate(row_counts.begin(), row_counts.end(), 0.0) / g.m : 0.0;
        col_mean = g.n ? std::accumulate(col_counts.begin(), col_counts.end(), 0.0) / g.n : 0.0;

        idf.resize(g.n);
        strictness.resize(g.n);
        for (std::size_t j = 0; j < g.n; ++j) {
            idf[j] = std::log((m + 1.0) / (1.0 + col_counts[j]));
            strictness[j] =
                (col_counts[j] > 0.0 && col_counts[j] < m) ? 1.0 - col_counts[j] / m : 0.0;
        }

        // Exclusion: S_j = solutions passing every test but j; score is
        // |S_j passing j| − |S_j failing j|. Pinned to 0 when N == 1.
        exclusion.assign(g.n, 0.0);
        if (g.n >= 2) {
            for (std::size_t j = 0; j < g.n; ++j) {
                double score = 0.0;
                for (std::size_t i = 0; i < g.m; ++i) {
                    bool passes_rest = true;
                    for (std::size_t t = 0; t < g.n && passes_rest; ++t)
                        if (t != j && !g.at(i, t)) passes_rest = false;
                    if (passes_rest) score += g.at(i, j) ? 1.0 : -1.0;
                }
                exclusion[j] = score;
            }
        }
    }
};

inline std::vector<double> minmax_normalize(std::vector<double> v) {
    if (v.empty()) return v;
    auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo) {
        std::fill(v.begin(), v.end(), 0.5);
        return v;
    }
    for (double& x : v) x = (x - lo) / (hi - lo);
    return v;
}

inline std::vector<double> evaluate_axis(const Expr& e, const BoolGrid& g, const GridStats& st,
                                         Axis axis);

/// Group mean with the all-or-none guard: a test (or solution) whose
/// passer or failer group is empty scores exactly 0.
inline std::vector<double> group_mean(const Expr& child, const BoolGrid& g, const GridStats& st,
                                      Axis axis, bool over_passers) {
    const Axis other = axis == Axis::Test ? Axis::Solution : Axis::Test;
    const std::vector<double> w = evaluate_axis(child, g, st, other);
    const std::size_t len = axis == Axis::Test ? g.n : g.m;
    const std::size_t olen = axis == Axis::Test ? g.m : g.n;
    std::vector<double> out(len, 0.0);
    for (std::size_t k = 0; k < len; ++k) {
        double sum = 0.0;
        std::size_t group = 0, passers = 0;
        for (std::size_t o = 0; o < olen; ++o) {
            const bool cell = axis == Axis::Test ? g.at(o, k) : g.at(k, o);
            if (cell == over_passers) {
                sum += w[o];
                ++group;
            }
            if (cell) ++passers;
        }
        const std::size_t failers = olen - passers;
        if (passers == 0 || failers == 0)
            out[k] = 0.0;
        else
            out[k] = sum / static_cast<double>(group);
    }
    return out;
}

inline std::vector<double> evaluate_axis(const Expr& e, const BoolGrid& g, const GridStats& st,
                                         Axis axis) {
    const std::size_t len = axis == Axis::Solution ? g.m : g.n;
    std::vector<double> out;
    switch (e.kind) {
        case NodeKind::RowPassCount:
            if (axis == Axis::Solution) return st.row_counts;
            out.assign(len, st.row_mean);
            return out;
        case NodeKind::ColPassCount:
            if (axis == Axis::Test) return st.col_counts;
            out.assign(len, st.col_mean);
            return out;
        case NodeKind::Const:
            out.assign(len, e.value);
            return out;
        case NodeKind::Normalize:
            return minmax_normalize(evaluate_axis(e.children[0], g, st, axis));
        case NodeKind::MeanOverPassers:
            return group_mean(e.children[0], g, st, axis, true);
        case NodeKind::MeanOverFailers:
            return group_mean(e.children[0], g, st, axis, false);
        case NodeKind::Sub:
        case NodeKind::Add:
        case NodeKind::Mul: {
            out = evaluate_axis(e.children[0], g, st, axis);
            const std::vector<double> rhs = evaluate_axis(e.children[1], g, st, axis);
            for (std::size_t k = 0; k < len; ++k) {
                if (e.kind == NodeKind::Sub) out[k] -= rhs[k];
                else if (e.kind == NodeKind::Add) out[k] += rhs[k];
                else out[k] *= rhs[k];
            }
            return out;
        }
        case NodeKind::IdfWeight:
            if (axis == Axis::Test) return st.idf;
            out.assign(len, 0.0);
            for (std::size_t i = 0; i < g.m; ++i)
                for (std::size_t j = 0; j < g.n; ++j)
                    if (g.at(i, j)) out[i] += st.idf[j];
            return out;
        case NodeKind::StrictnessWeight:
            if (axis == Axis::Test) return st.strictness;
            out.assign(len, 0.0);
            for (std::size_t i = 0; i < g.m; ++i)
                for (std::size_t j = 0; j < g.n; ++j)
                    if (g.at(i, j)) out[i] += st.strictness[j];
            return out;
        case NodeKind::ExcludeSelfConsensus:
            if (axis == Axis::Test) return st.exclusion;
            return st.row_counts;
        case NodeKind::Neg:
            out = evaluate_axis(e.children[0], g, st, axis);
            for (double& x : out) x = -x;
            return out;
    }
    out.assign(len, 0.0);
    return out;
}

/// Descending by score, ties to the lower index (stable).
inline std::vector<std::size_t> rank_descending(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

inline std::vector<std::size_t> rank_with_pass_count(const std::vector<double>& scores,
                                                     const std::vector<double>& row_counts) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return row_counts[a] > row_counts[b];
    });
    return order;
}

}  // namespace detail

/// Evaluate a strategy on a binarized grid. Throws StrategyFault when
/// any score comes out non-finite.
inline StrategyOutput apply(const Strategy& strategy, const BoolGrid& grid) {
    if (grid.m < 1 || grid.n < 1)
        throw std::invalid_argument("apply: matrix must be at least 1×1");
    const detail::GridStats st(grid);
    StrategyOutput out;
    out.solution_scores = detail::evaluate_axis(strategy.expr_solution, grid, st, detail::Axis::Solution);
    out.test_scores = detail::evaluate_axis(strategy.expr_test, grid, st, detail::Axis::Test);
    for (double s : out.solution_scores)
        if (!std::isfinite(s)) throw StrategyFault(strategy.name + ": non-finite solution score");
    for (double s : out.test_scores)
        if (!std::isfinite(s)) throw StrategyFault(strategy.name + ": non-finite test score");
    out.solution_ranking = strategy.solution_tie_break == TieBreak::PassCountThenIndex
                               ? detail::rank_with_pass_count(out.solution_scores, st.row_counts)
                               : detail::rank_descending(out.solution_scores);
    out.test_ranking = detail::rank_descending(out.test_scores);
    return out;
}

inline StrategyOutput apply(const Strategy& strategy, const PassMatrix& matrix) {
    return apply(strategy, binarize(matrix));
}

// ─── Built-in strategies ──────────────────────────────────────

enum class BuiltinName {
    Initial,
    Discriminative,
    Tfidf,
    Coverage,
    Inverse,
    Exclusion,
    HardnessAware,
};

inline const char* to_string(BuiltinName n) {
    switch (n) {
        case BuiltinName::Initial: return "initial";
        case BuiltinName::Discriminative: return "discriminative";
        case BuiltinName::Tfidf: return "tfidf";
        case BuiltinName::Coverage: return "coverage";
        case BuiltinName::Inverse: return "inverse";
        case BuiltinName::Exclusion: return "exclusion";
        case BuiltinName::HardnessAware: return "hardness_aware";
    }
    return "initial";
}

inline const std::vector<BuiltinName>& all_builtins() {
    static const std::vector<BuiltinName> names = {
        BuiltinName::Initial,   BuiltinName::Discriminative, BuiltinName::Tfidf,
        BuiltinName::Coverage,  BuiltinName::Inverse,        BuiltinName::Exclusion,
        BuiltinName::HardnessAware,
    };
    return names;
}

namespace detail {
/// mean(normalized row score of passers) − mean(... of failers).
inline Expr discriminative_gap() {
    Expr norm(NodeKind::Normalize, {Expr(NodeKind::RowPassCount)});
    return Expr(NodeKind::Sub, {Expr(NodeKind::MeanOverPassers, {norm}),
                                Expr(NodeKind::MeanOverFailers, {norm})});
}
}  // namespace detail

/// The canonical form of each built-in strategy.
inline Strategy builtin(BuiltinName name) {
    Strategy s;
    s.name = to_string(name);
    switch (name) {
        case BuiltinName::Initial:
            // Solutions that pass more testings are better; testings
            // that validate more solutions are better.
            s.expr_solution = Expr(NodeKind::RowPassCount);
            s.expr_test = Expr(NodeKind::ColPassCount);
            break;
        case BuiltinName::Discriminative:
            s.expr_solution = Expr(NodeKind::RowPassCount);
            s.expr_test = detail::discriminative_gap();
            break;
        case BuiltinName::Tfidf:
            s.expr_solution = Expr(NodeKind::IdfWeight);
            s.expr_test = Expr(NodeKind::IdfWeight);
            break;
        case BuiltinName::Coverage:
            s.expr_solution = Expr(NodeKind::RowPassCount);
            s.expr_test = Expr(NodeKind::Sub, {Expr(NodeKind::MeanOverPassers, {Expr(NodeKind::RowPassCount)}),
                                               Expr(NodeKind::MeanOverFailers, {Expr(NodeKind::RowPassCount)})});
            break;
        case BuiltinName::Inverse:
            // Testings that fewer solutions can pass are better.
            s.expr_solution = Expr(NodeKind::RowPassCount);
            s.expr_test = Expr(NodeKind::Neg, {Expr(NodeKind::ColPassCount)});
            break;
        case BuiltinName::Exclusion:
            s.expr_solution = Expr(NodeKind::RowPassCount);
            s.expr_test = Expr(NodeKind::ExcludeSelfConsensus);
            break;
        case BuiltinName::HardnessAware:
            s.expr_solution = Expr(NodeKind::StrictnessWeight);
            s.expr_test = Expr(NodeKind::Mul, {Expr(NodeKind::StrictnessWeight),
                                               detail::discriminative_gap()});
            s.solution_tie_break = TieBreak::PassCountThenIndex;
            break;
    }
    return s;
}

inline Strategy builtin(const std::string& name) {
    for (BuiltinName b : all_builtins())
        if (name == to_string(b)) return builtin(b);
    throw std::invalid_argument("unknown built-in strategy: " + name);
}

// Named forms of the pinned per-strategy scoring operations.
inline StrategyOutput score_discriminative(const PassMatrix& m) {
    return apply(builtin(BuiltinName::Discriminative), m);
}
inline StrategyOutput score_tfidf(const PassMatrix& m) {
    return apply(builtin(BuiltinName::Tfidf), m);
}
inline StrategyOutput score_coverage(const PassMatrix& m) {
    return apply(builtin(BuiltinName::Coverage), m);
}
inline StrategyOutput score_exclusion(const PassMatrix& m) {
    return apply(builtin(BuiltinName::Exclusion), m);
}
inline StrategyOutput score_hardness_aware(const PassMatrix& m) {
    return apply(builtin(BuiltinName::HardnessAware), m);
}

}  // namespace verisynth

#endif  // VERISYNTH_STRATEGY_HPP
