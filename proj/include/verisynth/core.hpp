// SPDX-License-Identifier: Apache-2.0
#ifndef VERISYNTH_CORE_HPP
#define VERISYNTH_CORE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace verisynth {

// ─── Domain types ─────────────────────────────────────────────
//
// A corpus is made of problems, candidate solutions and candidate
// testing artifacts. Executing every solution against every test of
// one problem yields a PassMatrix; everything downstream (strategies,
// the evaluator, pruning) consumes that matrix. All types here are
// immutable after construction and safe to share across threads.

enum class Origin { Seed, Synthesized };

struct Problem {
    std::string id;
    std::string statement;
    Origin origin = Origin::Synthesized;
    std::optional<std::string> source_ref;  // generation batch id
};

struct Solution {
    std::string id;
    std::string problem_id;
    std::string payload;  // program source or agent transcript
    int sample_index = 0; // position within the M samples of its problem
};

enum class TestProtocol { IoPair, CommandScript, CheckerProgram };

/// io_pair: feed `input` on stdin, compare stdout against `expected`.
struct IoPairPayload {
    std::string input;
    std::string expected;
};

/// command_script: setup commands, then the solution payload, then
/// assert commands whose exit statuses decide the verdict.
struct CommandScriptPayload {
    std::vector<std::string> setup;
    std::vector<std::string> assert_cmds;
};

struct CheckerProgramPayload {
    std::string program;
};

struct TestArtifact {
    std::string id;
    std::string problem_id;
    TestProtocol protocol = TestProtocol::IoPair;
    IoPairPayload io;           // valid when protocol == IoPair
    CommandScriptPayload cmd;   // valid when protocol == CommandScript
    CheckerProgramPayload chk;  // valid when protocol == CheckerProgram
    bool annotated = false;     // only seed-provided tests may set this
};

enum class Verdict { Pass, Fail, Error, Timeout };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Error: return "error";
        case Verdict::Timeout: return "timeout";
    }
    return "error";
}

/// One execution result. `detail` is present iff the verdict is
/// error or timeout.
struct Outcome {
    Verdict verdict = Verdict::Error;
    std::int64_t wall_time_ms = 0;
    std::optional<std::string> detail;

    static Outcome pass(std::int64_t ms) { return {Verdict::Pass, ms, std::nullopt}; }
    static Outcome fail(std::int64_t ms) { return {Verdict::Fail, ms, std::nullopt}; }
    static Outcome error(std::int64_t ms, std::string why) {
        return {Verdict::Error, ms, std::move(why)};
    }
    static Outcome timeout(std::int64_t ms, std::string why) {
        return {Verdict::Timeout, ms, std::move(why)};
    }
};

inline void validate(const Outcome& o) {
    if (o.wall_time_ms < 0)
        throw std::invalid_argument("outcome: negative wall_time_ms");
    const bool needs_detail = o.verdict == Verdict::Error || o.verdict == Verdict::Timeout;
    if (needs_detail != o.detail.has_value())
        throw std::invalid_argument("outcome: detail must be present iff verdict is error/timeout");
}

/// M×N grid of outcomes from executing every solution (row) against
/// every test (column) of one problem. Row order follows sample_index,
/// cells are row-major; ids are kept explicitly so re-ordering bugs
/// stay detectable in serialized form.
struct PassMatrix {
    std::string problem_id;
    std::vector<std::string> solution_ids;  // length M
    std::vector<std::string> test_ids;      // length N
    std::vector<Outcome> cells;             // row-major M×N

    std::size_t rows() const { return solution_ids.size(); }
    std::size_t cols() const { return test_ids.size(); }
    const Outcome& at(std::size_t i, std::size_t j) const { return cells[i * cols() + j]; }
    Outcome& at(std::size_t i, std::size_t j) { return cells[i * cols() + j]; }
};

inline void validate(const PassMatrix& m) {
    if (m.cells.size() != m.rows() * m.cols())
        throw std::invalid_argument("pass matrix: cell count does not match id lists");
    for (const Outcome& o : m.cells) validate(o);
}

/// Flat boolean M×N grid, the strategies' working representation.
struct BoolGrid {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<std::uint8_t> cells;  // row-major

    BoolGrid() = default;
    BoolGrid(std::size_t rows, std::size_t cols, bool fill = false)
        : m(rows), n(cols), cells(rows * cols, fill ? 1 : 0) {}

    bool at(std::size_t i, std::size_t j) const { return cells[i * n + j] != 0; }
    void set(std::size_t i, std::size_t j, bool v) { cells[i * n + j] = v ? 1 : 0; }
};

/// Human-annotated problem plus generated candidates; the evaluator's
/// ground truth. The annotated tests never enter the N-column strategy
/// input, they only feed Criterion-1/2.
struct SeedInstance {
    Problem problem;
    std::vector<TestArtifact> annotated_tests;   // non-empty, annotated=true
    std::vector<Solution> candidate_solutions;   // length M >= 2
    std::vector<TestArtifact> candidate_tests;   // length N >= 1, annotated=false
    PassMatrix generated_matrix;                 // M×N over the candidates
    PassMatrix annotated_matrix;                 // M×|annotated|, same row order
};

inline void validate(const SeedInstance& s) {
    if (s.annotated_tests.empty())
        throw std::invalid_argument("seed instance: annotated test suite is empty");
    if (s.candidate_solutions.size() < 2)
        throw std::invalid_argument("seed instance: needs at least 2 candidate solutions");
    if (s.candidate_tests.empty())
        throw std::invalid_argument("seed instance: needs at least 1 candidate test");
    for (const auto& t : s.annotated_tests)
        if (!t.annotated)
            throw std::invalid_argument("seed instance: annotated_tests must have annotated=true");
    for (const auto& t : s.candidate_tests)
        if (t.annotated)
            throw std::invalid_argument("seed instance: candidate_tests must have annotated=false");
    validate(s.generated_matrix);
    validate(s.annotated_matrix);
    if (s.generated_matrix.rows() != s.candidate_solutions.size())
        throw std::invalid_argument("seed instance: generated matrix row count mismatch");
    if (s.generated_matrix.cols() != s.candidate_tests.size())
        throw std::invalid_argument("seed instance: generated matrix column count mismatch");
    if (s.annotated_matrix.rows() != s.candidate_solutions.size())
        throw std::invalid_argument("seed instance: annotated matrix row count mismatch");
    if (s.annotated_matrix.solution_ids != s.generated_matrix.solution_ids)
        throw std::invalid_argument("seed instance: matrices disagree on solution ordering");
}

// ─── Pass-matrix primitives ───────────────────────────────────

/// Collapse verdicts to booleans: pass → true, everything else
/// (fail, error, timeout) → false. Raw verdicts stay available on the
/// matrix for reporting.
inline BoolGrid binarize(const PassMatrix& matrix) {
    BoolGrid g(matrix.rows(), matrix.cols());
    for (std::size_t i = 0; i < g.m; ++i)
        for (std::size_t j = 0; j < g.n; ++j)
            g.set(i, j, matrix.at(i, j).verdict == Verdict::Pass);
    return g;
}

struct PassCounts {
    std::vector<std::size_t> per_solution;  // row sums, length M
    std::vector<std::size_t> per_test;      // column sums, length N
};

inline PassCounts pass_counts(const BoolGrid& grid) {
    PassCounts c;
    c.per_solution.assign(grid.m, 0);
    c.per_test.assign(grid.n, 0);
    for (std::size_t i = 0; i < grid.m; ++i)
        for (std::size_t j = 0; j < grid.n; ++j)
            if (grid.at(i, j)) {
                ++c.per_solution[i];
                ++c.per_test[j];
            }
    return c;
}

inline PassCounts pass_counts(const PassMatrix& matrix) { return pass_counts(binarize(matrix)); }

/// True iff every score is exactly equal (max − min == 0 on the score
/// representation). Uninformative test sets and trivial problems land
/// here; see zero-variance pruning in the pipeline.
inline bool is_zero_variance(const std::vector<double>& test_scores) {
    if (test_scores.empty())
        throw std::invalid_argument("is_zero_variance: empty score list (malformed instance)");
    double lo = test_scores.front(), hi = test_scores.front();
    for (double s : test_scores) {
        if (s < lo) lo = s;
        if (s > hi) hi = s;
    }
    return hi - lo == 0.0;
}

}  // namespace verisynth

#endif  // VERISYNTH_CORE_HPP
