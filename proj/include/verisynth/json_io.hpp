// SPDX-License-Identifier: Apache-2.0
#ifndef VERISYNTH_JSON_IO_HPP
#define VERISYNTH_JSON_IO_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "verisynth/core.hpp"
#include "verisynth/rng.hpp"
#include "verisynth/strategy.hpp"

namespace verisynth {

using json = nlohmann::json;

/// Thrown for any malformed input file; the CLI maps it to exit 2.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace io_detail {
inline json parse_or_throw(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(what + ": not valid JSON");
    return j;
}

template <typename T>
T field(const json& j, const char* key, const std::string& what) {
    if (!j.contains(key)) throw ParseError(what + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(what + ": bad type for field '" + key + "'");
    }
}
}  // namespace io_detail

// ─── Outcome / PassMatrix ─────────────────────────────────────
// Matrix interchange: {problem_id, solution_ids[], test_ids[],
// cells[[{verdict, wall_time_ms, detail?}]]} with verdict strings
// exactly pass|fail|error|timeout.

inline json to_json(const Outcome& o) {
    json j{{"verdict", to_string(o.verdict)}, {"wall_time_ms", o.wall_time_ms}};
    if (o.detail) j["detail"] = *o.detail;
    return j;
}

inline Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::Pass;
    if (s == "fail") return Verdict::Fail;
    if (s == "error") return Verdict::Error;
    if (s == "timeout") return Verdict::Timeout;
    throw ParseError("unknown verdict string: '" + s + "'");
}

inline Outcome outcome_from_json(const json& j) {
    Outcome o;
    o.verdict = verdict_from_string(io_detail::field<std::string>(j, "verdict", "outcome"));
    o.wall_time_ms = io_detail::field<std::int64_t>(j, "wall_time_ms", "outcome");
    if (j.contains("detail")) o.detail = j.at("detail").get<std::string>();
    try {
        validate(o);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return o;
}

inline json to_json(const PassMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return json{{"problem_id", m.problem_id},
                {"solution_ids", m.solution_ids},
                {"test_ids", m.test_ids},
                {"cells", std::move(rows)}};
}

inline PassMatrix matrix_from_json(const json& j) {
    PassMatrix m;
    m.problem_id = io_detail::field<std::string>(j, "problem_id", "pass matrix");
    m.solution_ids = io_detail::field<std::vector<std::string>>(j, "solution_ids", "pass matrix");
    m.test_ids = io_detail::field<std::vector<std::string>>(j, "test_ids", "pass matrix");
    if (!j.contains("cells") || !j.at("cells").is_array())
        throw ParseError("pass matrix: missing cells array");
    const json& rows = j.at("cells");
    if (rows.size() != m.solution_ids.size())
        throw ParseError("pass matrix: cell rows do not match solution_ids");
    for (const json& row : rows) {
        if (!row.is_array() || row.size() != m.test_ids.size())
            throw ParseError("pass matrix: cell row does not match test_ids");
        for (const json& cell : row) m.cells.push_back(outcome_from_json(cell));
    }
    return m;
}

// ─── Problems, solutions, tests ───────────────────────────────

inline json to_json(const Problem& p) {
    json j{{"id", p.id},
           {"statement", p.statement},
           {"origin", p.origin == Origin::Seed ? "seed" : "synthesized"}};
    if (p.source_ref) j["source_ref"] = *p.source_ref;
    return j;
}

inline Problem problem_from_json(const json& j) {
    Problem p;
    p.id = io_detail::field<std::string>(j, "id", "problem");
    p.statement = io_detail::field<std::string>(j, "statement", "problem");
    const std::string origin = io_detail::field<std::string>(j, "origin", "problem");
    if (origin == "seed") p.origin = Origin::Seed;
    else if (origin == "synthesized") p.origin = Origin::Synthesized;
    else throw ParseError("problem: unknown origin '" + origin + "'");
    if (j.contains("source_ref")) p.source_ref = j.at("source_ref").get<std::string>();
    if (p.statement.empty()) throw ParseError("problem: empty statement");
    return p;
}

inline json to_json(const Solution& s) {
    return json{{"id", s.id},
                {"problem_id", s.problem_id},
                {"payload", s.payload},
                {"sample_index", s.sample_index}};
}

inline Solution solution_from_json(const json& j) {
    Solution s;
    s.id = io_detail::field<std::string>(j, "id", "solution");
    s.problem_id = io_detail::field<std::string>(j, "problem_id", "solution");
    s.payload = io_detail::field<std::string>(j, "payload", "solution");
    s.sample_index = io_detail::field<int>(j, "sample_index", "solution");
    return s;
}

inline const char* to_string(TestProtocol p) {
    switch (p) {
        case TestProtocol::IoPair: return "io_pair";
        case TestProtocol::CommandScript: return "command_script";
        case TestProtocol::CheckerProgram: return "checker_program";
    }
    return "io_pair";
}

inline json to_json(const TestArtifact& t) {
    json payload;
    switch (t.protocol) {
        case TestProtocol::IoPair:
            payload = json{{"input", t.io.input}, {"expected", t.io.expected}};
            break;
        case TestProtocol::CommandScript:
            payload = json{{"setup", t.cmd.setup}, {"assert", t.cmd.assert_cmds}};
            break;
        case TestProtocol::CheckerProgram:
            payload = json{{"program", t.chk.program}};
            break;
    }
    return json{{"id", t.id},
                {"problem_id", t.problem_id},
                {"protocol", to_string(t.protocol)},
                {"payload", std::move(payload)},
                {"annotated", t.annotated}};
}

inline TestArtifact test_from_json(const json& j) {
    TestArtifact t;
    t.id = io_detail::field<std::string>(j, "id", "test artifact");
    t.problem_id = io_detail::field<std::string>(j, "problem_id", "test artifact");
    const std::string proto = io_detail::field<std::string>(j, "protocol", "test artifact");
    if (!j.contains("payload")) throw ParseError("test artifact: missing payload");
    const json& payload = j.at("payload");
    if (proto == "io_pair") {
        t.protocol = TestProtocol::IoPair;
        t.io.input = io_detail::field<std::string>(payload, "input", "io_pair payload");
        t.io.expected = io_detail::field<std::string>(payload, "expected", "io_pair payload");
    } else if (proto == "command_script") {
        t.protocol = TestProtocol::CommandScript;
        t.cmd.setup =
            io_detail::field<std::vector<std::string>>(payload, "setup", "command payload");
        t.cmd.assert_cmds =
            io_detail::field<std::vector<std::string>>(payload, "assert", "command payload");
    } else if (proto == "checker_program") {
        t.protocol = TestProtocol::CheckerProgram;
        t.chk.program = io_detail::field<std::string>(payload, "program", "checker payload");
    } else {
        throw ParseError("test artifact: unknown protocol '" + proto + "'");
    }
    t.annotated = j.value("annotated", false);
    return t;
}

// ─── Strategy files ───────────────────────────────────────────
// {name, expr_solution, expr_test, meta} with expressions as nested
// arrays, e.g. ["Sub", ["MeanOverPassers", ["Normalize",
// ["RowPassCount"]]], ...]. Emitted form round-trips byte-identically.

inline json to_json(const Expr& e) {
    json arr = json::array();
    arr.push_back(to_string(e.kind));
    if (e.kind == NodeKind::Const) arr.push_back(e.value);
    for (const Expr& c : e.children) arr.push_back(to_json(c));
    return arr;
}

inline NodeKind node_kind_from_string(const std::string& s) {
    static const NodeKind kinds[] = {
        NodeKind::RowPassCount,  NodeKind::ColPassCount,     NodeKind::Const,
        NodeKind::Normalize,     NodeKind::MeanOverPassers,  NodeKind::MeanOverFailers,
        NodeKind::Sub,           NodeKind::Add,              NodeKind::Mul,
        NodeKind::IdfWeight,     NodeKind::StrictnessWeight, NodeKind::ExcludeSelfConsensus,
        NodeKind::Neg,
    };
    for (NodeKind k : kinds)
        if (s == to_string(k)) return k;
    throw ParseError("unknown DSL node kind: '" + s + "'");
}

inline Expr expr_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j.at(0).is_string())
        throw ParseError("expression: expected [\"NodeKind\", ...]");
    Expr e(node_kind_from_string(j.at(0).get<std::string>()));
    std::size_t child_start = 1;
    if (e.kind == NodeKind::Const) {
        if (j.size() < 2 || !j.at(1).is_number())
            throw ParseError("expression: Const needs a numeric value");
        e.value = j.at(1).get<double>();
        child_start = 2;
    }
    for (std::size_t i = child_start; i < j.size(); ++i)
        e.children.push_back(expr_from_json(j.at(i)));
    try {
        type_check(e);
    } catch (const std::invalid_argument& ex) {
        throw ParseError(ex.what());
    }
    return e;
}

inline json to_json(const Strategy& s) {
    json j{{"name", s.name},
           {"expr_solution", to_json(s.expr_solution)},
           {"expr_test", to_json(s.expr_test)},
           {"meta", json(s.meta)}};
    if (s.solution_tie_break == TieBreak::PassCountThenIndex)
        j["solution_tie_break"] = "pass_count_then_index";
    return j;
}

inline Strategy strategy_from_json(const json& j) {
    Strategy s;
    s.name = io_detail::field<std::string>(j, "name", "strategy");
    if (!j.contains("expr_solution") || !j.contains("expr_test"))
        throw ParseError("strategy: missing expr_solution/expr_test");
    s.expr_solution = expr_from_json(j.at("expr_solution"));
    s.expr_test = expr_from_json(j.at("expr_test"));
    if (!well_formed(s.expr_solution) || !well_formed(s.expr_test))
        throw ParseError("strategy: expression exceeds size or depth bounds");
    if (j.contains("meta")) {
        for (const auto& [k, v] : j.at("meta").items())
            s.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    if (j.contains("solution_tie_break")) {
        const std::string tb = j.at("solution_tie_break").get<std::string>();
        if (tb == "pass_count_then_index") s.solution_tie_break = TieBreak::PassCountThenIndex;
        else if (tb == "index") s.solution_tie_break = TieBreak::Index;
        else throw ParseError("strategy: unknown solution_tie_break '" + tb + "'");
    }
    return s;
}

inline Strategy strategy_from_string(const std::string& text) {
    return strategy_from_json(io_detail::parse_or_throw(text, "strategy"));
}

/// Canonical single-line serialization; input to the strategy digest.
inline std::string strategy_to_string(const Strategy& s) { return to_json(s).dump(); }

inline std::uint64_t strategy_digest(const Strategy& s) {
    const std::string text = strategy_to_string(s);
    return fnv1a(text.data(), text.size());
}

// ─── Seed instances ───────────────────────────────────────────

inline json to_json(const SeedInstance& s) {
    json annotated = json::array(), solutions = json::array(), tests = json::array();
    for (const auto& t : s.annotated_tests) annotated.push_back(to_json(t));
    for (const auto& x : s.candidate_solutions) solutions.push_back(to_json(x));
    for (const auto& t : s.candidate_tests) tests.push_back(to_json(t));
    return json{{"problem", to_json(s.problem)},
                {"annotated_tests", std::move(annotated)},
                {"candidate_solutions", std::move(solutions)},
                {"candidate_tests", std::move(tests)},
                {"generated_matrix", to_json(s.generated_matrix)},
                {"annotated_matrix", to_json(s.annotated_matrix)}};
}

inline SeedInstance seed_from_json(const json& j) {
    SeedInstance s;
    if (!j.contains("problem")) throw ParseError("seed instance: missing problem");
    s.problem = problem_from_json(j.at("problem"));
    for (const char* key : {"annotated_tests", "candidate_solutions", "candidate_tests",
                            "generated_matrix", "annotated_matrix"})
        if (!j.contains(key)) throw ParseError(std::string("seed instance: missing ") + key);
    for (const json& t : j.at("annotated_tests")) s.annotated_tests.push_back(test_from_json(t));
    for (const json& x : j.at("candidate_solutions"))
        s.candidate_solutions.push_back(solution_from_json(x));
    for (const json& t : j.at("candidate_tests")) s.candidate_tests.push_back(test_from_json(t));
    s.generated_matrix = matrix_from_json(j.at("generated_matrix"));
    s.annotated_matrix = matrix_from_json(j.at("annotated_matrix"));
    try {
        validate(s);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return s;
}

// ─── File helpers ─────────────────────────────────────────────

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline json load_json(const std::string& path) {
    return io_detail::parse_or_throw(read_file(path), path);
}

/// write-then-rename so readers never observe a partial file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("rename failed: " + path);
    }
}

}  // namespace verisynth

#endif  // VERISYNTH_JSON_IO_HPP
