// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// End-to-end verification driver. Each attempt derives a parametric
// postcondition and asks the solver whether it forces the real
// postcondition for every universal outcome. When that closing query
// fails, the driver backtracks into the loop candidate search: a skip
// vector tells each loop group how many previously accepted candidates
// to pass over, and the driver advances it like an odometer until the
// query holds, the candidates run out, or the budget is gone.

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "genpp.hpp"
#include "parse.hpp"

namespace forex {

struct VerifyResult {
    bool verified = false;
    std::string reason;  // final_unsat | final_unknown | candidates_exhausted |
                         // existential_only | budget_exhausted | solver_error
    long attempts = 0;
    long time_ms = 0;
    ParametricAssertion assertion;       // from the last completed attempt
    std::optional<Formula> final_query;  // likewise
    std::vector<GroupReport> groups;
    std::vector<TraceEvent> trace;
    SolverStats solver;
};

inline Formula final_query_for(const Feht& spec, const ParametricAssertion& pa,
                               const std::vector<Param>& params) {
    std::vector<std::vector<VarName>> uv, ev;
    for (int c = 1; c <= spec.k; ++c) {
        auto s = spec.copy_vars(c);
        uv.emplace_back(s.begin(), s.end());
    }
    for (int c = spec.k + 1; c <= spec.k + spec.l; ++c) {
        auto s = spec.copy_vars(c);
        ev.emplace_back(s.begin(), s.end());
    }
    return build_final_query(uv, ev, params, pa.restriction, pa.xi, spec.post);
}

inline VerifyResult verify(const Feht& spec, Solver& solver, EngineConfig cfg = {}) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    Engine eng(solver, cfg);
    VerifyResult out;
    std::vector<long> skips;

    auto done = [&](bool ok, std::string why) {
        out.verified = ok;
        out.reason = std::move(why);
        out.groups = eng.group_reports();
        out.trace = eng.trace();
        out.solver = solver.stats();
        out.time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0)
                          .count();
        return out;
    };

    for (;;) {
        ++out.attempts;
        ParametricAssertion pa;
        try {
            pa = eng.analyze(spec, skips);
        } catch (const AnalysisFailure& e) {
            if (e.kind == "candidates_exhausted" && e.group > 0) {
                // The failing group saw every candidate under the current
                // choices of the earlier groups; advance the previous one.
                skips.resize(static_cast<size_t>(e.group), 0);
                ++skips[static_cast<size_t>(e.group) - 1];
                continue;
            }
            return done(false, e.kind);
        }
        out.assertion = pa;
        Formula q = final_query_for(spec, pa, eng.minted_params());
        out.final_query = q;
        SolverResult r = solver.check_closed(q);
        if (r == SolverResult::Sat) return done(true, "");
        if (r == SolverResult::Unknown) return done(false, "final_unknown");
        int groups = eng.groups_encountered();
        if (groups == 0) return done(false, "final_unsat");
        skips.resize(static_cast<size_t>(groups), 0);
        ++skips[static_cast<size_t>(groups) - 1];
    }
}

// ---------------------------------------------------------------------------
// Spec files and reports

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Feht load_spec(const std::string& path) { return parse_spec(read_file(path)); }

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out;
}

inline std::string result_json(const std::string& file, const VerifyResult& r) {
    std::ostringstream j;
    j << "{\n  \"schema\": 1,\n";
    j << "  \"file\": \"" << json_escape(file) << "\",\n";
    j << "  \"result\": \"" << (r.verified ? "verified" : "inconclusive") << "\",\n";
    j << "  \"reason\": \"" << json_escape(r.reason) << "\",\n";
    j << "  \"attempts\": " << r.attempts << ",\n";
    j << "  \"time_ms\": " << r.time_ms << ",\n";
    j << "  \"solver\": {\"queries\": " << r.solver.queries << ", \"sat\": " << r.solver.sat
      << ", \"unsat\": " << r.solver.unsat << ", \"unknown\": " << r.solver.unknown
      << ", \"timeouts\": " << r.solver.timeouts << ", \"total_ms\": " << r.solver.total_ms
      << "},\n";
    j << "  \"groups\": [";
    for (size_t i = 0; i < r.groups.size(); ++i) {
        const auto& g = r.groups[i];
        j << (i ? ", " : "") << "{\"invariant\": \"" << json_escape(g.invariant)
          << "\", \"counters\": [";
        for (size_t t = 0; t < g.counters.size(); ++t) j << (t ? ", " : "") << g.counters[t];
        j << "], \"tried\": " << g.tried << ", \"skipped\": " << g.skipped << "}";
    }
    j << "],\n";
    j << "  \"postcondition\": \"" << json_escape(to_string(r.assertion.xi)) << "\",\n";
    j << "  \"postcondition_smt2\": \"" << json_escape(to_smt2(r.assertion.xi)) << "\",\n";
    j << "  \"restriction\": \"" << json_escape(to_string(r.assertion.restriction)) << "\",\n";
    j << "  \"restriction_smt2\": \"" << json_escape(to_smt2(r.assertion.restriction)) << "\"\n";
    j << "}\n";
    return j.str();
}

struct SuiteRow {
    std::string file;
    bool verified = false;
    std::string reason;
    long time_ms = 0;
    long queries = 0;
};

// Runs every .feht file with a fresh engine and solver per spec. Files are
// processed by a small worker pool; the table still comes out in input
// order, and verdicts are deterministic because nothing is shared.
inline std::vector<SuiteRow> run_suite(const std::vector<std::string>& files,
                                       const std::string& solver_path, int timeout_ms,
                                       EngineConfig cfg, std::ostream& log) {
    std::vector<SuiteRow> rows(files.size());
    std::vector<std::atomic<bool>> ready(files.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            SuiteRow row;
            row.file = files[i];
            try {
                Feht spec = load_spec(files[i]);
                Solver solver(solver_path, timeout_ms);
                VerifyResult r = verify(spec, solver, cfg);
                row.verified = r.verified;
                row.reason = r.reason;
                row.time_ms = r.time_ms;
                row.queries = r.solver.queries;
            } catch (const std::exception& e) {
                row.verified = false;
                row.reason = std::string("error: ") + e.what();
            }
            rows[i] = std::move(row);
            ready[i].store(true, std::memory_order_release);
        }
    };
    unsigned n = std::max(1u, std::min({4u, std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(files.size())}));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t + 1 < n; ++t) pool.emplace_back(work);

    size_t width = 4;
    for (const auto& f : files) width = std::max(width, f.size());
    // The calling thread doubles as a worker, then prints rows as they land.
    work();
    for (size_t i = 0; i < files.size(); ++i) {
        while (!ready[i].load(std::memory_order_acquire))
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        const SuiteRow& row = rows[i];
        log << "  " << row.file << std::string(width + 2 - row.file.size(), ' ')
            << (row.verified ? "verified     " : "inconclusive ") << row.time_ms << " ms, "
            << row.queries << " queries";
        if (!row.verified && !row.reason.empty()) log << "  (" << row.reason << ")";
        log << "\n";
    }
    for (auto& t : pool) t.join();
    return rows;
}

}  // namespace forex
