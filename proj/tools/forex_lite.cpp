// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Verifies one .feht specification, or every .feht
// file in a directory, and reports the derived postcondition alongside the
// verdict. Exit code 0 means everything verified, 1 means some spec came
// back inconclusive, 2 means the invocation or environment was broken.

#include "forex/forex.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace forex;

namespace {

void print_report(const VerifyResult& r, bool trace) {
    if (r.verified) {
        std::cout << "verdict: verified\n";
    } else {
        std::cout << "verdict: inconclusive (" << r.reason << ")\n";
    }
    std::cout << "attempts: " << r.attempts << ", time: " << r.time_ms << " ms, solver: "
              << r.solver.queries << " queries (" << r.solver.sat << " sat, " << r.solver.unsat
              << " unsat, " << r.solver.unknown << " unknown), " << r.solver.total_ms
              << " ms\n";
    for (size_t i = 0; i < r.groups.size(); ++i) {
        const auto& g = r.groups[i];
        std::cout << "loop group " << i + 1 << ": invariant " << g.invariant << ", counters (";
        for (size_t t = 0; t < g.counters.size(); ++t)
            std::cout << (t ? "," : "") << g.counters[t];
        std::cout << "), tried " << g.tried << ", skipped " << g.skipped << "\n";
    }
    std::cout << "postcondition: " << to_string(r.assertion.xi) << "\n";
    std::cout << "restriction: " << to_string(r.assertion.restriction) << "\n";
    if (trace) {
        for (const auto& ev : r.trace) {
            std::cout << "  [" << ev.rule << "]";
            if (ev.copy) std::cout << " copy " << ev.copy;
            if (!ev.note.empty()) std::cout << " " << ev.note;
            std::cout << "\n";
        }
    }
}

std::string suite_json(const std::vector<SuiteRow>& rows) {
    std::ostringstream j;
    j << "{\n  \"schema\": 1,\n  \"suite\": [\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        j << "    {\"file\": \"" << json_escape(r.file) << "\", \"result\": \""
          << (r.verified ? "verified" : "inconclusive") << "\", \"reason\": \""
          << json_escape(r.reason) << "\", \"time_ms\": " << r.time_ms
          << ", \"queries\": " << r.queries << "}" << (i + 1 < rows.size() ? "," : "") << "\n";
    }
    j << "  ]\n}\n";
    return j.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forex-lite: verifier for forall-exists relational program properties"};
    std::string spec_path, solver_opt, dump_smt, json_path;
    int smt_timeout_ms = 10000;
    EngineConfig cfg;
    bool oracle = false, trace = false;
    long long oracle_domain = 2, oracle_steps = 256;

    app.add_option("spec", spec_path, ".feht specification file, or a directory of them")
        ->required();
    app.add_option("--solver-path", solver_opt,
                   "SMT solver binary (default: $FOREX_SOLVER, then z3 on PATH)");
    app.add_option("--smt-timeout-ms", smt_timeout_ms, "per-query solver timeout")
        ->default_val(10000);
    app.add_option("--max-unroll", cfg.max_unroll, "largest loop counter to try")
        ->default_val(2);
    app.add_option("--candidate-budget", cfg.candidate_budget,
                   "total invariant candidates per verification")
        ->default_val(500);
    app.add_option("--dump-smt", dump_smt, "write every solver query into this directory");
    app.add_option("--json", json_path, "write a JSON report to this path");
    app.add_flag("--oracle", oracle,
                 "also run the bounded-enumeration oracle (advisory; never changes the verdict)");
    app.add_option("--oracle-domain", oracle_domain, "oracle enumeration bound d")
        ->default_val(2);
    app.add_option("--oracle-steps", oracle_steps, "oracle per-path step budget")
        ->default_val(256);
    app.add_flag("--trace", trace, "print the engine's step trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // help/version exit cleanly, bad usage is 2
    }

    std::optional<std::string> solver_path = resolve_solver_path(solver_opt);
    if (!solver_path) {
        std::cerr << "error: no SMT solver found; pass --solver-path or set FOREX_SOLVER\n";
        return 2;
    }

    try {
        if (fs::is_directory(spec_path)) {
            std::vector<std::string> files;
            for (const auto& entry : fs::directory_iterator(spec_path))
                if (entry.is_regular_file() && entry.path().extension() == ".feht")
                    files.push_back(entry.path().string());
            std::sort(files.begin(), files.end());
            std::cout << "suite: " << files.size() << " specification(s) in " << spec_path
                      << "\n";
            if (oracle)
                std::cerr << "note: --oracle applies to single-specification runs only\n";
            auto rows = run_suite(files, *solver_path, smt_timeout_ms, cfg, std::cout);
            if (!json_path.empty()) write_text(json_path, suite_json(rows));
            bool all = std::all_of(rows.begin(), rows.end(),
                                   [](const SuiteRow& r) { return r.verified; });
            std::cout << (all ? "suite: all verified\n" : "suite: some inconclusive\n");
            return all ? 0 : 1;
        }

        Feht spec = load_spec(spec_path);
        Solver solver(*solver_path, smt_timeout_ms,
                      dump_smt.empty() ? std::nullopt : std::make_optional(dump_smt));
        cfg.trace = trace;
        VerifyResult result = verify(spec, solver, cfg);
        print_report(result, trace);
        if (oracle) {
            OracleOutcome o = feht_check_bounded(spec, oracle_domain, oracle_steps);
            std::cout << "oracle: " << to_text(o.verdict) << " (d=" << oracle_domain
                      << ", steps=" << oracle_steps << ")";
            if (!o.detail.empty()) std::cout << "  " << o.detail;
            std::cout << "\n";
        }
        if (!json_path.empty()) write_text(json_path, result_json(spec_path, result));
        return result.verified ? 0 : 1;
    } catch (const ParseError& e) {
        // what() already carries line:col.
        std::cerr << spec_path << ":" << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
