// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#include <forex/verify.hpp>

#include "support/corpus.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace forex;

namespace {

Solver make_solver() { return Solver(test::solver_path_for_tests(), 20000); }

std::set<std::string> pool_strings(Engine& eng, const Feht& spec) {
    std::vector<QuantifiedProgram> frames = spec.programs;
    std::vector<size_t> group;
    for (size_t i = 0; i < frames.size(); ++i) {
        frames[i].remaining = normalize_head(frames[i].remaining);
        group.push_back(i);
    }
    std::set<std::string> out;
    for (const Formula& f : eng.invariant_pool(frames, group, spec.pre)) {
        INFO(to_string(f));
        out.insert(to_string(f));
    }
    return out;
}

}  // namespace

TEST_CASE("the candidate pool spans equalities, orderings and scalings", "[loops]") {
    Feht f = load_spec(test::bench_dir() + "/counting_pre.feht");
    Solver s = make_solver();
    Engine eng(s);
    eng.analyze(f);  // binds the engine to this spec's program constants
    std::set<std::string> pool = pool_strings(eng, f);

    CHECK(pool.count("x_1 == x_2"));
    CHECK(pool.count("y_1 == y_2"));
    CHECK(pool.count("y_1 <= y_2"));
    CHECK(pool.count("y_1 >= y_2"));
    // 2 appears in a program, 3 does not, so only doublings are offered.
    CHECK(pool.count("y_2 == 2 * y_1"));
    CHECK(pool.count("y_2 == 2 * y_1 + 1"));
    CHECK_FALSE(pool.count("y_2 == 3 * y_1"));
}

TEST_CASE("hints pin the alignment on the first attempt", "[loops]") {
    Feht f = load_spec(test::bench_dir() + "/ex1_hinted.feht");
    Solver s = make_solver();
    VerifyResult r = verify(f, s);
    CHECK(r.verified);
    CHECK(r.attempts == 1);
    REQUIRE(r.groups.size() == 1);
    CHECK(r.groups[0].invariant == "x_1 == x_2 && y_2 == 2 * y_1");
    CHECK(r.groups[0].counters == std::vector<long>{1, 2});
    CHECK(r.groups[0].tried == 1);
    CHECK(r.groups[0].skipped == 0);
}

TEST_CASE("the unhinted search rediscovers the hinted alignment", "[loops]") {
    Feht f = load_spec(test::bench_dir() + "/ex1_auto.feht");
    Solver s = make_solver();
    VerifyResult r = verify(f, s, EngineConfig{.max_unroll = 2});
    CHECK(r.verified);
    REQUIRE(r.groups.size() == 1);
    CHECK(r.groups[0].counters == std::vector<long>{1, 2});
    Formula found = parse_formula_text(r.groups[0].invariant, 2);
    Formula expect = parse_formula_text("x_1 == x_2 && y_2 == 2 * y_1", 2);
    CHECK(s.check_equiv(found, expect));
}

TEST_CASE("a parameter-free entry state seeds the candidate stream", "[loops]") {
    Feht f = load_spec(test::bench_dir() + "/loop_sync.feht");
    Solver s = make_solver();
    VerifyResult r = verify(f, s);
    CHECK(r.verified);
    CHECK(r.attempts == 1);
    REQUIRE(r.groups.size() == 1);
    CHECK(r.groups[0].invariant == "x_1 == x_2 && x_1 >= 0");
    CHECK(r.groups[0].counters == std::vector<long>{1, 1});
}

TEST_CASE("a failed closing query backtracks to the next candidate", "[loops]") {
    // The hinted invariant passes every per-group check but is too weak for
    // the postcondition; the driver must skip past it and accept the entry
    // state instead.
    Feht f = parse_spec(
        "[pre]\nx_1 == x_2 && x_1 >= 0\n"
        "[forall]\nwhile (x > 0) { x = x - 1; }\n"
        "[exists]\nwhile (x > 0) { x = x - 1; }\n"
        "[post]\nx_1 == x_2 && x_1 >= 0\n"
        "[hint-invariant]\nx_1 == x_2\n");
    Solver s = make_solver();
    VerifyResult r = verify(f, s);
    CHECK(r.verified);
    CHECK(r.attempts == 2);
    REQUIRE(r.groups.size() == 1);
    CHECK(r.groups[0].skipped == 1);
    CHECK(r.groups[0].invariant == "x_1 == x_2 && x_1 >= 0");
}

TEST_CASE("existential-only loop groups must be exitable immediately", "[loops]") {
    Solver s = make_solver();
    Feht idle = parse_spec("[pre]\nx_1 == 0\n[exists]\nwhile (x > 0) { x = x - 1; }\n"
                           "[post]\nx_1 == 0\n");
    VerifyResult ok = verify(idle, s);
    CHECK(ok.verified);

    Feht stuck = parse_spec("[pre]\nx_1 == 3\n[exists]\nwhile (x > 0) { x = x - 1; }\n"
                            "[post]\ntrue\n");
    Solver s2 = make_solver();
    VerifyResult bad = verify(stuck, s2);
    CHECK_FALSE(bad.verified);
    CHECK(bad.reason == "existential_only");
}

TEST_CASE("the candidate budget cuts the search off cleanly", "[loops]") {
    Feht f = load_spec(test::bench_dir() + "/ex1_auto.feht");
    Solver s = make_solver();
    VerifyResult r = verify(f, s, EngineConfig{.candidate_budget = 1});
    CHECK_FALSE(r.verified);
    CHECK(r.reason == "budget_exhausted");
}

TEST_CASE("repeated runs take identical paths", "[loops]") {
    Feht f = load_spec(test::bench_dir() + "/loop_sync.feht");
    auto run = [&] {
        Solver s = make_solver();
        return verify(f, s, EngineConfig{.trace = true});
    };
    VerifyResult a = run(), b = run();
    CHECK(a.verified == b.verified);
    CHECK(a.attempts == b.attempts);
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].rule == b.trace[i].rule);
        CHECK(a.trace[i].note == b.trace[i].note);
    }
}
