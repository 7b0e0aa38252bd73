// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#include <forex/smt.hpp>

#include "support/corpus.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace forex;
using Catch::Matchers::ContainsSubstring;

namespace {

Term tv(const char* base, int copy = 0) { return Term::variable(VarName{base, copy}); }
Term lit(long long n) { return Term::literal(n); }

Solver make_solver(int timeout_ms = 20000) {
    return Solver(test::solver_path_for_tests(), timeout_ms);
}

// Saves an environment variable and restores it on scope exit.
struct EnvGuard {
    std::string name;
    std::optional<std::string> saved;
    explicit EnvGuard(const char* n) : name(n) {
        if (const char* v = std::getenv(n)) saved = v;
    }
    ~EnvGuard() {
        if (saved)
            setenv(name.c_str(), saved->c_str(), 1);
        else
            unsetenv(name.c_str());
    }
};

}  // namespace

TEST_CASE("solver resolution prefers explicit, then env, then PATH", "[smt]") {
    EnvGuard fs("FOREX_SOLVER"), path("PATH");

    CHECK(resolve_solver_path("/opt/custom/z3") == "/opt/custom/z3");

    setenv("FOREX_SOLVER", "/from/env/solver", 1);
    CHECK(resolve_solver_path() == "/from/env/solver");
    CHECK(resolve_solver_path("/explicit/wins") == "/explicit/wins");

    unsetenv("FOREX_SOLVER");
    auto dir = std::filesystem::temp_directory_path() / "forex_smt_path_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "z3");
        f << "#!/bin/sh\necho unknown\n";
    }
    std::filesystem::permissions(dir / "z3", std::filesystem::perms::owner_all);
    setenv("PATH", dir.c_str(), 1);
    CHECK(resolve_solver_path() == (dir / "z3").string());

    std::filesystem::remove(dir / "z3");
    CHECK_FALSE(resolve_solver_path().has_value());
}

TEST_CASE("raw scripts round-trip through the external process", "[smt]") {
    Solver s = make_solver();
    CHECK(s.raw_check("(set-logic LIA)\n(declare-const x Int)\n"
                      "(assert (= x 3))\n(check-sat)\n") == SolverResult::Sat);
    CHECK(s.last_script().find("(= x 3)") != std::string::npos);

    std::string model;
    CHECK(s.raw_check("(declare-const x Int)\n(assert (> x 41))\n"
                      "(check-sat)\n(get-model)\n",
                      &model) == SolverResult::Sat);
    CHECK_THAT(model, ContainsSubstring("define-fun"));
    CHECK(s.stats().queries == 2);
    CHECK(s.stats().sat == 2);
    CHECK(s.stats().total_ms > 0);
}

TEST_CASE("a solver that prints no verdict raises an error", "[smt]") {
    Solver quiet("/bin/true");
    CHECK_THROWS_MATCHES(quiet.raw_check("(check-sat)\n"), SolverError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("no verdict")));
    Solver missing("/no/such/binary");
    CHECK_THROWS_MATCHES(missing.raw_check("(check-sat)\n"), SolverError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("exit 127")));
}

TEST_CASE("restriction satisfiability treats parameters as constants", "[smt]") {
    Solver s = make_solver();
    Param mu{1, {}};
    Formula ge = Formula::compare(CmpOp::Ge, Term::parameter(mu), lit(2));
    CHECK(s.check_restriction_sat(ge) == SolverResult::Sat);
    Formula contradiction = Formula::conj2(
        ge, Formula::compare(CmpOp::Le, Term::parameter(mu), lit(1)));
    CHECK(s.check_restriction_sat(contradiction) == SolverResult::Unsat);
}

TEST_CASE("closed queries decide validity, open ones are rejected", "[smt]") {
    Solver s = make_solver();
    Symbol x{VarName{"x", 1}};
    Formula valid = Formula::forall(
        x, Formula::eq(Term::add(tv("x", 1), lit(0)), tv("x", 1)));
    CHECK(s.check_closed(valid) == SolverResult::Sat);

    Formula invalid = Formula::forall(
        x, Formula::compare(CmpOp::Gt, tv("x", 1), lit(0)));
    CHECK(s.check_closed(invalid) == SolverResult::Unsat);

    Formula open = Formula::compare(CmpOp::Gt, tv("x", 1), lit(0));
    CHECK_THROWS_AS(s.check_closed(open), std::logic_error);
}

TEST_CASE("equivalence checking shares free symbols", "[smt]") {
    Solver s = make_solver();
    Formula doubled = Formula::eq(Term::add(tv("x"), tv("x")), lit(6));
    Formula scaled = Formula::eq(Term::mul(lit(2), tv("x")), lit(6));
    CHECK(s.check_equiv(doubled, scaled));

    std::string model;
    Formula shifted = Formula::eq(Term::add(tv("x"), lit(1)), lit(6));
    CHECK_FALSE(s.check_equiv(doubled, shifted, &model));
    CHECK_THAT(model, ContainsSubstring("define-fun"));

    // An inconclusive solver is an environment failure, not a verdict.
    Solver hurried(test::solver_path_for_tests(), 1);
    CHECK_THROWS_AS(hurried.check_equiv(doubled, scaled), SolverError);
}

TEST_CASE("timeouts are reported as unknown and counted", "[smt]") {
    Solver s(test::solver_path_for_tests(), 1);
    CHECK(s.raw_check("(check-sat)\n") == SolverResult::Unknown);
    CHECK(s.stats().timeouts == 1);
    CHECK(s.stats().unknown == 1);
}

TEST_CASE("the logic downgrades to NIA only for variable products", "[smt]") {
    Formula linear = Formula::eq(Term::mul(lit(2), Term::add(tv("x"), tv("y"))), lit(4));
    Formula square = Formula::eq(Term::mul(tv("x"), tv("x")), lit(4));
    Solver s = make_solver();
    CHECK(s.build_script(linear, false).rfind("(set-logic LIA)", 0) == 0);
    CHECK(s.build_script(square, false).rfind("(set-logic NIA)", 0) == 0);
    CHECK(s.raw_check(s.build_script(square, false)) == SolverResult::Sat);
}

TEST_CASE("printed names avoid every reserved or synthetic form", "[smt]") {
    CHECK(to_smt2(Formula::eq(tv("and"), lit(1))) == "(= v_and 1)");
    CHECK(to_smt2(Formula::eq(tv("mu_3"), lit(1))) == "(= v_mu_3 1)");
    CHECK(to_smt2(Formula::eq(tv("v_x"), lit(1))) == "(= v_v_x 1)");
    CHECK(to_smt2(Formula::eq(tv("mu_x"), lit(1))) == "(= mu_x 1)");
    CHECK(to_smt2(Formula::eq(tv("x", 2), lit(1))) == "(= x_2 1)");
    CHECK(to_smt2(Formula::eq(Term::parameter(Param{3, {}}), lit(1))) == "(= mu_3 1)");

    CHECK(to_smt2(Formula::compare(CmpOp::Ne, tv("x"), tv("y"))) == "(not (= x y))");
    CHECK(to_smt2(Formula::eq(tv("x"), lit(-5))) == "(= x (- 5))");
    CHECK(to_smt2(Formula::implies(Formula::tt(), Formula::ff())) == "(=> true false)");
}

TEST_CASE("adjacent same-kind binders merge into one quantifier", "[smt]") {
    Symbol a{VarName{"a", 0}}, b{VarName{"b", 0}};
    Formula merged = Formula::exists(a, Formula::exists(b, Formula::eq(tv("a"), tv("b"))));
    CHECK(to_smt2(merged) == "(exists ((a Int) (b Int)) (= a b))");
    Formula mixed = Formula::forall(a, Formula::exists(b, Formula::eq(tv("a"), tv("b"))));
    CHECK(to_smt2(mixed) == "(forall ((a Int)) (exists ((b Int)) (= a b)))");
}

TEST_CASE("dumping writes each query as a numbered script", "[smt]") {
    auto dir = std::filesystem::temp_directory_path() / "forex_smt_dump_test";
    std::filesystem::remove_all(dir);
    {
        Solver s(test::solver_path_for_tests(), 20000, dir.string());
        s.check_restriction_sat(Formula::tt());
        s.check_restriction_sat(Formula::ff());
    }
    std::ifstream first(dir / "query_0.smt2");
    REQUIRE(first);
    std::string text((std::istreambuf_iterator<char>(first)), {});
    CHECK_THAT(text, ContainsSubstring("(check-sat)"));
    CHECK(std::filesystem::exists(dir / "query_1.smt2"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("the closing query nests quantifiers outside the restriction", "[smt]") {
    VarName x{"x", 1}, y{"y", 2};
    Param mu{1, {}};
    Formula c = Formula::compare(CmpOp::Ge, Term::parameter(mu), lit(2));
    Formula xi = Formula::eq(Term::variable(y), Term::parameter(mu));
    Formula post = Formula::compare(CmpOp::Ge, Term::variable(y), lit(2));
    Formula q = build_final_query({{x}}, {{y}}, {mu}, c, xi, post);

    REQUIRE(q.kind() == Formula::Kind::Forall);
    CHECK(q.bound() == Symbol{x});
    const Formula& ex = q.body();
    REQUIRE(ex.kind() == Formula::Kind::Exists);
    CHECK(ex.bound() == Symbol{mu});
    const Formula& both = ex.body();
    REQUIRE(both.kind() == Formula::Kind::And);
    REQUIRE(both.args().size() == 2);
    CHECK(equal(both.args()[0], c));
    REQUIRE(both.args()[1].kind() == Formula::Kind::Forall);
    CHECK(both.args()[1].bound() == Symbol{y});
    CHECK(both.args()[1].body().kind() == Formula::Kind::Implies);

    Solver s = make_solver();
    CHECK(s.check_closed(q) == SolverResult::Sat);
}
