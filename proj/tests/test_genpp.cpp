// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#include <forex/genpp.hpp>
#include <forex/interp.hpp>
#include <forex/verify.hpp>

#include "support/corpus.hpp"
#include "support/random_feht.hpp"
#include "support/textbook_sp.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace forex;

namespace {

VarName v(const char* base, int copy = 0) { return VarName{base, copy}; }
Term tv(const char* base, int copy = 0) { return Term::variable(v(base, copy)); }
Term lit(long long n) { return Term::literal(n); }

Solver make_solver() { return Solver(test::solver_path_for_tests(), 20000); }

// First statement of a one-copy spec body, whatever shape the parser gave it.
Stmt head_of(const Feht& f) { return normalize_head(f.programs[0].remaining).first(); }

// Brute-force equivalence on a box of assignments to the given variables.
// Quantifiers inside the formulas range over [-radius, radius] too, so the
// radius has to cover any witness the formulas need.
bool equiv_on_grid(const Formula& a, const Formula& b, const std::vector<VarName>& vars,
                   long long radius, const ParamEval& kappa = {}) {
    std::vector<long long> vals(vars.size(), -radius);
    for (;;) {
        State st;
        for (size_t i = 0; i < vars.size(); ++i) st[vars[i]] = vals[i];
        if (eval(a, st, kappa, radius) != eval(b, st, kappa, radius)) return false;
        size_t i = 0;
        while (i < vals.size() && ++vals[i] > radius) vals[i++] = -radius;
        if (i == vals.size()) return true;
    }
}

}  // namespace

TEST_CASE("assignment to an untouched variable needs no binder", "[genpp]") {
    Formula phi = Formula::eq(tv("y", 1), lit(0));
    Feht f = parse_spec("[forall]\nx = y + 1;\n");
    Stmt s = head_of(f);
    Formula out = Engine::sp_assign(phi, s.var(), s.expr());
    CHECK(detail::count_binders(out) == 0);
    Formula expect = Formula::conj2(phi, Formula::eq(tv("x", 1), Term::add(tv("y", 1), lit(1))));
    CHECK(equiv_on_grid(out, expect, {v("x", 1), v("y", 1)}, 3));
}

TEST_CASE("overwriting an assignment shifts the old value behind a binder", "[genpp]") {
    Formula phi = Formula::eq(tv("x", 1), lit(5));
    Feht f = parse_spec("[forall]\nx = x + 1;\n");
    Stmt s = head_of(f);
    Formula out = Engine::sp_assign(phi, s.var(), s.expr());
    CHECK(detail::count_binders(out) == 1);
    CHECK(equiv_on_grid(out, Formula::eq(tv("x", 1), lit(6)), {v("x", 1)}, 8));
    // Evaluation-time normalization removes the solvable binder again.
    CHECK(detail::count_binders(normalize_for_eval(out)) == 0);

    Feht g = parse_spec("[forall]\nx = 2 * x;\n");
    Stmt dbl = head_of(g);
    Formula sq = Engine::sp_assign(phi, dbl.var(), dbl.expr());
    CHECK(equiv_on_grid(sq, Formula::eq(tv("x", 1), lit(10)), {v("x", 1)}, 12));
}

TEST_CASE("universal nondeterminism forgets, existential pins a parameter", "[genpp]") {
    Formula phi = Formula::conj2(Formula::eq(tv("x", 1), lit(5)),
                                 Formula::eq(tv("y", 1), lit(2)));
    Formula forgot = Engine::sp_havoc_forall(phi, v("x", 1));
    CHECK(free_vars(forgot) == std::set<VarName>{v("y", 1)});
    CHECK(equiv_on_grid(forgot, Formula::eq(tv("y", 1), lit(2)), {v("x", 1), v("y", 1)}, 6));

    Param mu{1, v("x", 1)};
    Formula pinned = Engine::sp_havoc_exists(Formula::eq(tv("x", 1), lit(5)), v("x", 1), mu);
    ParamEval kappa;
    kappa.values[1] = 7;
    CHECK(equiv_on_grid(pinned, Formula::eq(tv("x", 1), Term::parameter(mu)),
                        {v("x", 1)}, 8, kappa));
}

TEST_CASE("an existential assume demands the guard, not filters by it", "[genpp]") {
    Param mu{1, v("x", 1)};
    Formula phi = Formula::eq(tv("x", 1), Term::parameter(mu));
    Feht f = parse_spec("[forall]\nassume(x >= 2);\n");
    Formula c = Engine::assume_guarantee(phi, head_of(f).cond());
    CHECK(free_vars(c).empty());  // closed over program variables
    ParamEval lo, hi;
    lo.values[1] = 1;
    hi.values[1] = 2;
    CHECK_FALSE(eval(c, State{}, lo, 6));
    CHECK(eval(c, State{}, hi, 6));
}

TEST_CASE("branches join as a disjunction of both outcomes", "[genpp]") {
    Feht f = parse_spec("[forall]\nif (x > 0) { y = 1; } else { y = 2; }\n");
    Solver s = make_solver();
    Engine eng(s);
    ParametricAssertion pa = eng.analyze(f);
    CHECK(pa.restriction.is_true());
    CHECK(s.stats().queries == 0);  // loop-free analysis is solver-free
    Formula expect = parse_formula_text("x_1 > 0 && y_1 == 1 || x_1 <= 0 && y_1 == 2", 1);
    CHECK(s.check_equiv(pa.xi, expect));
}

TEST_CASE("the one-sided nondeterminism pair derives the known description", "[genpp]") {
    Feht f = load_spec(test::bench_dir() + "/ex2.feht");
    Solver s = make_solver();
    Engine eng(s);
    ParametricAssertion pa = eng.analyze(f);

    REQUIRE(eng.minted_params().size() == 1);
    const Param& mu = eng.minted_params()[0];
    CHECK(mu.id == 1);
    CHECK(mu.minted_for == v("y", 2));

    Formula xi = Formula::conj2(Formula::compare(CmpOp::Ge, tv("x", 1), lit(9)),
                                Formula::eq(tv("y", 2), Term::parameter(mu)));
    Formula c = Formula::compare(CmpOp::Ge, Term::parameter(mu), lit(2));
    CHECK(s.check_equiv(pa.restriction, c));
    // The descriptions only need to agree for parameter choices the
    // restriction admits; the derived one carries the assumed guard inside.
    Formula same = Formula::implies(c, Formula::iff(pa.xi, xi));
    for (const auto& p : free_params(same)) same = Formula::forall(Symbol{p}, same);
    same = forall_close_vars(same);
    CHECK(s.check_closed(same) == SolverResult::Sat);

    Formula q = final_query_for(f, pa, eng.minted_params());
    CHECK(s.check_closed(q) == SolverResult::Sat);
}

TEST_CASE("unit demands surface in the restriction, not during analysis", "[genpp]") {
    // The existential copy's assume has no execution for negative inputs;
    // analysis still completes and the contradiction sits in the restriction.
    Feht f = load_spec(test::bench_dir() + "/loopfree/term_gap.feht");
    Solver s = make_solver();
    Engine eng(s);
    ParametricAssertion pa = eng.analyze(f);
    CHECK(s.stats().queries == 0);
    CHECK(s.check_restriction_sat(pa.restriction) == SolverResult::Unsat);
}

TEST_CASE("universal copies step before existential ones", "[genpp]") {
    Feht f = parse_spec("[exists]\np = 3;\n[forall]\na = 1;\na = 2;\n");
    REQUIRE(f.programs[0].quant == Quant::Forall);  // reordered at parse time
    Solver s = make_solver();
    Engine eng(s, EngineConfig{.trace = true});
    eng.analyze(f);
    std::vector<int> assign_copies;
    for (const auto& ev : eng.trace())
        if (ev.rule == "assign") assign_copies.push_back(ev.copy);
    CHECK(assign_copies == std::vector<int>{1, 1, 2});

    Engine quiet(s);
    quiet.analyze(f);
    CHECK(quiet.trace().empty());
}

TEST_CASE("derived descriptions survive the bounded two-condition check", "[genpp]") {
    Solver s = make_solver();
    test::RandomFeht gen(505);
    int checked = 0, skipped = 0;
    for (int i = 0; i < 80; ++i) {
        Feht f = gen.next();
        std::string msg = test::check_derived_postcondition(f, s);
        if (msg == "skip") {
            ++skipped;
            continue;
        }
        ++checked;
        INFO(msg);
        REQUIRE(msg.empty());
    }
    CHECK(checked >= 40);  // the skip guard must not eat the sample
}

TEST_CASE("purely universal analysis matches the textbook recursion", "[genpp]") {
    Solver s = make_solver();
    for (const char* text :
         {"[pre]\nz_1 >= 0\n[forall]\nx = nondet();\nif (x > z) { y = x; } else { y = z; }\n",
          "[forall]\nx = 1;\nx = x + x;\nassume(x >= y);\n"}) {
        Feht f = parse_spec(text);
        Engine eng(s);
        ParametricAssertion pa = eng.analyze(f);
        CHECK(pa.restriction.is_true());
        CHECK(eng.minted_params().empty());
        CHECK(s.check_equiv(pa.xi, test::textbook_sp(f.pre, f.programs[0].remaining)));
    }
}
