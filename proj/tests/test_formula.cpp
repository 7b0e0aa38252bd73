// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#include <forex/formula.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace forex;

namespace {

VarName v(const char* base, int copy = 0) { return VarName{base, copy}; }
Term tlit(long long n) { return Term::literal(Int(n)); }
Term tvar(const char* base, int copy = 0) { return Term::variable(v(base, copy)); }
Formula feq(Term a, Term b) { return Formula::eq(std::move(a), std::move(b)); }

}  // namespace

TEST_CASE("formula printing is compact and precedence-aware", "[formula]") {
    Formula a = feq(Term::add(tvar("x", 1), tlit(1)), tlit(2));
    Formula b = Formula::compare(CmpOp::Ge, tvar("y", 2), tlit(0));
    CHECK(to_string(a) == "x_1 + 1 == 2");
    CHECK(to_string(Formula::conj2(a, b)) == "x_1 + 1 == 2 && y_2 >= 0");
    CHECK(to_string(Formula::conj2(Formula::disj2(a, b), b)) ==
          "(x_1 + 1 == 2 || y_2 >= 0) && y_2 >= 0");
    CHECK(to_string(Formula::implies(a, b)) == "x_1 + 1 == 2 -> y_2 >= 0");
    CHECK(to_string(Formula::iff(a, b)) == "x_1 + 1 == 2 <-> y_2 >= 0");
    CHECK(to_string(Formula::negate(a)) == "!(x_1 + 1 == 2)");
    CHECK(to_string(Term::mul(tlit(-2), tvar("x"))) == "(-2) * x");
    CHECK(to_string(Term::sub(tvar("x"), Term::sub(tvar("y"), tvar("z")))) == "x - (y - z)");
}

TEST_CASE("like-quantifier runs print as one binder list", "[formula]") {
    Formula body = feq(tvar("x", 1), tvar("y", 1));
    Formula f = Formula::exists(Symbol{v("x", 1)}, Formula::exists(Symbol{v("y", 1)}, body));
    CHECK(to_string(f) == "(exists x_1, y_1. x_1 == y_1)");
    Formula g = Formula::forall(Symbol{v("x", 1)}, Formula::exists(Symbol{v("y", 1)}, body));
    CHECK(to_string(g) == "(forall x_1. (exists y_1. x_1 == y_1))");
}

TEST_CASE("free symbols respect binder shadowing", "[formula]") {
    Formula inner = Formula::exists(Symbol{v("x")}, feq(tvar("x"), tlit(1)));
    Formula f = Formula::conj2(feq(tvar("x"), tlit(0)), inner);
    CHECK(free_vars(inner).empty());
    CHECK(free_vars(f) == std::set<VarName>{v("x")});

    Param mu{3, {}};
    Formula pf = Formula::exists(Symbol{mu}, feq(Term::parameter(mu), tlit(0)));
    CHECK(free_params(pf).empty());
    CHECK(free_params(Formula::conj2(pf, feq(Term::parameter(mu), tvar("z")))) ==
          std::set<Param>{mu});
    CHECK(occurs_free(f, Symbol{v("x")}));
    CHECK_FALSE(occurs_free(inner, Symbol{v("x")}));
}

TEST_CASE("substitution avoids capture by renaming the binder", "[formula]") {
    // exists y. x == y + 1 holds for every x; substituting y for x must not
    // collapse it into the unsatisfiable exists y. y == y + 1.
    Formula f = Formula::exists(Symbol{v("y", 1)},
                                feq(tvar("x", 1), Term::add(tvar("y", 1), tlit(1))));
    Formula g = subst_var(f, v("x", 1), tvar("y", 1));
    State st;
    st[v("y", 1)] = 5;
    CHECK(eval(g, st, 10));
    CHECK(free_vars(g) == std::set<VarName>{v("y", 1)});

    // Substituting the bound variable itself is a no-op.
    Formula shadowed = subst_var(f, v("y", 1), tlit(42));
    CHECK(equal(shadowed, f));
}

TEST_CASE("parameter instantiation replaces only what kappa assigns", "[formula]") {
    Param mu1{1, {}}, mu2{2, {}};
    Formula f = Formula::conj2(feq(tvar("x"), Term::parameter(mu1)),
                               Formula::compare(CmpOp::Ge, Term::parameter(mu2), tlit(0)));
    ParamEval kappa;
    kappa.values[1] = 5;
    Formula g = instantiate_params(f, kappa);
    CHECK(free_params(g) == std::set<Param>{mu2});
    State st;
    st[v("x")] = 5;
    ParamEval rest;
    rest.values[2] = 0;
    CHECK(eval(g, st, rest, 4));
    st[v("x")] = 6;
    CHECK_FALSE(eval(g, st, rest, 4));
}

TEST_CASE("closure helpers bind outermost-first", "[formula]") {
    Formula f = feq(tvar("a"), tvar("b"));
    Formula all = close_forall({v("a"), v("b")}, f);
    REQUIRE(all.kind() == Formula::Kind::Forall);
    CHECK(all.bound() == Symbol{v("a")});
    CHECK(all.body().bound() == Symbol{v("b")});
    CHECK(free_vars(all).empty());

    Formula some = close_exists({v("a"), v("b")}, f);
    CHECK(some.kind() == Formula::Kind::Exists);
    CHECK(eval(some, State{}, 3));        // witness a = b inside any box
    CHECK_FALSE(eval(all, State{}, 3));   // a != b refutes the closure
}

TEST_CASE("quantifiers range over the bounded box only", "[formula]") {
    Formula seven = Formula::exists(Symbol{v("x")}, feq(tvar("x"), tlit(7)));
    CHECK_FALSE(eval(seven, State{}, 6));
    CHECK(eval(seven, State{}, 7));

    // Bounded semantics: a claim false over the integers can hold in a box.
    Formula capped = Formula::forall(Symbol{v("x")},
                                     Formula::compare(CmpOp::Le, tvar("x"), tlit(6)));
    CHECK(eval(capped, State{}, 6));
    CHECK_FALSE(eval(capped, State{}, 7));

    Param mu{9, {}};
    Formula pwit = Formula::exists(Symbol{mu}, feq(Term::parameter(mu), tlit(-3)));
    CHECK(eval(pwit, State{}, 3));
    CHECK_FALSE(eval(pwit, State{}, 2));
}

TEST_CASE("embedded guards agree with direct guard evaluation", "[formula]") {
    BoolExpr b = BoolExpr::disj(
        BoolExpr::conj(BoolExpr::compare(CmpOp::Lt, ArithExpr::variable(v("x")),
                                         ArithExpr::variable(v("y"))),
                       BoolExpr::negate(BoolExpr::compare(CmpOp::Eq, ArithExpr::variable(v("y")),
                                                          ArithExpr::literal(0)))),
        BoolExpr::compare(CmpOp::Ge, ArithExpr::variable(v("x")), ArithExpr::literal(2)));
    Formula f = embed(b);
    for (long long x = -2; x <= 2; ++x) {
        for (long long y = -2; y <= 2; ++y) {
            State st;
            st[v("x")] = x;
            st[v("y")] = y;
            CHECK(eval_bool(b, st) == eval(f, st, 4));
        }
    }
}

TEST_CASE("structural formula equality is order-sensitive", "[formula]") {
    Formula a = feq(tvar("x"), tlit(0));
    Formula b = feq(tvar("y"), tlit(1));
    CHECK(equal(Formula::conj2(a, b), Formula::conj2(a, b)));
    CHECK_FALSE(equal(Formula::conj2(a, b), Formula::conj2(b, a)));
    CHECK_FALSE(equal(a, feq(tvar("x"), tlit(1))));
    CHECK_FALSE(equal(Formula::exists(Symbol{v("x")}, a), Formula::forall(Symbol{v("x")}, a)));
    CHECK(equal(Formula::tt(), Formula::tt()));
    CHECK_FALSE(equal(Formula::tt(), Formula::ff()));
}

TEST_CASE("parameter mint source issues strictly increasing ids", "[formula]") {
    ParamPool pool;
    Param p1 = pool.fresh(v("y", 2));
    Param p2 = pool.fresh(v("z", 2));
    CHECK(p1.id < p2.id);
    CHECK(p1.minted_for == v("y", 2));
    CHECK(p1.engine_minted());
    CHECK_FALSE(Param{7, {}}.engine_minted());
    CHECK(pool.minted() == 2);
    CHECK(p1.str() == "mu_" + std::to_string(p1.id));
}
