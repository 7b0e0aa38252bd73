// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#include <forex/simplify.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace forex;

namespace {

VarName v(const char* base, int copy = 0) { return VarName{base, copy}; }
Term tlit(long long n) { return Term::literal(Int(n)); }
Term tvar(const char* base, int copy = 0) { return Term::variable(v(base, copy)); }
Formula feq(Term a, Term b) { return Formula::eq(std::move(a), std::move(b)); }

// Semantic agreement of f and g over a small grid of states for the given
// free variables, with a radius generous enough for all needed witnesses.
void check_equivalent(const Formula& f, const Formula& g, const std::vector<VarName>& vars,
                      long long radius = 12) {
    std::vector<long long> val(vars.size(), -3);
    for (;;) {
        State st;
        for (size_t i = 0; i < vars.size(); ++i) st[vars[i]] = val[i];
        INFO("state " << [&] {
            std::string s;
            for (size_t i = 0; i < vars.size(); ++i)
                s += vars[i].str() + "=" + std::to_string(val[i]) + " ";
            return s;
        }());
        CHECK(eval(f, st, radius) == eval(g, st, radius));
        size_t i = 0;
        for (; i < vars.size(); ++i) {
            if (++val[i] <= 3) break;
            val[i] = -3;
        }
        if (i == vars.size() || vars.empty()) break;
    }
}

}  // namespace

TEST_CASE("term folding collapses constants and units", "[simplify]") {
    CHECK(simplify(Term::add(tlit(2), tlit(3))).value() == 5);
    CHECK(simplify(Term::sub(tlit(2), tlit(3))).value() == -1);
    CHECK(simplify(Term::mul(tlit(4), tlit(-2))).value() == -8);
    CHECK(equal(simplify(Term::add(tvar("x"), tlit(0))), tvar("x")));
    CHECK(equal(simplify(Term::add(tlit(0), tvar("x"))), tvar("x")));
    CHECK(equal(simplify(Term::sub(tvar("x"), tlit(0))), tvar("x")));
    CHECK(equal(simplify(Term::mul(tlit(1), tvar("x"))), tvar("x")));
    CHECK(simplify(Term::mul(tvar("x"), tlit(0))).value() == 0);
    // Non-constant structure survives untouched.
    Term t = Term::mul(tvar("x"), tvar("y"));
    CHECK(equal(simplify(t), t));
}

TEST_CASE("boolean identities reduce to constants where possible", "[simplify]") {
    Formula a = feq(tvar("x"), tlit(0));
    CHECK(simplify(Formula::conj2(a, Formula::tt())).kind() == Formula::Kind::Compare);
    CHECK(simplify(Formula::conj2(a, Formula::ff())).is_false());
    CHECK(simplify(Formula::disj2(a, Formula::tt())).is_true());
    CHECK(equal(simplify(Formula::disj2(a, Formula::ff())), a));
    CHECK(simplify(Formula::negate(Formula::negate(a))).kind() == Formula::Kind::Compare);
    CHECK(simplify(Formula::implies(Formula::ff(), a)).is_true());
    CHECK(equal(simplify(Formula::implies(Formula::tt(), a)), a));
    CHECK(equal(simplify(Formula::iff(a, Formula::tt())), a));
    CHECK(simplify(feq(tlit(2), tlit(2))).is_true());
    CHECK(simplify(Formula::compare(CmpOp::Lt, tlit(2), tlit(2))).is_false());
    // Constant bodies absorb their binder: the integers are nonempty.
    CHECK(simplify(Formula::exists(Symbol{v("x")}, feq(tlit(1), tlit(1)))).is_true());
    CHECK(simplify(Formula::forall(Symbol{v("x")}, Formula::ff())).is_false());
}

TEST_CASE("nested conjunctions and disjunctions flatten", "[simplify]") {
    Formula a = feq(tvar("a"), tlit(0));
    Formula b = feq(tvar("b"), tlit(0));
    Formula c = feq(tvar("c"), tlit(0));
    Formula f = simplify(Formula::conj2(a, Formula::conj2(b, c)));
    REQUIRE(f.kind() == Formula::Kind::And);
    CHECK(f.args().size() == 3);
    Formula g = simplify(Formula::disj2(Formula::disj2(a, b), c));
    REQUIRE(g.kind() == Formula::Kind::Or);
    CHECK(g.args().size() == 3);
}

TEST_CASE("linear equations solve for a symbol occurring once", "[simplify]") {
    Symbol x{v("x")};
    auto def = detail::solve_for(Term::add(tvar("x"), tlit(1)), tlit(7), x);
    REQUIRE(def);
    CHECK(simplify(*def).value() == 6);

    def = detail::solve_for(Term::mul(tlit(-1), tvar("x")), tlit(4), x);
    REQUIRE(def);
    CHECK(simplify(*def).value() == -4);

    // Solving x - y == 3 for y.
    def = detail::solve_for(Term::sub(tvar("x"), tvar("y")), tlit(3), Symbol{v("y")});
    REQUIRE(def);
    CHECK(equal(simplify(*def), simplify(Term::sub(tvar("x"), tlit(3)))));

    // No exact integer division, repeated occurrence, or both-sides cases.
    CHECK_FALSE(detail::solve_for(Term::mul(tlit(2), tvar("x")), tlit(6), x));
    CHECK_FALSE(detail::solve_for(Term::add(tvar("x"), tvar("x")), tlit(4), x));
    CHECK_FALSE(detail::solve_for(tvar("x"), Term::add(tvar("x"), tlit(1)), x));
    CHECK_FALSE(detail::solve_for(tvar("y"), tlit(0), x));
}

TEST_CASE("one-point rule eliminates pinned existentials", "[simplify]") {
    // exists x. x == 5 && y == x + 1  collapses to  y == 6.
    Formula f = Formula::exists(
        Symbol{v("x")}, Formula::conj2(feq(tvar("x"), tlit(5)),
                                       feq(tvar("y"), Term::add(tvar("x"), tlit(1)))));
    Formula n = normalize_for_eval(f);
    CHECK(n.kind() == Formula::Kind::Compare);
    State st;
    st[v("y")] = 6;
    CHECK(eval(n, st, 3));
    st[v("y")] = 5;
    CHECK_FALSE(eval(n, st, 3));
}

TEST_CASE("chained definitions eliminate every binder", "[simplify]") {
    // exists a b. a == b && b == x && a >= 0  is just  x >= 0.
    Formula f = Formula::exists(
        Symbol{v("a")},
        Formula::exists(Symbol{v("b")},
                        Formula::conj({feq(tvar("a"), tvar("b")), feq(tvar("b"), tvar("x")),
                                       Formula::compare(CmpOp::Ge, tvar("a"), tlit(0))})));
    Formula n = normalize_for_eval(f);
    CHECK(free_vars(n) == std::set<VarName>{v("x")});
    CHECK(n.kind() == Formula::Kind::Compare);
    check_equivalent(f, n, {v("x")});
}

TEST_CASE("universal one-point reduces hypothesis equalities", "[simplify]") {
    // forall y. y == x - 1 -> y < x  becomes a quantifier-free tautology.
    Formula f = Formula::forall(
        Symbol{v("y")}, Formula::implies(feq(tvar("y"), Term::sub(tvar("x"), tlit(1))),
                                         Formula::compare(CmpOp::Lt, tvar("y"), tvar("x"))));
    Formula n = normalize_for_eval(f);
    CHECK(n.kind() != Formula::Kind::Forall);
    check_equivalent(f, n, {v("x")});
}

TEST_CASE("binders distribute and drop where logic permits", "[simplify]") {
    Formula dis = Formula::exists(
        Symbol{v("y")}, Formula::disj2(feq(tvar("x"), tvar("y")), feq(tvar("y"), tlit(2))));
    Formula n = normalize_for_eval(dis);
    // Both disjuncts are one-point solvable, so no binder survives.
    CHECK(free_vars(n) == std::set<VarName>{v("x")});
    check_equivalent(dis, n, {v("x")});

    Formula dead = Formula::exists(Symbol{v("z")}, feq(tvar("x"), tlit(1)));
    CHECK(normalize_for_eval(dead).kind() == Formula::Kind::Compare);

    Formula univ = Formula::forall(
        Symbol{v("y")}, Formula::conj2(Formula::compare(CmpOp::Ge, tvar("y"), tvar("x")),
                                       feq(tvar("x"), tvar("x"))));
    check_equivalent(univ, normalize_for_eval(univ), {v("x")});
}

TEST_CASE("normalization preserves bounded semantics and is idempotent", "[simplify]") {
    std::vector<Formula> cases;
    cases.push_back(Formula::exists(
        Symbol{v("y")}, Formula::conj2(feq(tvar("y"), Term::add(tvar("x"), tlit(1))),
                                       Formula::compare(CmpOp::Ge, tvar("y"), tlit(0)))));
    cases.push_back(Formula::exists(
        Symbol{v("a")},
        Formula::disj2(Formula::conj2(feq(tvar("a"), tvar("x")),
                                      Formula::compare(CmpOp::Le, tvar("a"), tvar("z"))),
                       Formula::conj2(feq(tvar("a"), tlit(0)), feq(tvar("z"), tvar("a"))))));
    cases.push_back(Formula::forall(
        Symbol{v("k")}, Formula::implies(Formula::conj2(feq(tvar("k"), tvar("x")),
                                                        Formula::compare(CmpOp::Ge, tvar("k"),
                                                                         tlit(0))),
                                         Formula::compare(CmpOp::Ge, tvar("z"),
                                                          Term::sub(tvar("k"), tlit(3))))));
    // A binder that survives: no equality defines it.
    cases.push_back(Formula::exists(
        Symbol{v("w")}, Formula::conj2(Formula::compare(CmpOp::Le, tvar("w"), tvar("x")),
                                       Formula::compare(CmpOp::Le, tvar("z"), tvar("w")))));
    for (const auto& f : cases) {
        Formula n = normalize_for_eval(f);
        check_equivalent(f, n, {v("x"), v("z")});
        CHECK(equal(normalize_for_eval(n), n));
    }
}
