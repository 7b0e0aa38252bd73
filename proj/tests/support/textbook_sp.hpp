// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// A plain textbook strongest-postcondition recursion over loop-free
// statements, kept deliberately separate from the engine: no simplification,
// no fresh-variable elision, assignments always introduce a binder. Used to
// cross-check the engine's output on purely universal problems.

#include <forex/formula.hpp>

namespace forex::test {

inline Formula textbook_sp(const Formula& phi, const Stmt& s) {
    switch (s.kind()) {
    case Stmt::Kind::Skip: return phi;
    case Stmt::Kind::Assign: {
        const VarName& x = s.var();
        Term e = embed(s.expr());
        std::set<VarName> avoid = free_vars(phi);
        std::set<VarName> evs;
        collect_vars(s.expr(), evs);
        avoid.insert(evs.begin(), evs.end());
        avoid.insert(x);
        VarName xp = fresh_var_like(x, avoid);
        return Formula::exists(
            Symbol{xp},
            Formula::conj2(subst_var(phi, x, Term::variable(xp)),
                           Formula::eq(Term::variable(x),
                                       subst_var_term(e, x, Term::variable(xp)))));
    }
    case Stmt::Kind::Havoc: return Formula::exists(Symbol{s.var()}, phi);
    case Stmt::Kind::Assume: return Formula::conj2(phi, embed(s.cond()));
    case Stmt::Kind::Seq: return textbook_sp(textbook_sp(phi, s.first()), s.second());
    case Stmt::Kind::If: {
        Formula g = embed(s.cond());
        return Formula::disj2(
            textbook_sp(Formula::conj2(phi, g), s.then_branch()),
            textbook_sp(Formula::conj2(phi, Formula::negate(g)), s.else_branch()));
    }
    case Stmt::Kind::While: throw std::invalid_argument("textbook_sp: loops unsupported");
    }
    throw std::logic_error("bad Stmt");
}

}  // namespace forex::test
