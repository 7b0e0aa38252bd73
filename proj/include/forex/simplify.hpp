// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Equivalence-preserving formula rewrites. Two entry points:
//
//   simplify(f):           constant folding and and/or flattening; used
//                          before SMT emission. Keeps quantifier structure.
//   normalize_for_eval(f): additionally eliminates binders where logic
//                          alone permits (one-point rule, scope reduction,
//                          miniscoping over disjunctions). Used by the
//                          bounded oracle so that substitution-introduced
//                          quantifier chains do not blow up enumeration.
//
// All rewrites here are justified by first-order logic over the integers;
// none encode knowledge about how any particular engine builds formulas.

#include "formula.hpp"

namespace forex {

// ---------------------------------------------------------------------------
// Term folding: literal arithmetic, additive and multiplicative units.

inline Term simplify(const Term& t) {
    if (t.kind() != Term::Kind::Binary) return t;
    Term a = simplify(t.lhs());
    Term b = simplify(t.rhs());
    const bool la = a.kind() == Term::Kind::Literal;
    const bool lb = b.kind() == Term::Kind::Literal;
    if (la && lb) {
        switch (t.op()) {
        case ArithOp::Add: return Term::literal(a.value() + b.value());
        case ArithOp::Sub: return Term::literal(a.value() - b.value());
        case ArithOp::Mul: return Term::literal(a.value() * b.value());
        }
    }
    switch (t.op()) {
    case ArithOp::Add:
        if (la && a.value() == 0) return b;
        if (lb && b.value() == 0) return a;
        break;
    case ArithOp::Sub:
        if (lb && b.value() == 0) return a;
        break;
    case ArithOp::Mul:
        if ((la && a.value() == 0) || (lb && b.value() == 0)) return Term::literal(0);
        if (la && a.value() == 1) return b;
        if (lb && b.value() == 1) return a;
        break;
    }
    return Term::binary(t.op(), std::move(a), std::move(b));
}

// ---------------------------------------------------------------------------
// Formula simplification.

inline Formula simplify(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Compare: {
        Term l = simplify(f.cmp_lhs());
        Term r = simplify(f.cmp_rhs());
        if (l.kind() == Term::Kind::Literal && r.kind() == Term::Kind::Literal)
            return cmp_op_eval(f.cmp_op(), l.value(), r.value()) ? Formula::tt() : Formula::ff();
        return Formula::compare(f.cmp_op(), std::move(l), std::move(r));
    }
    case Formula::Kind::Not: {
        Formula a = simplify(f.arg());
        if (a.is_true()) return Formula::ff();
        if (a.is_false()) return Formula::tt();
        if (a.kind() == Formula::Kind::Not) return a.arg();
        return Formula::negate(std::move(a));
    }
    case Formula::Kind::And: {
        std::vector<Formula> out;
        for (const auto& g : f.args()) {
            Formula s = simplify(g);
            if (s.is_true()) continue;
            if (s.is_false()) return Formula::ff();
            if (s.kind() == Formula::Kind::And) {
                for (const auto& h : s.args()) out.push_back(h);
            } else {
                out.push_back(std::move(s));
            }
        }
        if (out.empty()) return Formula::tt();
        return Formula::conj(std::move(out));
    }
    case Formula::Kind::Or: {
        std::vector<Formula> out;
        for (const auto& g : f.args()) {
            Formula s = simplify(g);
            if (s.is_false()) continue;
            if (s.is_true()) return Formula::tt();
            if (s.kind() == Formula::Kind::Or) {
                for (const auto& h : s.args()) out.push_back(h);
            } else {
                out.push_back(std::move(s));
            }
        }
        if (out.empty()) return Formula::ff();
        return Formula::disj(std::move(out));
    }
    case Formula::Kind::Implies: {
        Formula a = simplify(f.lhs());
        Formula b = simplify(f.rhs());
        if (a.is_false() || b.is_true()) return Formula::tt();
        if (a.is_true()) return b;
        if (b.is_false()) return Formula::negate(std::move(a));
        return Formula::implies(std::move(a), std::move(b));
    }
    case Formula::Kind::Iff: {
        Formula a = simplify(f.lhs());
        Formula b = simplify(f.rhs());
        if (a.is_true()) return b;
        if (b.is_true()) return a;
        if (a.is_false()) return simplify(Formula::negate(std::move(b)));
        if (b.is_false()) return simplify(Formula::negate(std::move(a)));
        return Formula::iff(std::move(a), std::move(b));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        Formula body = simplify(f.body());
        // The integers are nonempty, so a constant body absorbs the binder.
        if (body.is_true() || body.is_false()) return body;
        return f.kind() == Formula::Kind::Exists ? Formula::exists(f.bound(), std::move(body))
                                                 : Formula::forall(f.bound(), std::move(body));
    }
    }
    throw std::logic_error("bad Formula");
}

// ---------------------------------------------------------------------------
// Binder elimination for evaluation.

namespace detail {

inline bool term_mentions(const Term& t, const Symbol& s) {
    std::set<VarName> v;
    std::set<Param> p;
    collect_term_symbols(t, v, p);
    if (std::holds_alternative<VarName>(s)) return v.count(std::get<VarName>(s)) > 0;
    return p.count(std::get<Param>(s)) > 0;
}

// Solves the linear equation lhs == rhs for symbol s, provided s occurs
// exactly once and only under +, -, or multiplication by +-1. Returns the
// defining term, which never mentions s.
inline std::optional<Term> solve_for(const Term& lhs, const Term& rhs, const Symbol& s) {
    const bool in_l = term_mentions(lhs, s);
    const bool in_r = term_mentions(rhs, s);
    if (in_l == in_r) return std::nullopt;
    Term side = in_l ? lhs : rhs;
    Term other = in_l ? rhs : lhs;
    for (;;) {
        switch (side.kind()) {
        case Term::Kind::Variable:
            if (std::holds_alternative<VarName>(s) && side.var() == std::get<VarName>(s))
                return other;
            return std::nullopt;
        case Term::Kind::Parameter:
            if (std::holds_alternative<Param>(s) && side.param() == std::get<Param>(s))
                return other;
            return std::nullopt;
        case Term::Kind::Literal: return std::nullopt;
        case Term::Kind::Binary: {
            const bool in_a = term_mentions(side.lhs(), s);
            const bool in_b = term_mentions(side.rhs(), s);
            if (in_a == in_b) return std::nullopt;
            switch (side.op()) {
            case ArithOp::Add:
                other = Term::sub(other, in_a ? side.rhs() : side.lhs());
                side = in_a ? side.lhs() : side.rhs();
                continue;
            case ArithOp::Sub:
                if (in_a) {
                    other = Term::add(other, side.rhs());
                    side = side.lhs();
                } else {
                    other = Term::sub(side.lhs(), other);
                    side = side.rhs();
                }
                continue;
            case ArithOp::Mul: {
                const Term& coeff = in_a ? side.rhs() : side.lhs();
                if (coeff.kind() != Term::Kind::Literal) return std::nullopt;
                if (coeff.value() == 1) {
                    side = in_a ? side.lhs() : side.rhs();
                    continue;
                }
                if (coeff.value() == -1) {
                    other = Term::sub(Term::literal(0), other);
                    side = in_a ? side.lhs() : side.rhs();
                    continue;
                }
                return std::nullopt;  // no exact integer division
            }
            }
            return std::nullopt;
        }
        }
    }
}

inline Formula subst_symbol(const Formula& f, const Symbol& s, const Term& t) {
    if (std::holds_alternative<VarName>(s)) return subst_var(f, std::get<VarName>(s), t);
    return subst_param(f, std::get<Param>(s), t);
}

inline Formula rebuild_quant(Formula::Kind k, const Symbol& s, Formula body) {
    return k == Formula::Kind::Exists ? Formula::exists(s, std::move(body))
                                      : Formula::forall(s, std::move(body));
}

inline Formula normalize_quant(Formula::Kind k, const Symbol& s, Formula body);
inline Formula normalize_inner(Formula::Kind k, const Symbol& s, Formula body);

inline Formula normalize_rec(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Compare: return f;
    case Formula::Kind::Not: return Formula::negate(normalize_rec(f.arg()));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::vector<Formula> out;
        out.reserve(f.args().size());
        for (const auto& g : f.args()) out.push_back(normalize_rec(g));
        return f.kind() == Formula::Kind::And ? Formula::conj(std::move(out))
                                              : Formula::disj(std::move(out));
    }
    case Formula::Kind::Implies:
        return Formula::implies(normalize_rec(f.lhs()), normalize_rec(f.rhs()));
    case Formula::Kind::Iff:
        return Formula::iff(normalize_rec(f.lhs()), normalize_rec(f.rhs()));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
        return normalize_quant(f.kind(), f.bound(), normalize_rec(f.body()));
    }
    throw std::logic_error("bad Formula");
}

inline Formula normalize_quant(Formula::Kind k, const Symbol& s, Formula body) {
    // Drop binders nothing depends on.
    if (!occurs_free(body, s)) return body;

    // Miniscope an existential over a disjunction.
    if (k == Formula::Kind::Exists && body.kind() == Formula::Kind::Or) {
        std::vector<Formula> out;
        out.reserve(body.args().size());
        for (const auto& g : body.args()) out.push_back(normalize_quant(k, s, g));
        return Formula::disj(std::move(out));
    }
    // Dually, a universal distributes over a conjunction.
    if (k == Formula::Kind::Forall && body.kind() == Formula::Kind::And) {
        std::vector<Formula> out;
        out.reserve(body.args().size());
        for (const auto& g : body.args()) out.push_back(normalize_quant(k, s, g));
        return Formula::conj(std::move(out));
    }

    // Scope reduction and the one-point rule on an existential conjunction.
    if (k == Formula::Kind::Exists && body.kind() == Formula::Kind::And) {
        std::vector<Formula> inside, outside;
        for (const auto& g : body.args())
            (occurs_free(g, s) ? inside : outside).push_back(g);
        if (inside.empty()) return Formula::conj(std::move(outside));  // unreachable, guarded above
        for (size_t i = 0; i < inside.size(); ++i) {
            const Formula& g = inside[i];
            if (g.kind() != Formula::Kind::Compare || g.cmp_op() != CmpOp::Eq) continue;
            auto def = solve_for(g.cmp_lhs(), g.cmp_rhs(), s);
            if (!def) continue;
            std::vector<Formula> rest = outside;
            for (size_t j = 0; j < inside.size(); ++j)
                if (j != i) rest.push_back(subst_symbol(inside[j], s, *def));
            return normalize_rec(Formula::conj(std::move(rest)));
        }
        Formula inner = normalize_inner(k, s, Formula::conj(std::move(inside)));
        if (outside.empty()) return inner;
        outside.push_back(std::move(inner));
        return Formula::conj(std::move(outside));
    }

    // One-point rule for a universal implication: forall s. (... && s == t && ...) -> g.
    if (k == Formula::Kind::Forall && body.kind() == Formula::Kind::Implies) {
        std::vector<Formula> hyp;
        if (body.lhs().kind() == Formula::Kind::And)
            hyp = body.lhs().args();
        else
            hyp = {body.lhs()};
        for (size_t i = 0; i < hyp.size(); ++i) {
            const Formula& g = hyp[i];
            if (g.kind() != Formula::Kind::Compare || g.cmp_op() != CmpOp::Eq) continue;
            auto def = solve_for(g.cmp_lhs(), g.cmp_rhs(), s);
            if (!def) continue;
            std::vector<Formula> rest;
            for (size_t j = 0; j < hyp.size(); ++j)
                if (j != i) rest.push_back(hyp[j]);
            Formula reduced = Formula::implies(Formula::conj(std::move(rest)), body.rhs());
            return normalize_rec(subst_symbol(reduced, s, *def));
        }
    }

    return normalize_inner(k, s, std::move(body));
}

// Fallback when no elimination applied: keep the binder as-is.
inline Formula normalize_inner(Formula::Kind k, const Symbol& s, Formula body) {
    return rebuild_quant(k, s, std::move(body));
}

}  // namespace detail

// Normalizes a formula for bounded evaluation: equivalent over the integers,
// with as few quantifiers as logic alone lets us remove.
inline Formula normalize_for_eval(const Formula& f) {
    // Folding first creates more elimination opportunities (e.g. constant
    // guards collapse disjuncts); normalize, then fold once more since
    // substitution may expose new constants.
    return simplify(detail::normalize_rec(simplify(f)));
}

}  // namespace forex
