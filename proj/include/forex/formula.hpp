// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// First-order assertions over program variables and choice parameters.
// Guards and expressions from the program syntax embed into this language;
// the analysis engines only ever manipulate Formula values.
//
// Evaluation is exact on quantifier-free formulas. Quantifiers are evaluated
// over a caller-supplied bounded integer domain. That makes eval a bounded
// semantics: sound and complete only when all relevant witnesses fall inside
// the domain. The interpreter oracle is explicit about this caveat.

#include "ast.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <variant>

namespace forex {

// A choice parameter minted for one nondeterministic assignment of an
// existentially quantified copy. `minted_for` records which havoc produced
// it; ids increase strictly in creation order within one verification run.
struct Param {
    int id = 0;
    VarName minted_for;

    bool engine_minted() const { return !minted_for.base.empty(); }

    auto operator<=>(const Param& o) const { return id <=> o.id; }
    bool operator==(const Param& o) const { return id == o.id; }

    std::string str() const { return "mu_" + std::to_string(id); }
};

// Mint source for parameters; one instance per verification run, so ids are
// unique within the run. Thread-safe.
class ParamPool {
public:
    Param fresh(const VarName& minted_for) {
        return Param{next_.fetch_add(1, std::memory_order_relaxed), minted_for};
    }
    int minted() const { return next_.load(std::memory_order_relaxed) - 1; }

private:
    std::atomic<int> next_{1};
};

// An assignment of integers to parameters, keyed by parameter id.
struct ParamEval {
    std::map<int, Int> values;
};

// Quantifiers range over either a program variable or a parameter.
using Symbol = std::variant<VarName, Param>;

inline std::string symbol_str(const Symbol& s) {
    return std::holds_alternative<VarName>(s) ? std::get<VarName>(s).str()
                                              : std::get<Param>(s).str();
}

// Integer term over variables and parameters.
class Term {
public:
    enum class Kind { Literal, Variable, Parameter, Binary };

    Term() = default;

    static Term literal(Int v) {
        return make(Node{Kind::Literal, std::move(v), {}, {}, ArithOp::Add, {}, {}});
    }
    static Term variable(VarName v) {
        return make(Node{Kind::Variable, 0, std::move(v), {}, ArithOp::Add, {}, {}});
    }
    static Term parameter(Param p) {
        return make(Node{Kind::Parameter, 0, {}, std::move(p), ArithOp::Add, {}, {}});
    }
    static Term binary(ArithOp op, Term lhs, Term rhs) {
        return make(Node{Kind::Binary, 0, {}, {}, op, std::move(lhs.node_), std::move(rhs.node_)});
    }
    static Term add(Term a, Term b) { return binary(ArithOp::Add, std::move(a), std::move(b)); }
    static Term sub(Term a, Term b) { return binary(ArithOp::Sub, std::move(a), std::move(b)); }
    static Term mul(Term a, Term b) { return binary(ArithOp::Mul, std::move(a), std::move(b)); }

    Kind kind() const { return node_->kind; }
    const Int& value() const { return node_->value; }
    const VarName& var() const { return node_->var; }
    const Param& param() const { return node_->param; }
    ArithOp op() const { return node_->op; }
    Term lhs() const { return Term(node_->lhs); }
    Term rhs() const { return Term(node_->rhs); }

    bool valid() const { return node_ != nullptr; }

private:
    struct Node {
        Kind kind;
        Int value;
        VarName var;
        Param param;
        ArithOp op;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };
    explicit Term(std::shared_ptr<const Node> p) : node_(std::move(p)) {}
    static Term make(Node n) { return Term(std::make_shared<const Node>(std::move(n))); }
    std::shared_ptr<const Node> node_;
};

// First-order formula. And/Or are n-ary; an empty conjunction is true and an
// empty disjunction is false.
class Formula {
public:
    enum class Kind { True, False, Compare, Not, And, Or, Implies, Iff, Exists, Forall };

    static Formula tt() { return make(Node{Kind::True, CmpOp::Eq, {}, {}, {}, {}}); }
    static Formula ff() { return make(Node{Kind::False, CmpOp::Eq, {}, {}, {}, {}}); }
    static Formula compare(CmpOp op, Term l, Term r) {
        return make(Node{Kind::Compare, op, std::move(l), std::move(r), {}, {}});
    }
    static Formula eq(Term l, Term r) { return compare(CmpOp::Eq, std::move(l), std::move(r)); }
    static Formula negate(Formula f) {
        return make(Node{Kind::Not, CmpOp::Eq, {}, {}, {std::move(f)}, {}});
    }
    static Formula conj(std::vector<Formula> fs) {
        if (fs.size() == 1) return fs[0];
        return make(Node{Kind::And, CmpOp::Eq, {}, {}, std::move(fs), {}});
    }
    static Formula conj2(Formula a, Formula b) { return conj({std::move(a), std::move(b)}); }
    static Formula disj(std::vector<Formula> fs) {
        if (fs.size() == 1) return fs[0];
        return make(Node{Kind::Or, CmpOp::Eq, {}, {}, std::move(fs), {}});
    }
    static Formula disj2(Formula a, Formula b) { return disj({std::move(a), std::move(b)}); }
    static Formula implies(Formula a, Formula b) {
        return make(Node{Kind::Implies, CmpOp::Eq, {}, {}, {std::move(a), std::move(b)}, {}});
    }
    static Formula iff(Formula a, Formula b) {
        return make(Node{Kind::Iff, CmpOp::Eq, {}, {}, {std::move(a), std::move(b)}, {}});
    }
    static Formula exists(Symbol s, Formula body) {
        return make(Node{Kind::Exists, CmpOp::Eq, {}, {}, {std::move(body)}, std::move(s)});
    }
    static Formula forall(Symbol s, Formula body) {
        return make(Node{Kind::Forall, CmpOp::Eq, {}, {}, {std::move(body)}, std::move(s)});
    }

    Kind kind() const { return node_->kind; }
    CmpOp cmp_op() const { return node_->cmp; }
    const Term& cmp_lhs() const { return node_->lhs; }
    const Term& cmp_rhs() const { return node_->rhs; }
    const std::vector<Formula>& args() const { return node_->args; }
    const Formula& arg() const { return node_->args[0]; }       // Not
    const Formula& lhs() const { return node_->args[0]; }       // Implies/Iff
    const Formula& rhs() const { return node_->args[1]; }
    const Symbol& bound() const { return node_->sym; }          // Exists/Forall
    const Formula& body() const { return node_->args[0]; }

    bool valid() const { return node_ != nullptr; }
    bool is_true() const { return kind() == Kind::True; }
    bool is_false() const { return kind() == Kind::False; }

private:
    struct Node {
        Kind kind;
        CmpOp cmp;
        Term lhs;
        Term rhs;
        std::vector<Formula> args;
        Symbol sym;
    };
    static Formula make(Node n) {
        Formula f;
        f.node_ = std::make_shared<Node>(std::move(n));
        return f;
    }
    std::shared_ptr<const Node> node_;
};

// A parametric assertion: a function formula over variables and parameters
// plus a restriction formula constraining only the parameters.
struct ParametricAssertion {
    Formula xi;
    Formula restriction;
};

// ---------------------------------------------------------------------------
// Embedding of program syntax.

inline Term embed(const ArithExpr& e) {
    switch (e.kind()) {
    case ArithExpr::Kind::Literal: return Term::literal(e.value());
    case ArithExpr::Kind::Variable: return Term::variable(e.var());
    case ArithExpr::Kind::Binary:
        return Term::binary(e.op(), embed(e.lhs()), embed(e.rhs()));
    }
    throw std::logic_error("bad ArithExpr");
}

inline Formula embed(const BoolExpr& b) {
    switch (b.kind()) {
    case BoolExpr::Kind::True: return Formula::tt();
    case BoolExpr::Kind::False: return Formula::ff();
    case BoolExpr::Kind::Compare:
        return Formula::compare(b.cmp_op(), embed(b.cmp_lhs()), embed(b.cmp_rhs()));
    case BoolExpr::Kind::Not: return Formula::negate(embed(b.arg()));
    case BoolExpr::Kind::And: return Formula::conj2(embed(b.lhs()), embed(b.rhs()));
    case BoolExpr::Kind::Or: return Formula::disj2(embed(b.lhs()), embed(b.rhs()));
    }
    throw std::logic_error("bad BoolExpr");
}

// ---------------------------------------------------------------------------
// Free symbol collection.

inline void collect_term_symbols(const Term& t, std::set<VarName>& vars, std::set<Param>& params) {
    switch (t.kind()) {
    case Term::Kind::Literal: return;
    case Term::Kind::Variable: vars.insert(t.var()); return;
    case Term::Kind::Parameter: params.insert(t.param()); return;
    case Term::Kind::Binary:
        collect_term_symbols(t.lhs(), vars, params);
        collect_term_symbols(t.rhs(), vars, params);
        return;
    }
}

namespace detail {

inline void collect_free(const Formula& f, std::set<VarName>& vars, std::set<Param>& params,
                         std::set<VarName>& bound_vars, std::set<Param>& bound_params) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return;
    case Formula::Kind::Compare: {
        std::set<VarName> v;
        std::set<Param> p;
        collect_term_symbols(f.cmp_lhs(), v, p);
        collect_term_symbols(f.cmp_rhs(), v, p);
        for (const auto& x : v)
            if (!bound_vars.count(x)) vars.insert(x);
        for (const auto& x : p)
            if (!bound_params.count(x)) params.insert(x);
        return;
    }
    case Formula::Kind::Not:
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
    case Formula::Kind::Iff:
        for (const auto& g : f.args()) collect_free(g, vars, params, bound_vars, bound_params);
        return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        const Symbol& s = f.bound();
        if (std::holds_alternative<VarName>(s)) {
            const VarName& v = std::get<VarName>(s);
            bool fresh = bound_vars.insert(v).second;
            collect_free(f.body(), vars, params, bound_vars, bound_params);
            if (fresh) bound_vars.erase(v);
        } else {
            const Param& p = std::get<Param>(s);
            bool fresh = bound_params.insert(p).second;
            collect_free(f.body(), vars, params, bound_vars, bound_params);
            if (fresh) bound_params.erase(p);
        }
        return;
    }
    }
}

}  // namespace detail

inline std::set<VarName> free_vars(const Formula& f) {
    std::set<VarName> vars, bv;
    std::set<Param> params, bp;
    detail::collect_free(f, vars, params, bv, bp);
    return vars;
}

inline std::set<Param> free_params(const Formula& f) {
    std::set<VarName> vars, bv;
    std::set<Param> params, bp;
    detail::collect_free(f, vars, params, bv, bp);
    return params;
}

inline bool occurs_free(const Formula& f, const Symbol& s) {
    if (std::holds_alternative<VarName>(s)) return free_vars(f).count(std::get<VarName>(s)) > 0;
    return free_params(f).count(std::get<Param>(s)) > 0;
}

// ---------------------------------------------------------------------------
// Substitution (capture avoiding). Bound variables that would capture the
// substituted term are renamed to fresh primed names first.

inline VarName fresh_var_like(const VarName& base, const std::set<VarName>& avoid) {
    for (int n = 1;; ++n) {
        VarName cand{base.base + "__" + std::to_string(n), base.copy};
        if (!avoid.count(cand)) return cand;
    }
}

inline Term subst_var_term(const Term& t, const VarName& x, const Term& r) {
    switch (t.kind()) {
    case Term::Kind::Literal:
    case Term::Kind::Parameter: return t;
    case Term::Kind::Variable: return t.var() == x ? r : t;
    case Term::Kind::Binary:
        return Term::binary(t.op(), subst_var_term(t.lhs(), x, r), subst_var_term(t.rhs(), x, r));
    }
    throw std::logic_error("bad Term");
}

inline Term subst_param_term(const Term& t, const Param& p, const Term& r) {
    switch (t.kind()) {
    case Term::Kind::Literal:
    case Term::Kind::Variable: return t;
    case Term::Kind::Parameter: return t.param() == p ? r : t;
    case Term::Kind::Binary:
        return Term::binary(t.op(), subst_param_term(t.lhs(), p, r),
                            subst_param_term(t.rhs(), p, r));
    }
    throw std::logic_error("bad Term");
}

inline Formula subst_var(const Formula& f, const VarName& x, const Term& r);

namespace detail {

inline Formula subst_var_quant(const Formula& f, const VarName& x, const Term& r) {
    const Symbol& s = f.bound();
    auto rebuild = [&](const Symbol& sym, Formula body) {
        return f.kind() == Formula::Kind::Exists ? Formula::exists(sym, std::move(body))
                                                 : Formula::forall(sym, std::move(body));
    };
    if (std::holds_alternative<VarName>(s)) {
        const VarName& b = std::get<VarName>(s);
        if (b == x) return f;  // x is shadowed inside
        std::set<VarName> rv, av;
        std::set<Param> rp;
        collect_term_symbols(r, rv, rp);
        if (rv.count(b)) {
            // Binder would capture a variable of the replacement: rename it.
            av = free_vars(f.body());
            av.insert(rv.begin(), rv.end());
            av.insert(x);
            VarName b2 = fresh_var_like(b, av);
            Formula body = subst_var(f.body(), b, Term::variable(b2));
            return rebuild(Symbol{b2}, subst_var(body, x, r));
        }
    }
    return rebuild(s, subst_var(f.body(), x, r));
}

}  // namespace detail

inline Formula subst_var(const Formula& f, const VarName& x, const Term& r) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Compare:
        return Formula::compare(f.cmp_op(), subst_var_term(f.cmp_lhs(), x, r),
                                subst_var_term(f.cmp_rhs(), x, r));
    case Formula::Kind::Not: return Formula::negate(subst_var(f.arg(), x, r));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::vector<Formula> out;
        out.reserve(f.args().size());
        for (const auto& g : f.args()) out.push_back(subst_var(g, x, r));
        return f.kind() == Formula::Kind::And ? Formula::conj(std::move(out))
                                              : Formula::disj(std::move(out));
    }
    case Formula::Kind::Implies:
        return Formula::implies(subst_var(f.lhs(), x, r), subst_var(f.rhs(), x, r));
    case Formula::Kind::Iff:
        return Formula::iff(subst_var(f.lhs(), x, r), subst_var(f.rhs(), x, r));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return detail::subst_var_quant(f, x, r);
    }
    throw std::logic_error("bad Formula");
}

inline Formula subst_param(const Formula& f, const Param& p, const Term& r) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Compare:
        return Formula::compare(f.cmp_op(), subst_param_term(f.cmp_lhs(), p, r),
                                subst_param_term(f.cmp_rhs(), p, r));
    case Formula::Kind::Not: return Formula::negate(subst_param(f.arg(), p, r));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::vector<Formula> out;
        out.reserve(f.args().size());
        for (const auto& g : f.args()) out.push_back(subst_param(g, p, r));
        return f.kind() == Formula::Kind::And ? Formula::conj(std::move(out))
                                              : Formula::disj(std::move(out));
    }
    case Formula::Kind::Implies:
        return Formula::implies(subst_param(f.lhs(), p, r), subst_param(f.rhs(), p, r));
    case Formula::Kind::Iff:
        return Formula::iff(subst_param(f.lhs(), p, r), subst_param(f.rhs(), p, r));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        const Symbol& s = f.bound();
        if (std::holds_alternative<Param>(s) && std::get<Param>(s) == p) return f;
        // Replacement terms for parameters are literals or fresh parameters,
        // never program variables, so no capture is possible here.
        Formula body = subst_param(f.body(), p, r);
        return f.kind() == Formula::Kind::Exists ? Formula::exists(s, std::move(body))
                                                 : Formula::forall(s, std::move(body));
    }
    }
    throw std::logic_error("bad Formula");
}

// Replaces every free parameter that kappa assigns by its integer value.
inline Formula instantiate_params(const Formula& f, const ParamEval& kappa) {
    Formula out = f;
    for (const Param& p : free_params(f)) {
        auto it = kappa.values.find(p.id);
        if (it != kappa.values.end()) out = subst_param(out, p, Term::literal(it->second));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quantifier closure helpers.

inline Formula close_forall(const std::vector<VarName>& vars, Formula f) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        f = Formula::forall(Symbol{*it}, std::move(f));
    return f;
}

inline Formula close_exists(const std::vector<VarName>& vars, Formula f) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        f = Formula::exists(Symbol{*it}, std::move(f));
    return f;
}

// ---------------------------------------------------------------------------
// Bounded evaluation. Quantified symbols range over [-radius, radius].

struct EvalEnv {
    State vars;
    ParamEval params;
    long long quant_radius = 12;
};

inline Int eval_term(const Term& t, const EvalEnv& env) {
    switch (t.kind()) {
    case Term::Kind::Literal: return t.value();
    case Term::Kind::Variable: {
        auto it = env.vars.find(t.var());
        if (it == env.vars.end())
            throw std::out_of_range("unbound variable " + t.var().str());
        return it->second;
    }
    case Term::Kind::Parameter: {
        auto it = env.params.values.find(t.param().id);
        if (it == env.params.values.end())
            throw std::out_of_range("unbound parameter " + t.param().str());
        return it->second;
    }
    case Term::Kind::Binary: {
        Int a = eval_term(t.lhs(), env);
        Int b = eval_term(t.rhs(), env);
        switch (t.op()) {
        case ArithOp::Add: return a + b;
        case ArithOp::Sub: return a - b;
        case ArithOp::Mul: return a * b;
        }
    }
    }
    throw std::logic_error("bad Term");
}

inline bool eval(const Formula& f, EvalEnv& env) {
    switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Compare:
        return cmp_op_eval(f.cmp_op(), eval_term(f.cmp_lhs(), env), eval_term(f.cmp_rhs(), env));
    case Formula::Kind::Not: return !eval(f.arg(), env);
    case Formula::Kind::And: {
        // Evaluate syntactically small conjuncts first; they fail fast and
        // keep bounded quantifier search cheap on substitution chains.
        if (f.args().size() == 2) {
            const bool swap = f.args()[1].kind() == Formula::Kind::Compare &&
                              f.args()[0].kind() != Formula::Kind::Compare;
            const Formula& a = swap ? f.args()[1] : f.args()[0];
            const Formula& b = swap ? f.args()[0] : f.args()[1];
            return eval(a, env) && eval(b, env);
        }
        for (const auto& g : f.args())
            if (g.kind() == Formula::Kind::Compare && !eval(g, env)) return false;
        for (const auto& g : f.args())
            if (g.kind() != Formula::Kind::Compare && !eval(g, env)) return false;
        return true;
    }
    case Formula::Kind::Or: {
        for (const auto& g : f.args())
            if (eval(g, env)) return true;
        return false;
    }
    case Formula::Kind::Implies: return !eval(f.lhs(), env) || eval(f.rhs(), env);
    case Formula::Kind::Iff: return eval(f.lhs(), env) == eval(f.rhs(), env);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        const bool want = f.kind() == Formula::Kind::Exists;
        const Symbol& s = f.bound();
        const long long r = env.quant_radius;
        if (std::holds_alternative<VarName>(s)) {
            const VarName& v = std::get<VarName>(s);
            auto it = env.vars.find(v);
            std::optional<Int> saved;
            if (it != env.vars.end()) saved = it->second;
            bool result = !want;
            for (long long z = -r; z <= r; ++z) {
                env.vars[v] = z;
                if (eval(f.body(), env) == want) {
                    result = want;
                    break;
                }
            }
            if (saved)
                env.vars[v] = *saved;
            else
                env.vars.erase(v);
            return result;
        }
        const Param& p = std::get<Param>(s);
        auto it = env.params.values.find(p.id);
        std::optional<Int> saved;
        if (it != env.params.values.end()) saved = it->second;
        bool result = !want;
        for (long long z = -r; z <= r; ++z) {
            env.params.values[p.id] = z;
            if (eval(f.body(), env) == want) {
                result = want;
                break;
            }
        }
        if (saved)
            env.params.values[p.id] = *saved;
        else
            env.params.values.erase(p.id);
        return result;
    }
    }
    throw std::logic_error("bad Formula");
}

inline bool eval(const Formula& f, const State& sigma, const ParamEval& kappa,
                 long long quant_radius) {
    EvalEnv env{sigma, kappa, quant_radius};
    return eval(f, env);
}

inline bool eval(const Formula& f, const State& sigma, long long quant_radius) {
    return eval(f, sigma, ParamEval{}, quant_radius);
}

// ---------------------------------------------------------------------------
// Structural equality and printing.

inline bool equal(const Term& a, const Term& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Term::Kind::Literal: return a.value() == b.value();
    case Term::Kind::Variable: return a.var() == b.var();
    case Term::Kind::Parameter: return a.param() == b.param();
    case Term::Kind::Binary:
        return a.op() == b.op() && equal(a.lhs(), b.lhs()) && equal(a.rhs(), b.rhs());
    }
    return false;
}

inline bool equal(const Formula& a, const Formula& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Compare:
        return a.cmp_op() == b.cmp_op() && equal(a.cmp_lhs(), b.cmp_lhs()) &&
               equal(a.cmp_rhs(), b.cmp_rhs());
    case Formula::Kind::Not:
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
    case Formula::Kind::Iff: {
        if (a.args().size() != b.args().size()) return false;
        for (size_t i = 0; i < a.args().size(); ++i)
            if (!equal(a.args()[i], b.args()[i])) return false;
        return true;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
        return a.bound() == b.bound() && equal(a.body(), b.body());
    }
    return false;
}

namespace detail {

// Term precedence: additive 1, multiplicative 2, atoms 3.
inline std::string print_term(const Term& t, int parent_prec) {
    switch (t.kind()) {
    case Term::Kind::Literal: {
        std::string s = t.value().str();
        return (t.value() < 0 && parent_prec > 1) ? "(" + s + ")" : s;
    }
    case Term::Kind::Variable: return t.var().str();
    case Term::Kind::Parameter: return t.param().str();
    case Term::Kind::Binary: {
        const bool mul = t.op() == ArithOp::Mul;
        const int prec = mul ? 2 : 1;
        const char* op = mul ? " * " : (t.op() == ArithOp::Add ? " + " : " - ");
        // Left-associative: the right child of - needs parens at equal prec.
        std::string l = print_term(t.lhs(), prec);
        std::string r = print_term(t.rhs(), t.op() == ArithOp::Add ? prec : prec + 1);
        std::string s = l + op + r;
        return parent_prec > prec ? "(" + s + ")" : s;
    }
    }
    return "?";
}

// Formula precedence: iff 1, implies 2, or 3, and 4, not 5, atoms 6.
inline std::string print_formula(const Formula& f, int parent_prec) {
    auto wrap = [&](int prec, const std::string& s) {
        return parent_prec > prec ? "(" + s + ")" : s;
    };
    switch (f.kind()) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Compare:
        return print_term(f.cmp_lhs(), 0) + " " + cmp_op_text(f.cmp_op()) + " " +
               print_term(f.cmp_rhs(), 0);
    case Formula::Kind::Not: return "!" + print_formula(f.arg(), 6);
    case Formula::Kind::And: {
        if (f.args().empty()) return "true";
        std::string s;
        for (size_t i = 0; i < f.args().size(); ++i)
            s += (i ? " && " : "") + print_formula(f.args()[i], 5);
        return wrap(4, s);
    }
    case Formula::Kind::Or: {
        if (f.args().empty()) return "false";
        std::string s;
        for (size_t i = 0; i < f.args().size(); ++i)
            s += (i ? " || " : "") + print_formula(f.args()[i], 4);
        return wrap(3, s);
    }
    case Formula::Kind::Implies:
        return wrap(2, print_formula(f.lhs(), 3) + " -> " + print_formula(f.rhs(), 2));
    case Formula::Kind::Iff:
        return wrap(1, print_formula(f.lhs(), 2) + " <-> " + print_formula(f.rhs(), 2));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
        const char* q = f.kind() == Formula::Kind::Exists ? "exists " : "forall ";
        // Merge runs of like quantifiers into one binder list.
        std::vector<std::string> syms{symbol_str(f.bound())};
        Formula body = f.body();
        while (body.kind() == f.kind()) {
            syms.push_back(symbol_str(body.bound()));
            body = body.body();
        }
        std::string s = q;
        for (size_t i = 0; i < syms.size(); ++i) s += (i ? ", " : "") + syms[i];
        s += ". " + print_formula(body, 1);
        return "(" + s + ")";
    }
    }
    return "?";
}

}  // namespace detail

inline std::string to_string(const Term& t) { return detail::print_term(t, 0); }
inline std::string to_string(const Formula& f) { return detail::print_formula(f, 0); }

}  // namespace forex
