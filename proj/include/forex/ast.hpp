// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Core program syntax: integer expressions, boolean guards, statements, and
// the quantified program copies a relational verification problem is made of.
// All AST values are immutable handles over shared nodes; copies are cheap
// and thread-safe once constructed.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace forex {

using Int = boost::multiprecision::cpp_int;

// A program variable: a base identifier plus an optional copy index.
// Index 0 means "unindexed" (program text before renaming); indices >= 1
// identify the program copy the variable belongs to.
struct VarName {
    std::string base;
    int copy = 0;

    auto operator<=>(const VarName&) const = default;

    std::string str() const {
        return copy == 0 ? base : base + "_" + std::to_string(copy);
    }
};

// A state maps variables to integers. Ordered so enumeration and printing
// are deterministic.
using State = std::map<VarName, Int>;

enum class ArithOp { Add, Sub, Mul };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

inline const char* cmp_op_text(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    }
    return "?";
}

inline bool cmp_op_eval(CmpOp op, const Int& a, const Int& b) {
    switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    }
    throw std::logic_error("bad CmpOp");
}

// Integer expression over program variables.
class ArithExpr {
public:
    enum class Kind { Literal, Variable, Binary };

    ArithExpr() = default;

    static ArithExpr literal(Int v) {
        return make(Node{Kind::Literal, std::move(v), {}, ArithOp::Add, {}, {}});
    }
    static ArithExpr variable(VarName v) {
        return make(Node{Kind::Variable, 0, std::move(v), ArithOp::Add, {}, {}});
    }
    static ArithExpr binary(ArithOp op, ArithExpr lhs, ArithExpr rhs) {
        return make(Node{Kind::Binary, 0, {}, op, std::move(lhs.node_), std::move(rhs.node_)});
    }

    Kind kind() const { return node_->kind; }
    const Int& value() const { return node_->value; }
    const VarName& var() const { return node_->var; }
    ArithOp op() const { return node_->op; }
    ArithExpr lhs() const { return ArithExpr(node_->lhs); }
    ArithExpr rhs() const { return ArithExpr(node_->rhs); }

    bool valid() const { return node_ != nullptr; }

private:
    // Children are stored as node pointers because the handle type is still
    // incomplete inside its own node definition.
    struct Node {
        Kind kind;
        Int value;
        VarName var;
        ArithOp op;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };
    explicit ArithExpr(std::shared_ptr<const Node> p) : node_(std::move(p)) {}
    static ArithExpr make(Node n) { return ArithExpr(std::make_shared<const Node>(std::move(n))); }
    std::shared_ptr<const Node> node_;
};

// Boolean guard over integer comparisons.
class BoolExpr {
public:
    enum class Kind { True, False, Compare, Not, And, Or };

    BoolExpr() = default;

    static BoolExpr literal(bool v) {
        return make(Node{v ? Kind::True : Kind::False, CmpOp::Eq, {}, {}, {}, {}});
    }
    static BoolExpr compare(CmpOp op, ArithExpr lhs, ArithExpr rhs) {
        return make(Node{Kind::Compare, op, std::move(lhs), std::move(rhs), {}, {}});
    }
    static BoolExpr negate(BoolExpr b) {
        return make(Node{Kind::Not, CmpOp::Eq, {}, {}, std::move(b.node_), {}});
    }
    static BoolExpr conj(BoolExpr a, BoolExpr b) {
        return make(Node{Kind::And, CmpOp::Eq, {}, {}, std::move(a.node_), std::move(b.node_)});
    }
    static BoolExpr disj(BoolExpr a, BoolExpr b) {
        return make(Node{Kind::Or, CmpOp::Eq, {}, {}, std::move(a.node_), std::move(b.node_)});
    }

    Kind kind() const { return node_->kind; }
    CmpOp cmp_op() const { return node_->cmp; }
    const ArithExpr& cmp_lhs() const { return node_->alhs; }
    const ArithExpr& cmp_rhs() const { return node_->arhs; }
    BoolExpr arg() const { return BoolExpr(node_->blhs); }
    BoolExpr lhs() const { return BoolExpr(node_->blhs); }
    BoolExpr rhs() const { return BoolExpr(node_->brhs); }

    bool valid() const { return node_ != nullptr; }

private:
    struct Node {
        Kind kind;
        CmpOp cmp;
        ArithExpr alhs;
        ArithExpr arhs;
        std::shared_ptr<const Node> blhs;
        std::shared_ptr<const Node> brhs;
    };
    explicit BoolExpr(std::shared_ptr<const Node> p) : node_(std::move(p)) {}
    static BoolExpr make(Node n) { return BoolExpr(std::make_shared<const Node>(std::move(n))); }
    std::shared_ptr<const Node> node_;
};

// Statements of the small imperative language.
class Stmt {
public:
    enum class Kind { Skip, Assign, Havoc, Assume, If, While, Seq };

    Stmt() = default;

    static Stmt skip() { return make(Node{Kind::Skip, {}, {}, {}, {}, {}}); }
    static Stmt assign(VarName x, ArithExpr e) {
        return make(Node{Kind::Assign, std::move(x), std::move(e), {}, {}, {}});
    }
    static Stmt havoc(VarName x) {
        return make(Node{Kind::Havoc, std::move(x), {}, {}, {}, {}});
    }
    static Stmt assume(BoolExpr b) {
        return make(Node{Kind::Assume, {}, {}, std::move(b), {}, {}});
    }
    static Stmt if_else(BoolExpr b, Stmt then_branch, Stmt else_branch) {
        return make(Node{Kind::If, {}, {}, std::move(b), std::move(then_branch.node_),
                         std::move(else_branch.node_)});
    }
    static Stmt while_loop(BoolExpr b, Stmt body) {
        return make(Node{Kind::While, {}, {}, std::move(b), std::move(body.node_), {}});
    }
    static Stmt seq(Stmt first, Stmt second) {
        return make(Node{Kind::Seq, {}, {}, {}, std::move(first.node_), std::move(second.node_)});
    }
    // Folds a statement list into right-nested sequences; empty list is skip.
    static Stmt seq_all(const std::vector<Stmt>& stmts) {
        if (stmts.empty()) return skip();
        Stmt acc = stmts.back();
        for (auto it = std::next(stmts.rbegin()); it != stmts.rend(); ++it)
            acc = seq(*it, acc);
        return acc;
    }

    Kind kind() const { return node_->kind; }
    const VarName& var() const { return node_->var; }
    const ArithExpr& expr() const { return node_->expr; }
    const BoolExpr& cond() const { return node_->cond; }
    Stmt first() const { return Stmt(node_->a); }    // Seq
    Stmt second() const { return Stmt(node_->b); }   // Seq
    Stmt then_branch() const { return Stmt(node_->a); }
    Stmt else_branch() const { return Stmt(node_->b); }
    Stmt body() const { return Stmt(node_->a); }     // While

    bool valid() const { return node_ != nullptr; }

    // Pointer identity; used as a cheap memoization key.
    const void* id() const { return node_.get(); }

private:
    struct Node {
        Kind kind;
        VarName var;
        ArithExpr expr;
        BoolExpr cond;
        std::shared_ptr<const Node> a;
        std::shared_ptr<const Node> b;
    };
    explicit Stmt(std::shared_ptr<const Node> p) : node_(std::move(p)) {}
    static Stmt make(Node n) { return Stmt(std::make_shared<const Node>(std::move(n))); }
    std::shared_ptr<const Node> node_;
};

enum class Quant { Forall, Exists };

// One program copy of a relational verification problem. During analysis
// `remaining` shrinks toward skip; `finished` marks fully consumed copies,
// which keep their copy index so the final query can still quantify their
// variables.
struct QuantifiedProgram {
    int copy = 0;
    Quant quant = Quant::Forall;
    Stmt remaining;
    bool finished = false;
};

// ---------------------------------------------------------------------------
// Evaluation of expressions in a state. Missing variables are an error: the
// oracle always builds complete states, so a miss indicates a bug.

inline Int eval_arith(const ArithExpr& e, const State& sigma) {
    switch (e.kind()) {
    case ArithExpr::Kind::Literal: return e.value();
    case ArithExpr::Kind::Variable: {
        auto it = sigma.find(e.var());
        if (it == sigma.end())
            throw std::out_of_range("unbound variable " + e.var().str());
        return it->second;
    }
    case ArithExpr::Kind::Binary: {
        Int a = eval_arith(e.lhs(), sigma);
        Int b = eval_arith(e.rhs(), sigma);
        switch (e.op()) {
        case ArithOp::Add: return a + b;
        case ArithOp::Sub: return a - b;
        case ArithOp::Mul: return a * b;
        }
    }
    }
    throw std::logic_error("bad ArithExpr");
}

inline bool eval_bool(const BoolExpr& b, const State& sigma) {
    switch (b.kind()) {
    case BoolExpr::Kind::True: return true;
    case BoolExpr::Kind::False: return false;
    case BoolExpr::Kind::Compare:
        return cmp_op_eval(b.cmp_op(), eval_arith(b.cmp_lhs(), sigma),
                           eval_arith(b.cmp_rhs(), sigma));
    case BoolExpr::Kind::Not: return !eval_bool(b.arg(), sigma);
    case BoolExpr::Kind::And: return eval_bool(b.lhs(), sigma) && eval_bool(b.rhs(), sigma);
    case BoolExpr::Kind::Or: return eval_bool(b.lhs(), sigma) || eval_bool(b.rhs(), sigma);
    }
    throw std::logic_error("bad BoolExpr");
}

// ---------------------------------------------------------------------------
// Copy renaming: stamps every variable with copy index i. Variables must be
// unindexed or already carry index i; renaming is idempotent.

inline VarName alpha_rename(const VarName& v, int i) {
    if (v.copy != 0 && v.copy != i)
        throw std::invalid_argument("variable " + v.str() + " already bound to another copy");
    return VarName{v.base, i};
}

inline ArithExpr alpha_rename(const ArithExpr& e, int i) {
    switch (e.kind()) {
    case ArithExpr::Kind::Literal: return e;
    case ArithExpr::Kind::Variable: return ArithExpr::variable(alpha_rename(e.var(), i));
    case ArithExpr::Kind::Binary:
        return ArithExpr::binary(e.op(), alpha_rename(e.lhs(), i), alpha_rename(e.rhs(), i));
    }
    throw std::logic_error("bad ArithExpr");
}

inline BoolExpr alpha_rename(const BoolExpr& b, int i) {
    switch (b.kind()) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return b;
    case BoolExpr::Kind::Compare:
        return BoolExpr::compare(b.cmp_op(), alpha_rename(b.cmp_lhs(), i),
                                 alpha_rename(b.cmp_rhs(), i));
    case BoolExpr::Kind::Not: return BoolExpr::negate(alpha_rename(b.arg(), i));
    case BoolExpr::Kind::And:
        return BoolExpr::conj(alpha_rename(b.lhs(), i), alpha_rename(b.rhs(), i));
    case BoolExpr::Kind::Or:
        return BoolExpr::disj(alpha_rename(b.lhs(), i), alpha_rename(b.rhs(), i));
    }
    throw std::logic_error("bad BoolExpr");
}

inline Stmt alpha_rename(const Stmt& s, int i) {
    switch (s.kind()) {
    case Stmt::Kind::Skip: return s;
    case Stmt::Kind::Assign:
        return Stmt::assign(alpha_rename(s.var(), i), alpha_rename(s.expr(), i));
    case Stmt::Kind::Havoc: return Stmt::havoc(alpha_rename(s.var(), i));
    case Stmt::Kind::Assume: return Stmt::assume(alpha_rename(s.cond(), i));
    case Stmt::Kind::If:
        return Stmt::if_else(alpha_rename(s.cond(), i), alpha_rename(s.then_branch(), i),
                             alpha_rename(s.else_branch(), i));
    case Stmt::Kind::While:
        return Stmt::while_loop(alpha_rename(s.cond(), i), alpha_rename(s.body(), i));
    case Stmt::Kind::Seq:
        return Stmt::seq(alpha_rename(s.first(), i), alpha_rename(s.second(), i));
    }
    throw std::logic_error("bad Stmt");
}

// ---------------------------------------------------------------------------
// Variable collection.

inline void collect_vars(const ArithExpr& e, std::set<VarName>& out) {
    switch (e.kind()) {
    case ArithExpr::Kind::Literal: return;
    case ArithExpr::Kind::Variable: out.insert(e.var()); return;
    case ArithExpr::Kind::Binary:
        collect_vars(e.lhs(), out);
        collect_vars(e.rhs(), out);
        return;
    }
}

inline void collect_vars(const BoolExpr& b, std::set<VarName>& out) {
    switch (b.kind()) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return;
    case BoolExpr::Kind::Compare:
        collect_vars(b.cmp_lhs(), out);
        collect_vars(b.cmp_rhs(), out);
        return;
    case BoolExpr::Kind::Not: collect_vars(b.arg(), out); return;
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or:
        collect_vars(b.lhs(), out);
        collect_vars(b.rhs(), out);
        return;
    }
}

inline void collect_vars(const Stmt& s, std::set<VarName>& out) {
    switch (s.kind()) {
    case Stmt::Kind::Skip: return;
    case Stmt::Kind::Assign:
        out.insert(s.var());
        collect_vars(s.expr(), out);
        return;
    case Stmt::Kind::Havoc: out.insert(s.var()); return;
    case Stmt::Kind::Assume: collect_vars(s.cond(), out); return;
    case Stmt::Kind::If:
        collect_vars(s.cond(), out);
        collect_vars(s.then_branch(), out);
        collect_vars(s.else_branch(), out);
        return;
    case Stmt::Kind::While:
        collect_vars(s.cond(), out);
        collect_vars(s.body(), out);
        return;
    case Stmt::Kind::Seq:
        collect_vars(s.first(), out);
        collect_vars(s.second(), out);
        return;
    }
}

inline std::set<VarName> vars_of(const Stmt& s) {
    std::set<VarName> out;
    collect_vars(s, out);
    return out;
}

// Variables written by the program (assigned or havocked).
inline void collect_mod_vars(const Stmt& s, std::set<VarName>& out) {
    switch (s.kind()) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Assume: return;
    case Stmt::Kind::Assign:
    case Stmt::Kind::Havoc: out.insert(s.var()); return;
    case Stmt::Kind::If:
        collect_mod_vars(s.then_branch(), out);
        collect_mod_vars(s.else_branch(), out);
        return;
    case Stmt::Kind::While: collect_mod_vars(s.body(), out); return;
    case Stmt::Kind::Seq:
        collect_mod_vars(s.first(), out);
        collect_mod_vars(s.second(), out);
        return;
    }
}

inline std::set<VarName> mod_vars(const Stmt& s) {
    std::set<VarName> out;
    collect_mod_vars(s, out);
    return out;
}

// ---------------------------------------------------------------------------
// Head normalization. Rewrites a statement into either skip or seq(h, rest)
// with h neither skip nor seq, by repeatedly dropping leading skips,
// reassociating nested sequences to the right, and wrapping bare statements
// in a trailing skip. The left spine shrinks strictly, so this terminates;
// the result is semantically the same program and the rewrite is idempotent.

inline Stmt normalize_head(Stmt p) {
    for (;;) {
        if (p.kind() == Stmt::Kind::Skip) return p;
        if (p.kind() != Stmt::Kind::Seq) return Stmt::seq(p, Stmt::skip());
        const Stmt& head = p.first();
        if (head.kind() == Stmt::Kind::Skip) {
            p = p.second();
            continue;
        }
        if (head.kind() == Stmt::Kind::Seq) {
            p = Stmt::seq(head.first(), Stmt::seq(head.second(), p.second()));
            continue;
        }
        return p;
    }
}

// ---------------------------------------------------------------------------
// Structural equality and a compact one-line rendering (used for cache keys
// and diagnostics; pretty multi-line printing lives with the parser).

inline bool equal(const ArithExpr& a, const ArithExpr& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case ArithExpr::Kind::Literal: return a.value() == b.value();
    case ArithExpr::Kind::Variable: return a.var() == b.var();
    case ArithExpr::Kind::Binary:
        return a.op() == b.op() && equal(a.lhs(), b.lhs()) && equal(a.rhs(), b.rhs());
    }
    return false;
}

inline bool equal(const BoolExpr& a, const BoolExpr& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return true;
    case BoolExpr::Kind::Compare:
        return a.cmp_op() == b.cmp_op() && equal(a.cmp_lhs(), b.cmp_lhs()) &&
               equal(a.cmp_rhs(), b.cmp_rhs());
    case BoolExpr::Kind::Not: return equal(a.arg(), b.arg());
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or:
        return equal(a.lhs(), b.lhs()) && equal(a.rhs(), b.rhs());
    }
    return false;
}

inline bool equal(const Stmt& a, const Stmt& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Stmt::Kind::Skip: return true;
    case Stmt::Kind::Assign: return a.var() == b.var() && equal(a.expr(), b.expr());
    case Stmt::Kind::Havoc: return a.var() == b.var();
    case Stmt::Kind::Assume: return equal(a.cond(), b.cond());
    case Stmt::Kind::If:
        return equal(a.cond(), b.cond()) && equal(a.then_branch(), b.then_branch()) &&
               equal(a.else_branch(), b.else_branch());
    case Stmt::Kind::While:
        return equal(a.cond(), b.cond()) && equal(a.body(), b.body());
    case Stmt::Kind::Seq:
        return equal(a.first(), b.first()) && equal(a.second(), b.second());
    }
    return false;
}

inline std::string to_string(const ArithExpr& e) {
    switch (e.kind()) {
    case ArithExpr::Kind::Literal: return e.value().str();
    case ArithExpr::Kind::Variable: return e.var().str();
    case ArithExpr::Kind::Binary: {
        const char* op = e.op() == ArithOp::Add ? "+" : e.op() == ArithOp::Sub ? "-" : "*";
        return std::string("(") + to_string(e.lhs()) + " " + op + " " + to_string(e.rhs()) + ")";
    }
    }
    return "?";
}

inline std::string to_string(const BoolExpr& b) {
    switch (b.kind()) {
    case BoolExpr::Kind::True: return "true";
    case BoolExpr::Kind::False: return "false";
    case BoolExpr::Kind::Compare:
        return "(" + to_string(b.cmp_lhs()) + " " + cmp_op_text(b.cmp_op()) + " " +
               to_string(b.cmp_rhs()) + ")";
    case BoolExpr::Kind::Not: return "!" + to_string(b.arg());
    case BoolExpr::Kind::And: return "(" + to_string(b.lhs()) + " && " + to_string(b.rhs()) + ")";
    case BoolExpr::Kind::Or: return "(" + to_string(b.lhs()) + " || " + to_string(b.rhs()) + ")";
    }
    return "?";
}

inline std::string to_string(const Stmt& s) {
    switch (s.kind()) {
    case Stmt::Kind::Skip: return "skip";
    case Stmt::Kind::Assign: return s.var().str() + " = " + to_string(s.expr());
    case Stmt::Kind::Havoc: return s.var().str() + " = nondet()";
    case Stmt::Kind::Assume: return "assume" + to_string(s.cond());
    case Stmt::Kind::If:
        return "if" + to_string(s.cond()) + "{" + to_string(s.then_branch()) + "}else{" +
               to_string(s.else_branch()) + "}";
    case Stmt::Kind::While:
        return "while" + to_string(s.cond()) + "{" + to_string(s.body()) + "}";
    case Stmt::Kind::Seq: return to_string(s.first()) + "; " + to_string(s.second());
    }
    return "?";
}

inline int size_of(const Stmt& s) {
    switch (s.kind()) {
    case Stmt::Kind::Skip: return 1;
    case Stmt::Kind::Assign:
    case Stmt::Kind::Havoc:
    case Stmt::Kind::Assume: return 1;
    case Stmt::Kind::If: return 1 + size_of(s.then_branch()) + size_of(s.else_branch());
    case Stmt::Kind::While: return 1 + size_of(s.body());
    case Stmt::Kind::Seq: return size_of(s.first()) + size_of(s.second());
    }
    return 0;
}

}  // namespace forex
