// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Reader and printer for .feht specification files.
//
// A file is a sequence of blocks:
//
//   [forall]          one universally quantified program copy (C-like syntax)
//   [exists]          one existentially quantified program copy
//   [pre]             relational precondition over indexed variables (x_1)
//   [post]            relational postcondition
//   [hint-invariant]  candidate loop invariant (may repeat; tried in order)
//   [hint-counters]   per-copy loop iteration counts, e.g. 1 2
//   [hint-unroll]     upper bound for generated counter tuples
//
// Program variables are written unindexed; copies are numbered 1..k for the
// universal blocks and k+1..k+l for the existential blocks, in file order
// within each class (universal blocks always come first in the canonical
// numbering, regardless of interleaving). In assertions, a trailing
// _<digits> on an identifier is the copy index. // comments run to the end
// of the line. Multiple [pre] (or [post]) blocks are conjoined.

#include "feht.hpp"

#include <cctype>

namespace forex {

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(int line_, int col_, const std::string& msg)
        : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

namespace detail {

struct Token {
    enum class Kind { End, Ident, Number, Punct, BlockTag };
    Kind kind = Kind::End;
    std::string text;
    int line = 0;
    int col = 0;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

inline std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t j = 0; j < n; ++j, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (c == '[') {
            size_t j = text.find(']', i);
            if (j == std::string::npos) throw ParseError(line, col, "unterminated block tag");
            t.kind = Token::Kind::BlockTag;
            t.text = text.substr(i + 1, j - i - 1);
            advance(j - i + 1);
            out.push_back(std::move(t));
            continue;
        }
        if (ident_start(c)) {
            size_t j = i;
            while (j < text.size() && ident_char(text[j])) ++j;
            t.kind = Token::Kind::Ident;
            t.text = text.substr(i, j - i);
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            t.kind = Token::Kind::Number;
            t.text = text.substr(i, j - i);
            advance(j - i);
            out.push_back(std::move(t));
            continue;
        }
        static const char* two[] = {"&&", "||", "==", "!=", "<=", ">="};
        t.kind = Token::Kind::Punct;
        bool matched = false;
        for (const char* p : two) {
            if (text.compare(i, 2, p) == 0) {
                t.text = p;
                advance(2);
                matched = true;
                break;
            }
        }
        if (!matched) {
            static const std::string singles = "(){};=<>+-*!,";
            if (singles.find(c) == std::string::npos)
                throw ParseError(line, col, std::string("unexpected character '") + c + "'");
            t.text = std::string(1, c);
            advance(1);
        }
        out.push_back(std::move(t));
    }
    out.push_back(Token{Token::Kind::End, "", line, col});
    return out;
}

inline bool is_keyword(const std::string& s) {
    return s == "skip" || s == "assume" || s == "if" || s == "else" || s == "while" ||
           s == "nondet" || s == "true" || s == "false";
}

class SpecParser {
public:
    explicit SpecParser(const std::string& text) : toks_(lex(text)) {}

    Feht parse_file() {
        struct Block {
            std::string tag;
            int line, col;
            size_t begin, end;  // token range of the block body
        };
        std::vector<Block> blocks;
        if (cur().kind != Token::Kind::BlockTag)
            throw ParseError(cur().line, cur().col, "expected a block tag like [forall]");
        while (cur().kind == Token::Kind::BlockTag) {
            Block b{cur().text, cur().line, cur().col, 0, 0};
            ++pos_;
            b.begin = pos_;
            while (cur().kind != Token::Kind::BlockTag && cur().kind != Token::Kind::End) ++pos_;
            b.end = pos_;
            blocks.push_back(std::move(b));
        }

        // Canonical copy numbering: universal blocks first, in file order.
        Feht f;
        std::vector<std::pair<Quant, size_t>> program_blocks;
        for (size_t i = 0; i < blocks.size(); ++i) {
            if (blocks[i].tag == "forall") program_blocks.emplace_back(Quant::Forall, i);
        }
        for (size_t i = 0; i < blocks.size(); ++i) {
            if (blocks[i].tag == "exists") program_blocks.emplace_back(Quant::Exists, i);
        }
        int copy = 0;
        for (auto [quant, bi] : program_blocks) {
            ++copy;
            pos_ = blocks[bi].begin;
            limit_ = blocks[bi].end;
            Stmt body = alpha_rename(parse_stmts(), copy);
            expect_block_end();
            f.programs.push_back(QuantifiedProgram{copy, quant, std::move(body), false});
            (quant == Quant::Forall ? f.k : f.l) += 1;
        }
        if (f.programs.empty())
            throw ParseError(blocks[0].line, blocks[0].col,
                             "specification declares no program copies");
        max_copy_ = copy;

        bool have_counters = false, have_unroll = false;
        std::vector<Formula> pres, posts;
        for (const auto& b : blocks) {
            if (b.tag == "forall" || b.tag == "exists") continue;
            pos_ = b.begin;
            limit_ = b.end;
            if (b.tag == "pre" || b.tag == "post") {
                Formula g = parse_formula();
                expect_block_end();
                (b.tag == "pre" ? pres : posts).push_back(std::move(g));
            } else if (b.tag == "hint-invariant") {
                Formula g = parse_formula();
                expect_block_end();
                f.hints.invariants.push_back(std::move(g));
            } else if (b.tag == "hint-counters") {
                if (have_counters)
                    throw ParseError(b.line, b.col, "duplicate [hint-counters] block");
                have_counters = true;
                while (cur().kind == Token::Kind::Number) {
                    long v = std::stol(cur().text);
                    if (v <= 0)
                        throw ParseError(cur().line, cur().col,
                                         "loop counters must be positive");
                    f.hints.counters.push_back(v);
                    ++pos_;
                }
                expect_block_end();
                if (f.hints.counters.size() != size_t(max_copy_))
                    throw ParseError(b.line, b.col,
                                     "[hint-counters] lists " +
                                         std::to_string(f.hints.counters.size()) +
                                         " counters but the specification has " +
                                         std::to_string(max_copy_) + " program copies");
            } else if (b.tag == "hint-unroll") {
                if (have_unroll) throw ParseError(b.line, b.col, "duplicate [hint-unroll] block");
                have_unroll = true;
                if (cur().kind != Token::Kind::Number)
                    throw ParseError(cur().line, cur().col, "expected an unroll bound");
                f.hints.unroll = std::stoi(cur().text);
                ++pos_;
                expect_block_end();
                if (*f.hints.unroll <= 0)
                    throw ParseError(b.line, b.col, "unroll bound must be positive");
            } else {
                throw ParseError(b.line, b.col, "unknown block tag [" + b.tag + "]");
            }
        }
        if (!pres.empty()) f.pre = pres.size() == 1 ? pres[0] : Formula::conj(pres);
        if (!posts.empty()) f.post = posts.size() == 1 ? posts[0] : Formula::conj(posts);
        if (f.hints.unroll && !f.hints.counters.empty()) {
            long maxc = *std::max_element(f.hints.counters.begin(), f.hints.counters.end());
            if (*f.hints.unroll < maxc)
                throw ParseError(1, 1, "unroll bound " + std::to_string(*f.hints.unroll) +
                                           " is below the largest hinted counter " +
                                           std::to_string(maxc));
        }
        return f;
    }

    // Entry point for tests and hint handling: a standalone assertion.
    Formula parse_standalone_formula(int max_copy) {
        max_copy_ = max_copy;
        limit_ = toks_.size();
        Formula g = parse_formula();
        if (cur().kind != Token::Kind::End)
            throw ParseError(cur().line, cur().col, "trailing input after formula");
        return g;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    size_t limit_ = 0;
    int max_copy_ = 0;

    // Within a block, the block boundary acts as end of input; the synthetic
    // End token borrows the boundary token's position for error messages.
    const Token& cur() const {
        if (limit_ != 0 && pos_ >= limit_) {
            end_ = Token{Token::Kind::End, "",
                         pos_ < toks_.size() ? toks_[pos_].line : toks_.back().line,
                         pos_ < toks_.size() ? toks_[pos_].col : toks_.back().col};
            return end_;
        }
        return toks_[pos_];
    }
    mutable Token end_;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(cur().line, cur().col, msg);
    }
    bool at_punct(const std::string& p) const {
        return cur().kind == Token::Kind::Punct && cur().text == p;
    }
    bool at_ident(const std::string& s) const {
        return cur().kind == Token::Kind::Ident && cur().text == s;
    }
    void expect_punct(const std::string& p) {
        if (!at_punct(p)) fail("expected '" + p + "'");
        ++pos_;
    }
    void expect_block_end() {
        if (cur().kind != Token::Kind::End) fail("unexpected input at end of block");
    }

    // ---- program statements -------------------------------------------

    Stmt parse_stmts() {
        std::vector<Stmt> out;
        while (cur().kind != Token::Kind::End && !at_punct("}")) out.push_back(parse_stmt());
        return Stmt::seq_all(out);
    }

    Stmt parse_stmt() {
        if (at_ident("skip")) {
            ++pos_;
            expect_punct(";");
            return Stmt::skip();
        }
        if (at_ident("assume")) {
            ++pos_;
            expect_punct("(");
            BoolExpr b = parse_bool();
            expect_punct(")");
            expect_punct(";");
            return Stmt::assume(std::move(b));
        }
        if (at_ident("if")) {
            ++pos_;
            expect_punct("(");
            BoolExpr b = parse_bool();
            expect_punct(")");
            expect_punct("{");
            Stmt then_branch = parse_stmts();
            expect_punct("}");
            Stmt else_branch = Stmt::skip();
            if (at_ident("else")) {
                ++pos_;
                expect_punct("{");
                else_branch = parse_stmts();
                expect_punct("}");
            }
            return Stmt::if_else(std::move(b), std::move(then_branch), std::move(else_branch));
        }
        if (at_ident("while")) {
            ++pos_;
            expect_punct("(");
            BoolExpr b = parse_bool();
            expect_punct(")");
            expect_punct("{");
            Stmt body = parse_stmts();
            expect_punct("}");
            return Stmt::while_loop(std::move(b), std::move(body));
        }
        if (cur().kind == Token::Kind::Ident) {
            if (is_keyword(cur().text)) fail("unexpected keyword '" + cur().text + "'");
            VarName x{cur().text, 0};
            ++pos_;
            expect_punct("=");
            if (at_ident("nondet")) {
                ++pos_;
                expect_punct("(");
                expect_punct(")");
                expect_punct(";");
                return Stmt::havoc(std::move(x));
            }
            ArithExpr e = parse_arith();
            expect_punct(";");
            return Stmt::assign(std::move(x), std::move(e));
        }
        fail("expected a statement");
    }

    // ---- guard expressions (program side, unindexed variables) --------

    BoolExpr parse_bool() {
        BoolExpr a = parse_bool_and();
        while (at_punct("||")) {
            ++pos_;
            a = BoolExpr::disj(std::move(a), parse_bool_and());
        }
        return a;
    }
    BoolExpr parse_bool_and() {
        BoolExpr a = parse_bool_factor();
        while (at_punct("&&")) {
            ++pos_;
            a = BoolExpr::conj(std::move(a), parse_bool_factor());
        }
        return a;
    }
    BoolExpr parse_bool_factor() {
        if (at_punct("!")) {
            ++pos_;
            return BoolExpr::negate(parse_bool_factor());
        }
        if (at_ident("true")) {
            ++pos_;
            return BoolExpr::literal(true);
        }
        if (at_ident("false")) {
            ++pos_;
            return BoolExpr::literal(false);
        }
        if (at_punct("(")) {
            // Either a parenthesized guard or a parenthesized arithmetic
            // operand of a comparison; try the comparison reading first.
            size_t saved = pos_;
            try {
                return parse_comparison();
            } catch (const ParseError&) {
                pos_ = saved;
            }
            ++pos_;  // consume '('
            BoolExpr b = parse_bool();
            expect_punct(")");
            return b;
        }
        return parse_comparison();
    }
    BoolExpr parse_comparison() {
        ArithExpr l = parse_arith();
        CmpOp op = parse_cmp_op();
        ArithExpr r = parse_arith();
        return BoolExpr::compare(op, std::move(l), std::move(r));
    }
    CmpOp parse_cmp_op() {
        static const std::pair<const char*, CmpOp> ops[] = {
            {"==", CmpOp::Eq}, {"!=", CmpOp::Ne}, {"<=", CmpOp::Le},
            {">=", CmpOp::Ge}, {"<", CmpOp::Lt},  {">", CmpOp::Gt}};
        for (const auto& [text, op] : ops) {
            if (at_punct(text)) {
                ++pos_;
                return op;
            }
        }
        fail("expected a comparison operator");
    }

    ArithExpr parse_arith() {
        ArithExpr a = parse_arith_term();
        while (at_punct("+") || at_punct("-")) {
            ArithOp op = at_punct("+") ? ArithOp::Add : ArithOp::Sub;
            ++pos_;
            a = ArithExpr::binary(op, std::move(a), parse_arith_term());
        }
        return a;
    }
    ArithExpr parse_arith_term() {
        ArithExpr a = parse_arith_factor();
        while (at_punct("*")) {
            ++pos_;
            a = ArithExpr::binary(ArithOp::Mul, std::move(a), parse_arith_factor());
        }
        return a;
    }
    ArithExpr parse_arith_factor() {
        if (at_punct("-")) {
            ++pos_;
            ArithExpr a = parse_arith_factor();
            if (a.kind() == ArithExpr::Kind::Literal) return ArithExpr::literal(-a.value());
            return ArithExpr::binary(ArithOp::Sub, ArithExpr::literal(0), std::move(a));
        }
        if (cur().kind == Token::Kind::Number) {
            Int v(cur().text);
            ++pos_;
            return ArithExpr::literal(std::move(v));
        }
        if (at_punct("(")) {
            ++pos_;
            ArithExpr a = parse_arith();
            expect_punct(")");
            return a;
        }
        if (cur().kind == Token::Kind::Ident) {
            if (at_ident("nondet"))
                fail("nondet() may only appear alone on the right of an assignment");
            if (is_keyword(cur().text)) fail("unexpected keyword '" + cur().text + "'");
            VarName v{cur().text, 0};
            ++pos_;
            return ArithExpr::variable(std::move(v));
        }
        fail("expected an arithmetic operand");
    }

    // ---- assertions (indexed variables, Formula values) ---------------

    VarName parse_indexed_var() {
        if (cur().kind != Token::Kind::Ident) fail("expected an indexed variable");
        const std::string& s = cur().text;
        if (is_keyword(s)) fail("unexpected keyword '" + s + "'");
        size_t us = s.rfind('_');
        bool ok = us != std::string::npos && us > 0 && us + 1 < s.size();
        if (ok)
            for (size_t i = us + 1; i < s.size(); ++i)
                ok = ok && std::isdigit(static_cast<unsigned char>(s[i]));
        if (!ok)
            fail("assertion variables need a copy index suffix, e.g. " + s + "_1");
        int copy = std::stoi(s.substr(us + 1));
        if (copy < 1 || copy > max_copy_)
            fail("variable " + s + " refers to copy " + std::to_string(copy) +
                 " but the specification has " + std::to_string(max_copy_) + " copies");
        VarName v{s.substr(0, us), copy};
        ++pos_;
        return v;
    }

    Formula parse_formula() {
        Formula a = parse_formula_and();
        while (at_punct("||")) {
            ++pos_;
            a = Formula::disj2(std::move(a), parse_formula_and());
        }
        return a;
    }
    Formula parse_formula_and() {
        Formula a = parse_formula_factor();
        while (at_punct("&&")) {
            ++pos_;
            a = Formula::conj2(std::move(a), parse_formula_factor());
        }
        return a;
    }
    Formula parse_formula_factor() {
        if (at_punct("!")) {
            ++pos_;
            return Formula::negate(parse_formula_factor());
        }
        if (at_ident("true")) {
            ++pos_;
            return Formula::tt();
        }
        if (at_ident("false")) {
            ++pos_;
            return Formula::ff();
        }
        if (at_punct("(")) {
            size_t saved = pos_;
            try {
                return parse_formula_cmp();
            } catch (const ParseError&) {
                pos_ = saved;
            }
            ++pos_;
            Formula b = parse_formula();
            expect_punct(")");
            return b;
        }
        return parse_formula_cmp();
    }
    Formula parse_formula_cmp() {
        Term l = parse_term();
        CmpOp op = parse_cmp_op();
        Term r = parse_term();
        return Formula::compare(op, std::move(l), std::move(r));
    }
    Term parse_term() {
        Term a = parse_term_mul();
        while (at_punct("+") || at_punct("-")) {
            ArithOp op = at_punct("+") ? ArithOp::Add : ArithOp::Sub;
            ++pos_;
            a = Term::binary(op, std::move(a), parse_term_mul());
        }
        return a;
    }
    Term parse_term_mul() {
        Term a = parse_term_factor();
        while (at_punct("*")) {
            ++pos_;
            a = Term::mul(std::move(a), parse_term_factor());
        }
        return a;
    }
    Term parse_term_factor() {
        if (at_punct("-")) {
            ++pos_;
            Term a = parse_term_factor();
            if (a.kind() == Term::Kind::Literal) return Term::literal(-a.value());
            return Term::sub(Term::literal(0), std::move(a));
        }
        if (cur().kind == Token::Kind::Number) {
            Int v(cur().text);
            ++pos_;
            return Term::literal(std::move(v));
        }
        if (at_punct("(")) {
            ++pos_;
            Term a = parse_term();
            expect_punct(")");
            return a;
        }
        if (cur().kind == Token::Kind::Ident) {
            if (at_ident("nondet")) fail("nondet() cannot appear in assertions");
            return Term::variable(parse_indexed_var());
        }
        fail("expected an arithmetic operand");
    }
};

}  // namespace detail

inline Feht parse_spec(const std::string& text) {
    return detail::SpecParser(text).parse_file();
}

inline Formula parse_formula_text(const std::string& text, int max_copy) {
    return detail::SpecParser(text).parse_standalone_formula(max_copy);
}

// ---------------------------------------------------------------------------
// Canonical printing. parse_spec(print_spec(f)) reproduces f structurally.

namespace detail {

inline std::string strip_index(const VarName& v) { return v.base; }

inline std::string print_arith(const ArithExpr& e, int parent_prec) {
    switch (e.kind()) {
    case ArithExpr::Kind::Literal: {
        std::string s = e.value().str();
        return (e.value() < 0 && parent_prec > 1) ? "(" + s + ")" : s;
    }
    case ArithExpr::Kind::Variable: return strip_index(e.var());
    case ArithExpr::Kind::Binary: {
        const bool mul = e.op() == ArithOp::Mul;
        const int prec = mul ? 2 : 1;
        const char* op = mul ? " * " : (e.op() == ArithOp::Add ? " + " : " - ");
        std::string l = print_arith(e.lhs(), prec);
        std::string r = print_arith(e.rhs(), e.op() == ArithOp::Add ? prec : prec + 1);
        std::string s = l + op + r;
        return parent_prec > prec ? "(" + s + ")" : s;
    }
    }
    return "?";
}

inline std::string print_guard(const BoolExpr& b, int parent_prec) {
    auto wrap = [&](int prec, const std::string& s) {
        return parent_prec > prec ? "(" + s + ")" : s;
    };
    switch (b.kind()) {
    case BoolExpr::Kind::True: return "true";
    case BoolExpr::Kind::False: return "false";
    case BoolExpr::Kind::Compare:
        return wrap(5, print_arith(b.cmp_lhs(), 0) + " " + cmp_op_text(b.cmp_op()) + " " +
                           print_arith(b.cmp_rhs(), 0));
    case BoolExpr::Kind::Not: return "!" + print_guard(b.arg(), 6);
    case BoolExpr::Kind::And:
        return wrap(4, print_guard(b.lhs(), 4) + " && " + print_guard(b.rhs(), 5));
    case BoolExpr::Kind::Or:
        return wrap(3, print_guard(b.lhs(), 3) + " || " + print_guard(b.rhs(), 4));
    }
    return "?";
}

inline void print_stmt_into(const Stmt& s, int indent, std::string& out) {
    std::string pad(size_t(indent) * 2, ' ');
    switch (s.kind()) {
    case Stmt::Kind::Skip:
        out += pad + "skip;\n";
        return;
    case Stmt::Kind::Assign:
        out += pad + strip_index(s.var()) + " = " + print_arith(s.expr(), 0) + ";\n";
        return;
    case Stmt::Kind::Havoc:
        out += pad + strip_index(s.var()) + " = nondet();\n";
        return;
    case Stmt::Kind::Assume:
        out += pad + "assume(" + print_guard(s.cond(), 0) + ");\n";
        return;
    case Stmt::Kind::If:
        out += pad + "if (" + print_guard(s.cond(), 0) + ") {\n";
        print_stmt_into(s.then_branch(), indent + 1, out);
        out += pad + "} else {\n";
        print_stmt_into(s.else_branch(), indent + 1, out);
        out += pad + "}\n";
        return;
    case Stmt::Kind::While:
        out += pad + "while (" + print_guard(s.cond(), 0) + ") {\n";
        print_stmt_into(s.body(), indent + 1, out);
        out += pad + "}\n";
        return;
    case Stmt::Kind::Seq:
        print_stmt_into(s.first(), indent, out);
        print_stmt_into(s.second(), indent, out);
        return;
    }
}

}  // namespace detail

inline std::string print_program(const Stmt& s) {
    std::string out;
    detail::print_stmt_into(s, 1, out);
    return out;
}

inline std::string print_spec(const Feht& f) {
    std::string out;
    for (const auto& p : f.programs) {
        out += p.quant == Quant::Forall ? "[forall]\n" : "[exists]\n";
        out += print_program(p.remaining);
        out += "\n";
    }
    out += "[pre]\n" + to_string(f.pre) + "\n\n";
    out += "[post]\n" + to_string(f.post) + "\n";
    for (const auto& h : f.hints.invariants) out += "\n[hint-invariant]\n" + to_string(h) + "\n";
    if (!f.hints.counters.empty()) {
        out += "\n[hint-counters]\n";
        for (size_t i = 0; i < f.hints.counters.size(); ++i)
            out += (i ? " " : "") + std::to_string(f.hints.counters[i]);
        out += "\n";
    }
    if (f.hints.unroll) out += "\n[hint-unroll]\n" + std::to_string(*f.hints.unroll) + "\n";
    return out;
}

}  // namespace forex
