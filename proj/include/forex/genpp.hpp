// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Parametric postcondition generation. The analysis walks all program copies
// forward, strongest-postcondition style. Nondeterministic choices in
// existentially quantified copies become fresh parameters; assume statements
// in those copies restrict the admissible parameter values instead of
// filtering states. The result is a pair (Xi, C): Xi describes the reachable
// final states as a function of the parameters, C constrains the parameters
// to choices backed by real executions.
//
// Loops are handled by counting alignment (see loops.hpp): every copy in a
// loop group advances a fixed number of iterations per joint round under a
// shared invariant.

#include "feht.hpp"
#include "simplify.hpp"
#include "smt.hpp"

namespace forex {

struct AnalysisFailure : std::runtime_error {
    AnalysisFailure(std::string kind_, std::string detail_, int group_ = -1)
        : std::runtime_error(kind_ + ": " + detail_),
          kind(std::move(kind_)), detail(std::move(detail_)), group(group_) {}
    std::string kind;    // existential_only | candidates_exhausted | budget_exhausted
    std::string detail;
    int group;           // loop group index when applicable, else -1
};

struct TraceEvent {
    std::string rule;
    int copy = 0;
    std::string note;
};

struct EngineConfig {
    int max_unroll = 2;           // largest generated per-copy counter (capped at 3)
    long candidate_budget = 500;  // fresh (invariant, counters) pairs per run
    bool trace = false;
};

struct GroupReport {
    std::string key;
    std::string invariant;
    std::vector<long> counters;
    long skipped = 0;  // passing candidates skipped by backtracking
    long tried = 0;    // candidates examined during the accepting attempt
};

// Universal closure over every free program variable; parameters stay free.
inline Formula forall_close_vars(Formula f) {
    std::set<VarName> vs = free_vars(f);
    for (auto it = vs.rbegin(); it != vs.rend(); ++it)
        f = Formula::forall(Symbol{*it}, std::move(f));
    return f;
}

namespace detail {

// A bounded evaluation that returns false is only trustworthy when falsity
// is witnessed by concrete values. These predicates identify the fragment
// where that holds: universals may be refuted by a found counterexample and
// existentials confirmed by a found witness, but not vice versa.
inline bool exact_when_true(const Formula& f);

inline bool exact_when_false(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Compare: return true;
    case Formula::Kind::Not: return exact_when_true(f.arg());
    case Formula::Kind::And:
    case Formula::Kind::Or:
        for (const auto& g : f.args())
            if (!exact_when_false(g)) return false;
        return true;
    case Formula::Kind::Implies:
        return exact_when_true(f.lhs()) && exact_when_false(f.rhs());
    case Formula::Kind::Iff: return false;
    case Formula::Kind::Forall: return exact_when_false(f.body());
    case Formula::Kind::Exists: return false;
    }
    return false;
}

inline bool exact_when_true(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Compare: return true;
    case Formula::Kind::Not: return exact_when_false(f.arg());
    case Formula::Kind::And:
    case Formula::Kind::Or:
        for (const auto& g : f.args())
            if (!exact_when_true(g)) return false;
        return true;
    case Formula::Kind::Implies:
        return exact_when_false(f.lhs()) && exact_when_true(f.rhs());
    case Formula::Kind::Iff: return false;
    case Formula::Kind::Exists: return exact_when_true(f.body());
    case Formula::Kind::Forall: return false;
    }
    return false;
}

inline int count_binders(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Compare: return 0;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return 1 + count_binders(f.body());
    default: {
        int n = 0;
        for (const auto& g : f.args()) n += count_binders(g);
        return n;
    }
    }
}

}  // namespace detail

class Engine {
public:
    explicit Engine(Solver& solver, EngineConfig cfg = {}) : solver_(solver), cfg_(cfg) {}

    // One analysis attempt. group_skips[g] tells loop group g to pass over
    // that many otherwise-acceptable candidates; the verification driver
    // raises these counts to backtrack after a failed closing query.
    ParametricAssertion analyze(const Feht& spec, std::vector<long> group_skips = {});

    // ---- single-step rules, exposed for unit tests --------------------

    static Formula sp_assign(const Formula& phi, const VarName& x, const ArithExpr& e) {
        Term et = embed(e);
        std::set<VarName> evs;
        collect_vars(e, evs);
        std::set<VarName> pvs = free_vars(phi);
        if (!pvs.count(x) && !evs.count(x))
            return simplify(Formula::conj2(phi, Formula::eq(Term::variable(x), et)));
        std::set<VarName> avoid = pvs;
        avoid.insert(evs.begin(), evs.end());
        avoid.insert(x);
        VarName xp = fresh_var_like(x, avoid);
        Formula moved = subst_var(phi, x, Term::variable(xp));
        Term e2 = subst_var_term(et, x, Term::variable(xp));
        return simplify(Formula::exists(
            Symbol{xp},
            Formula::conj2(std::move(moved), Formula::eq(Term::variable(x), std::move(e2)))));
    }

    static Formula sp_havoc_forall(const Formula& phi, const VarName& x) {
        return simplify(Formula::exists(Symbol{x}, phi));
    }

    static Formula sp_havoc_exists(const Formula& phi, const VarName& x, const Param& mu) {
        return simplify(Formula::conj2(Formula::exists(Symbol{x}, phi),
                                       Formula::eq(Term::variable(x), Term::parameter(mu))));
    }

    // Restriction demanded by an assume in an existentially quantified copy:
    // every state allowed so far must already satisfy the guard.
    static Formula assume_guarantee(const Formula& phi, const BoolExpr& b) {
        return simplify(forall_close_vars(Formula::implies(phi, embed(b))));
    }

    // ---- run accounting ----------------------------------------------

    long budget_used() const { return budget_used_; }
    int groups_encountered() const { return static_cast<int>(group_seq_); }
    const std::vector<GroupReport>& group_reports() const { return group_reports_; }
    const std::vector<TraceEvent>& trace() const { return trace_; }
    const std::vector<Param>& minted_params() const { return minted_params_; }

    // Invariant candidate atoms for one loop group; public for testing.
    std::vector<Formula> invariant_pool(const std::vector<QuantifiedProgram>& frames,
                                        const std::vector<size_t>& group,
                                        const Formula& phi) const;

private:
    struct Derived {
        Formula xi;
        std::vector<Formula> cs;  // restriction conjuncts introduced below this point
    };

    // Rollback point for rejected loop candidates: everything a candidate
    // evaluation allocates (parameters, nested group slots, trace entries)
    // is undone before the next candidate runs.
    struct Mark {
        int next_param;
        size_t minted, gseq, reports, trace;
    };

    Solver& solver_;
    EngineConfig cfg_;
    const Feht* spec_ = nullptr;

    int next_param_ = 1;
    std::vector<Param> minted_params_;
    std::vector<long> skips_;
    size_t group_seq_ = 0;
    std::vector<GroupReport> group_reports_;
    std::vector<TraceEvent> trace_;

    // Shared across attempts of the same run; keys are canonical formula
    // prints, so re-derivations with identical prefixes hit the cache.
    std::map<std::string, SolverResult> sat_cache_;
    std::map<std::string, std::vector<std::set<std::string>>> too_strong_, too_weak_;
    std::set<std::string> budget_seen_;
    long budget_used_ = 0;

    Param mint_param(const VarName& v) {
        Param p{next_param_++, v};
        minted_params_.push_back(p);
        return p;
    }

    Mark mark() const {
        return Mark{next_param_, minted_params_.size(), group_seq_, group_reports_.size(),
                    trace_.size()};
    }
    void rollback(const Mark& m) {
        next_param_ = m.next_param;
        minted_params_.resize(m.minted);
        group_seq_ = m.gseq;
        group_reports_.resize(m.reports);
        trace_.resize(m.trace);
    }

    void note(const char* rule, int copy, std::string text) {
        if (cfg_.trace) trace_.push_back(TraceEvent{rule, copy, std::move(text)});
    }

    // Prints a formula with parameters renumbered by ascending id, so two
    // attempts that mint different parameter ids at the same derivation
    // point produce identical keys.
    static std::string canonical_key(const Formula& f) {
        Formula g = f;
        int next = 0;
        for (const Param& p : free_params(f))
            g = subst_param(g, p, Term::parameter(Param{1000000 + ++next, p.minted_for}));
        return to_string(g);
    }

    // Satisfiability with caching and a cheap refutation pass: a closed,
    // parameter-free query that bounded evaluation falsifies exactly needs
    // no solver round-trip. Acceptance always goes through the solver.
    SolverResult sat_cached(const Formula& query) {
        std::string key = "sat|" + canonical_key(query);
        if (auto it = sat_cache_.find(key); it != sat_cache_.end()) return it->second;
        SolverResult r;
        bool decided = false;
        if (free_params(query).empty() && free_vars(query).empty()) {
            Formula n = normalize_for_eval(query);
            if (detail::exact_when_false(n) && detail::count_binders(n) <= 5 &&
                !eval(n, State{}, 3)) {
                r = SolverResult::Unsat;
                decided = true;
            }
        }
        if (!decided) r = solver_.check_restriction_sat(query);
        // Unknown verdicts (usually transient timeouts) stay uncached so a
        // later attempt can ask again.
        if (r != SolverResult::Unknown) sat_cache_[key] = r;
        return r;
    }

    Derived genpp(std::vector<QuantifiedProgram> frames, Formula phi, const Formula& c_ctx);
    Derived gen_loops(const std::vector<QuantifiedProgram>& frames, const Formula& phi,
                      const Formula& c_ctx);
};

inline ParametricAssertion Engine::analyze(const Feht& spec, std::vector<long> group_skips) {
    spec_ = &spec;
    next_param_ = 1;
    minted_params_.clear();
    skips_ = std::move(group_skips);
    group_seq_ = 0;
    group_reports_.clear();
    trace_.clear();
    Derived d = genpp(spec.programs, spec.pre, Formula::tt());
    Formula c = d.cs.empty() ? Formula::tt() : simplify(Formula::conj(d.cs));
    return ParametricAssertion{d.xi, c};
}

inline Engine::Derived Engine::genpp(std::vector<QuantifiedProgram> frames, Formula phi,
                                     const Formula& c_ctx) {
    for (auto& fr : frames) {
        if (fr.finished) continue;
        fr.remaining = normalize_head(fr.remaining);
        if (fr.remaining.kind() == Stmt::Kind::Skip) {
            fr.finished = true;
            note("finish", fr.copy, "");
        }
    }

    // Prefer a step in a universal copy; fall back to an existential one.
    // Copies whose head is a loop wait until every unfinished copy is at a
    // loop, which triggers the alignment analysis.
    int pick = -1;
    bool any_unfinished = false;
    for (Quant phase : {Quant::Forall, Quant::Exists}) {
        for (size_t i = 0; i < frames.size() && pick < 0; ++i) {
            const auto& fr = frames[i];
            if (fr.finished || fr.quant != phase) continue;
            any_unfinished = true;
            if (fr.remaining.first().kind() != Stmt::Kind::While) pick = static_cast<int>(i);
        }
        if (pick >= 0) break;
    }
    if (!any_unfinished) return Derived{std::move(phi), {}};
    if (pick < 0) return gen_loops(frames, phi, c_ctx);

    QuantifiedProgram& fr = frames[pick];
    const Stmt head = fr.remaining.first();
    fr.remaining = fr.remaining.second();

    switch (head.kind()) {
    case Stmt::Kind::Assign: {
        note("assign", fr.copy, head.var().str());
        return genpp(std::move(frames), sp_assign(phi, head.var(), head.expr()), c_ctx);
    }
    case Stmt::Kind::Havoc: {
        if (fr.quant == Quant::Forall) {
            note("havoc", fr.copy, head.var().str());
            return genpp(std::move(frames), sp_havoc_forall(phi, head.var()), c_ctx);
        }
        Param mu = mint_param(head.var());
        note("havoc", fr.copy, head.var().str() + " -> " + mu.str());
        return genpp(std::move(frames), sp_havoc_exists(phi, head.var(), mu), c_ctx);
    }
    case Stmt::Kind::Assume: {
        Formula g = embed(head.cond());
        if (fr.quant == Quant::Forall) {
            note("assume", fr.copy, to_string(g));
            return genpp(std::move(frames), simplify(Formula::conj2(phi, g)), c_ctx);
        }
        Formula ca = assume_guarantee(phi, head.cond());
        note("assume", fr.copy, to_string(g) + " requires " + to_string(ca));
        Derived sub = genpp(std::move(frames), simplify(Formula::conj2(phi, g)),
                            simplify(Formula::conj2(c_ctx, ca)));
        sub.cs.insert(sub.cs.begin(), std::move(ca));
        return sub;
    }
    case Stmt::Kind::If: {
        Formula g = embed(head.cond());
        note("branch", fr.copy, to_string(g));
        std::vector<QuantifiedProgram> other = frames;
        frames[pick].remaining = Stmt::seq(head.then_branch(), frames[pick].remaining);
        other[pick].remaining = Stmt::seq(head.else_branch(), other[pick].remaining);
        Derived then_d =
            genpp(std::move(frames), simplify(Formula::conj2(phi, g)), c_ctx);
        Derived else_d = genpp(std::move(other),
                               simplify(Formula::conj2(phi, Formula::negate(g))), c_ctx);
        Derived out;
        out.xi = Formula::disj2(std::move(then_d.xi), std::move(else_d.xi));
        out.cs = std::move(then_d.cs);
        out.cs.insert(out.cs.end(), else_d.cs.begin(), else_d.cs.end());
        return out;
    }
    default:
        throw std::logic_error("unexpected statement head");
    }
}

}  // namespace forex

#include "loops.hpp"
