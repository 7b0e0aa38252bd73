// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>

#include "genpp.hpp"

// Counting-based loop alignment. When every unfinished copy sits at a loop
// head, the copies form one loop group that advances in joint rounds: copy i
// executes its body c_i times per round under a shared invariant I. The
// derivation then needs
//   init     every state reaching the group satisfies I
//   sim      inside I all loop guards agree, so the group exits together
//   cont(j)  copies with more body passes left can still continue
//   ind      one full round re-establishes I
// plus whatever the bodies and the code after the loops contribute. The
// candidate search tries hinted invariants first, then conjunctions drawn
// from a small pool of cross-copy relations, with counter tuples cycled in
// the outer loop. Failed restriction checks prune by monotonicity: an
// invariant too strong to hold on entry stays too strong with extra
// conjuncts, one too weak to pin the guards stays too weak with fewer.

namespace forex {

namespace detail {

struct LoopCandidate {
    Formula inv;
    std::set<std::string> atoms;  // conjunct prints, for monotone pruning
    bool lattice = false;         // pool-built, so pruning applies
    std::string desc;
};

inline void collect_literals(const ArithExpr& e, std::set<Int>& out) {
    switch (e.kind()) {
    case ArithExpr::Kind::Literal: out.insert(e.value()); break;
    case ArithExpr::Kind::Variable: break;
    case ArithExpr::Kind::Binary:
        collect_literals(e.lhs(), out);
        collect_literals(e.rhs(), out);
        break;
    }
}

inline void collect_literals(const BoolExpr& b, std::set<Int>& out) {
    switch (b.kind()) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: break;
    case BoolExpr::Kind::Compare:
        collect_literals(b.cmp_lhs(), out);
        collect_literals(b.cmp_rhs(), out);
        break;
    case BoolExpr::Kind::Not: collect_literals(b.arg(), out); break;
    case BoolExpr::Kind::And:
    case BoolExpr::Kind::Or:
        collect_literals(b.lhs(), out);
        collect_literals(b.rhs(), out);
        break;
    }
}

inline void collect_literals(const Stmt& s, std::set<Int>& out) {
    switch (s.kind()) {
    case Stmt::Kind::Skip:
    case Stmt::Kind::Havoc: break;
    case Stmt::Kind::Assign: collect_literals(s.expr(), out); break;
    case Stmt::Kind::Assume: collect_literals(s.cond(), out); break;
    case Stmt::Kind::If:
        collect_literals(s.cond(), out);
        collect_literals(s.then_branch(), out);
        collect_literals(s.else_branch(), out);
        break;
    case Stmt::Kind::While:
        collect_literals(s.cond(), out);
        collect_literals(s.body(), out);
        break;
    case Stmt::Kind::Seq:
        collect_literals(s.first(), out);
        collect_literals(s.second(), out);
        break;
    }
}

}  // namespace detail

inline std::vector<Formula> Engine::invariant_pool(
    const std::vector<QuantifiedProgram>& frames, const std::vector<size_t>& group,
    const Formula&) const {
    size_t n = group.size();
    std::vector<std::set<VarName>> loop_vars(n), guard_vars(n);
    std::vector<int> copy(n);
    for (size_t t = 0; t < n; ++t) {
        const auto& fr = frames[group[t]];
        copy[t] = fr.copy;
        const Stmt w = fr.remaining.first();
        loop_vars[t] = vars_of(w);
        collect_vars(w.cond(), guard_vars[t]);
    }

    std::set<Int> consts;
    if (spec_) {
        for (const auto& qp : spec_->programs) detail::collect_literals(qp.remaining, consts);
    }

    std::vector<Formula> pool;
    std::set<std::string> seen;
    auto add = [&](Formula f) {
        std::string k = to_string(f);
        if (seen.insert(k).second) pool.push_back(std::move(f));
    };
    auto tv = [](const VarName& v) { return Term::variable(v); };

    for (size_t a = 0; a < n; ++a) {
        for (size_t b = a + 1; b < n; ++b) {
            // same-base equalities over variables both loops touch
            for (const VarName& v : loop_vars[a]) {
                VarName w{v.base, copy[b]};
                if (loop_vars[b].count(w))
                    add(Formula::eq(tv(VarName{v.base, copy[a]}), tv(w)));
            }
            // orderings between the guard variables driving each loop
            for (const VarName& v : guard_vars[a]) {
                VarName w{v.base, copy[b]};
                if (guard_vars[b].count(w)) {
                    add(Formula::compare(CmpOp::Le, tv(v), tv(w)));
                    add(Formula::compare(CmpOp::Ge, tv(v), tv(w)));
                }
            }
        }
    }

    // scaled relations v == m*w (+/- 1) between guard variables of distinct
    // copies, for multipliers the program itself mentions
    std::vector<Int> mults;
    for (Int m : {Int(2), Int(3)})
        if (consts.count(m)) mults.push_back(m);
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            for (const VarName& v : guard_vars[a]) {
                for (const VarName& w : guard_vars[b]) {
                    for (const Int& m : mults) {
                        Term scaled = Term::mul(Term::literal(m), tv(w));
                        add(Formula::eq(tv(v), scaled));
                        add(Formula::eq(tv(v), Term::add(scaled, Term::literal(1))));
                        add(Formula::eq(tv(v), Term::sub(scaled, Term::literal(1))));
                    }
                }
            }
        }
    }
    return pool;
}

inline Engine::Derived Engine::gen_loops(const std::vector<QuantifiedProgram>& frames,
                                         const Formula& phi, const Formula& c_ctx) {
    const int my_group = static_cast<int>(group_seq_++);

    std::vector<size_t> group;
    for (size_t i = 0; i < frames.size(); ++i)
        if (!frames[i].finished) group.push_back(i);
    const size_t n = group.size();

    std::vector<Formula> guards(n);
    std::vector<Stmt> bodies(n);
    bool has_univ = false;
    std::string gkey = canonical_key(phi) + " @";
    for (size_t t = 0; t < n; ++t) {
        const auto& fr = frames[group[t]];
        const Stmt w = fr.remaining.first();
        guards[t] = embed(w.cond());
        bodies[t] = w.body();
        has_univ = has_univ || fr.quant == Quant::Forall;
        gkey += " " + std::to_string(fr.copy) + (fr.quant == Quant::Forall ? "A" : "E") + ":" +
                to_string(fr.remaining);
    }
    note("loops", 0, "group " + std::to_string(my_group));

    auto advance_past_loops = [&]() {
        std::vector<QuantifiedProgram> out = frames;
        for (size_t t = 0; t < n; ++t)
            out[group[t]].remaining = out[group[t]].remaining.second();
        return out;
    };

    Formula all_exit = Formula::tt();
    for (size_t t = 0; t < n; ++t)
        all_exit = Formula::conj2(std::move(all_exit), Formula::negate(guards[t]));

    // No universal copy in the group: take the zero-iteration alignment.
    // Every admissible state must already be outside all loops; otherwise
    // this analysis has no way to pick an iteration count.
    if (!has_univ) {
        Formula c_zero = simplify(forall_close_vars(Formula::implies(phi, all_exit)));
        SolverResult r = sat_cached(simplify(Formula::conj2(c_ctx, c_zero)));
        if (r != SolverResult::Sat)
            throw AnalysisFailure("existential_only",
                                  "existential loop group not exitable without iterating",
                                  my_group);
        Derived rest = genpp(advance_past_loops(), simplify(Formula::conj2(phi, all_exit)),
                             simplify(Formula::conj2(c_ctx, c_zero)));
        rest.cs.insert(rest.cs.begin(), std::move(c_zero));
        return rest;
    }

    // ---- candidate construction --------------------------------------

    const Feht& spec = *spec_;
    std::vector<detail::LoopCandidate> cands;
    std::set<std::string> cand_seen;
    auto push_cand = [&](Formula inv, std::set<std::string> atoms, bool lattice,
                         std::string desc) {
        std::string k = to_string(inv);
        if (!cand_seen.insert(k).second) return;
        cands.push_back(detail::LoopCandidate{std::move(inv), std::move(atoms), lattice,
                                              std::move(desc)});
    };
    for (size_t h = 0; h < spec.hints.invariants.size(); ++h)
        push_cand(spec.hints.invariants[h], {}, false, "hint" + std::to_string(h + 1));
    if (free_params(phi).empty()) {
        Formula seed = normalize_for_eval(phi);
        if (!seed.is_true()) push_cand(std::move(seed), {}, false, "entry");
    }
    std::vector<Formula> pool = invariant_pool(frames, group, phi);
    for (size_t i = 0; i < pool.size(); ++i)
        push_cand(pool[i], {to_string(pool[i])}, true, "p" + std::to_string(i));
    for (size_t i = 0; i < pool.size(); ++i) {
        for (size_t j = i + 1; j < pool.size(); ++j) {
            push_cand(simplify(Formula::conj2(pool[i], pool[j])),
                      {to_string(pool[i]), to_string(pool[j])}, true,
                      "p" + std::to_string(i) + "+p" + std::to_string(j));
        }
    }

    // counter tuples, hinted tuple verbatim or generated blocks up to cap
    long cap = std::max<long>(cfg_.max_unroll, spec.hints.unroll ? *spec.hints.unroll : 1);
    cap = std::min<long>(std::max<long>(cap, 1), 3);
    std::vector<std::vector<long>> counter_tuples;
    if (!spec.hints.counters.empty()) {
        std::vector<long> tup(n);
        for (size_t t = 0; t < n; ++t)
            tup[t] = spec.hints.counters[static_cast<size_t>(frames[group[t]].copy) - 1];
        counter_tuples.push_back(std::move(tup));
    } else {
        counter_tuples.push_back(std::vector<long>(n, 1));
        for (long hi : {2L, 3L}) {
            if (cap < hi) continue;
            std::vector<long> tup(n, 1);
            for (;;) {  // enumerate {1,hi}^n in binary order, skipping all-ones
                size_t t = n;
                while (t > 0) {
                    if (tup[t - 1] == 1) { tup[t - 1] = hi; break; }
                    tup[t - 1] = 1;
                    --t;
                }
                if (t == 0) break;
                counter_tuples.push_back(tup);
            }
        }
    }

    const long want_skip = my_group < static_cast<int>(skips_.size()) ? skips_[my_group] : 0;
    long passed = 0, tried = 0;
    std::string last_fail = "no candidates";
    const std::string lkey = gkey + "|" + canonical_key(c_ctx);

    for (const auto& tup : counter_tuples) {
        long big = 1;
        for (long c : tup) big = std::max(big, c);
        std::string tup_txt;
        for (long c : tup) tup_txt += (tup_txt.empty() ? "" : ",") + std::to_string(c);

        for (const auto& cand : cands) {
            const std::string desc = cand.desc + "@" + tup_txt;

            if (cand.lattice) {
                bool pruned = false;
                for (const auto& s : too_strong_[lkey]) {
                    if (std::includes(cand.atoms.begin(), cand.atoms.end(), s.begin(),
                                      s.end())) {
                        pruned = true;
                        last_fail = "init";
                        break;
                    }
                }
                if (!pruned) {
                    for (const auto& s : too_weak_[lkey]) {
                        if (std::includes(s.begin(), s.end(), cand.atoms.begin(),
                                          cand.atoms.end())) {
                            pruned = true;
                            last_fail = "sim";
                            break;
                        }
                    }
                }
                if (pruned) continue;
            }

            if (budget_seen_.insert(gkey + "|" + desc).second) {
                if (budget_used_ >= cfg_.candidate_budget)
                    throw AnalysisFailure("budget_exhausted",
                                          "candidate budget spent at group " +
                                              std::to_string(my_group),
                                          my_group);
                ++budget_used_;
            }
            ++tried;
            note("try", 0, desc);

            Formula ctx = c_ctx;
            auto require_sat = [&](Formula piece, const std::string& what) {
                Formula q = simplify(Formula::conj2(ctx, piece));
                if (sat_cached(q) != SolverResult::Sat) {
                    last_fail = what;
                    return false;
                }
                ctx = std::move(q);
                return true;
            };

            Formula c_init = simplify(forall_close_vars(Formula::implies(phi, cand.inv)));
            if (!require_sat(c_init, "init")) {
                if (cand.lattice) too_strong_[lkey].push_back(cand.atoms);
                continue;
            }

            Formula agree = Formula::tt();
            for (size_t t = 1; t < n; ++t)
                agree = Formula::conj2(std::move(agree), Formula::iff(guards[0], guards[t]));
            Formula c_sim = simplify(forall_close_vars(Formula::implies(cand.inv, agree)));
            if (n > 1 && !require_sat(c_sim, "sim")) {
                if (cand.lattice) too_weak_[lkey].push_back(cand.atoms);
                continue;
            }

            const Mark m = mark();
            bool failed = false;
            std::vector<Formula> cs{c_init};
            if (n > 1) cs.push_back(c_sim);
            Formula xi = cand.inv;

            for (long j = 1; j <= big && !failed; ++j) {
                Formula step_pre = xi;
                std::vector<QuantifiedProgram> sub(n);
                for (size_t t = 0; t < n; ++t) {
                    sub[t] = frames[group[t]];
                    if (tup[t] >= j) {
                        sub[t].remaining = bodies[t];
                        sub[t].finished = false;
                        step_pre = Formula::conj2(std::move(step_pre), guards[t]);
                    } else {
                        sub[t].remaining = Stmt::skip();
                        sub[t].finished = true;
                    }
                }
                try {
                    Derived d = genpp(std::move(sub), simplify(std::move(step_pre)), ctx);
                    xi = std::move(d.xi);
                    for (auto& c : d.cs) {
                        if (!require_sat(c, "body(" + std::to_string(j) + ")")) {
                            failed = true;
                            break;
                        }
                        cs.push_back(std::move(c));
                    }
                } catch (const AnalysisFailure& e) {
                    if (e.kind == "budget_exhausted") throw;
                    last_fail = "body(" + std::to_string(j) + "):" + e.kind;
                    failed = true;
                }
                if (failed) break;
                if (j < big) {
                    Formula more = Formula::tt();
                    for (size_t t = 0; t < n; ++t)
                        if (tup[t] > j)
                            more = Formula::conj2(std::move(more), guards[t]);
                    Formula c_cont =
                        simplify(forall_close_vars(Formula::implies(xi, more)));
                    if (!require_sat(c_cont, "cont(" + std::to_string(j) + ")")) {
                        failed = true;
                        break;
                    }
                    cs.push_back(std::move(c_cont));
                }
            }
            if (failed) {
                rollback(m);
                continue;
            }

            Formula c_ind = simplify(forall_close_vars(Formula::implies(xi, cand.inv)));
            if (!require_sat(c_ind, "ind")) {
                rollback(m);
                continue;
            }
            cs.push_back(c_ind);

            Derived rest;
            try {
                rest = genpp(advance_past_loops(),
                             simplify(Formula::conj2(cand.inv, all_exit)), ctx);
            } catch (const AnalysisFailure& e) {
                if (e.kind == "budget_exhausted") throw;
                last_fail = "suffix:" + e.kind;
                rollback(m);
                continue;
            }
            bool rest_ok = true;
            for (auto& c : rest.cs) {
                if (!require_sat(c, "suffix")) {
                    rest_ok = false;
                    break;
                }
                cs.push_back(std::move(c));
            }
            if (!rest_ok) {
                rollback(m);
                continue;
            }

            if (passed < want_skip) {
                ++passed;
                note("skip", 0, desc);
                rollback(m);
                continue;
            }

            GroupReport rep;
            rep.key = gkey;
            rep.invariant = to_string(cand.inv);
            rep.counters = tup;
            rep.skipped = passed;
            rep.tried = tried;
            group_reports_.push_back(std::move(rep));
            note("accept", 0, desc);
            rest.cs = std::move(cs);
            return rest;
        }
    }

    throw AnalysisFailure("candidates_exhausted",
                          "no loop alignment found (last failure: " + last_fail + ")",
                          my_group);
}

}  // namespace forex
