// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Bounded-enumeration interpreter oracle. Everything here decides questions
// about a *bounded* semantics: nondeterministic assignments draw from
// [-d, d], every execution path may take at most S statement steps, and
// quantifiers in formulas are evaluated over a bounded domain. Within those
// bounds the answers are exact; paths cut off by the step bound taint the
// verdict to Unknown instead of silently disappearing.
//
// This module is independent of the symbolic engines on purpose: it is the
// ground truth the engines are tested against.

#include "feht.hpp"
#include "simplify.hpp"

#include <functional>
#include <sstream>

namespace forex {

struct ExecResult {
    std::vector<State> finals;    // deduplicated, in increasing state order
    bool bound_exceeded = false;  // some path was cut before terminating
};

// Enumerates all executions of p from sigma. Havoc branches over [-d, d];
// each primitive statement and each evaluated guard costs one step out of S.
inline ExecResult exec_all(const Stmt& p, const State& sigma, long long d, long long S) {
    struct Config {
        std::vector<Stmt> cont;  // continuation stack, top at back
        State st;
        long long budget;
    };
    ExecResult out;
    std::set<State> finals;
    std::vector<Config> work;
    work.push_back(Config{{p}, sigma, S});
    while (!work.empty()) {
        Config c = std::move(work.back());
        work.pop_back();
        if (c.cont.empty()) {
            finals.insert(std::move(c.st));
            continue;
        }
        Stmt s = std::move(c.cont.back());
        c.cont.pop_back();
        if (s.kind() == Stmt::Kind::Seq) {  // structural, costs nothing
            c.cont.push_back(s.second());
            c.cont.push_back(s.first());
            work.push_back(std::move(c));
            continue;
        }
        if (c.budget <= 0) {
            out.bound_exceeded = true;
            continue;
        }
        c.budget -= 1;
        switch (s.kind()) {
        case Stmt::Kind::Skip:
            work.push_back(std::move(c));
            break;
        case Stmt::Kind::Assign:
            c.st[s.var()] = eval_arith(s.expr(), c.st);
            work.push_back(std::move(c));
            break;
        case Stmt::Kind::Havoc:
            for (long long z = -d; z <= d; ++z) {
                Config branch = c;
                branch.st[s.var()] = z;
                work.push_back(std::move(branch));
            }
            break;
        case Stmt::Kind::Assume:
            if (eval_bool(s.cond(), c.st)) work.push_back(std::move(c));
            // A failing assume silently drops the path: not a truncation.
            break;
        case Stmt::Kind::If:
            c.cont.push_back(eval_bool(s.cond(), c.st) ? s.then_branch() : s.else_branch());
            work.push_back(std::move(c));
            break;
        case Stmt::Kind::While:
            if (eval_bool(s.cond(), c.st)) {
                c.cont.push_back(s);
                c.cont.push_back(s.body());
            }
            work.push_back(std::move(c));
            break;
        case Stmt::Kind::Seq:
            break;  // handled above
        }
    }
    out.finals.assign(finals.begin(), finals.end());
    return out;
}

// ---------------------------------------------------------------------------
// State box enumeration.

inline State project(const State& st, const std::set<VarName>& vars) {
    State out;
    for (const auto& v : vars) {
        auto it = st.find(v);
        if (it != st.end()) out.emplace(v, it->second);
    }
    return out;
}

// Calls fn for every assignment of [-d, d] values to vars, merged on top of
// base. fn returning false stops the enumeration early.
inline bool for_each_state(const std::vector<VarName>& vars, long long d, const State& base,
                           const std::function<bool(const State&)>& fn) {
    State st = base;
    for (const auto& v : vars) st[v] = -d;
    if (vars.empty()) return fn(st);
    std::vector<long long> idx(vars.size(), 0);
    const long long width = 2 * d + 1;
    for (;;) {
        if (!fn(st)) return false;
        size_t i = 0;
        for (; i < vars.size(); ++i) {
            if (++idx[i] < width) {
                st[vars[i]] = idx[i] - d;
                break;
            }
            idx[i] = 0;
            st[vars[i]] = -d;
        }
        if (i == vars.size()) return true;
    }
}

enum class OracleVerdict { Valid, Invalid, Unknown };

inline const char* to_text(OracleVerdict v) {
    switch (v) {
    case OracleVerdict::Valid: return "valid";
    case OracleVerdict::Invalid: return "invalid";
    case OracleVerdict::Unknown: return "unknown";
    }
    return "?";
}

struct OracleOutcome {
    OracleVerdict verdict = OracleVerdict::Unknown;
    std::string detail;
};

namespace detail {

inline std::string show_state(const State& st) {
    std::string s = "{";
    bool first = true;
    for (const auto& [v, z] : st) {
        s += (first ? "" : ", ") + v.str() + "=" + z.str();
        first = false;
    }
    return s + "}";
}

// Per-copy execution cache: exec_all is pure, and the oracle revisits the
// same (copy, initial sub-state) pairs many times.
struct ExecCache {
    struct Entry {
        ExecResult result;
        std::set<State> final_set;
    };
    std::map<std::pair<int, State>, Entry> entries;

    const Entry& get(int copy, const Stmt& body, const State& sub, long long d, long long S) {
        auto key = std::make_pair(copy, sub);
        auto it = entries.find(key);
        if (it != entries.end()) return it->second;
        Entry e;
        e.result = exec_all(body, sub, d, S);
        e.final_set.insert(e.result.finals.begin(), e.result.finals.end());
        return entries.emplace(std::move(key), std::move(e)).first->second;
    }
};

// Enumerates the product of per-copy final-state lists, merging each choice
// into one relational state. fn returning false stops early.
inline bool for_each_product(const std::vector<const std::vector<State>*>& parts, State acc,
                             size_t i, const std::function<bool(const State&)>& fn) {
    if (i == parts.size()) return fn(acc);
    for (const auto& st : *parts[i]) {
        State merged = acc;
        for (const auto& [v, z] : st) merged[v] = z;
        if (!for_each_product(parts, std::move(merged), i + 1, fn)) return false;
    }
    return true;
}

// Which initial values can influence an execution: `reads` collects variables
// a run may read before writing them, `writes` collects variables written on
// every path. Anything neither read early nor surviving unwritten into a
// final state can be pinned instead of enumerated.
struct ReadWrite {
    std::set<VarName> reads, writes;
};

inline ReadWrite reads_writes(const Stmt& s) {
    switch (s.kind()) {
    case Stmt::Kind::Skip: return {};
    case Stmt::Kind::Assign: {
        ReadWrite rw;
        collect_vars(s.expr(), rw.reads);
        rw.writes.insert(s.var());
        return rw;
    }
    case Stmt::Kind::Havoc: {
        ReadWrite rw;
        rw.writes.insert(s.var());
        return rw;
    }
    case Stmt::Kind::Assume: {
        ReadWrite rw;
        collect_vars(s.cond(), rw.reads);
        return rw;
    }
    case Stmt::Kind::Seq: {
        ReadWrite a = reads_writes(s.first());
        ReadWrite b = reads_writes(s.second());
        for (const auto& v : b.reads)
            if (!a.writes.count(v)) a.reads.insert(v);
        a.writes.insert(b.writes.begin(), b.writes.end());
        return a;
    }
    case Stmt::Kind::If: {
        ReadWrite a = reads_writes(s.then_branch());
        ReadWrite b = reads_writes(s.else_branch());
        ReadWrite rw;
        collect_vars(s.cond(), rw.reads);
        rw.reads.insert(a.reads.begin(), a.reads.end());
        rw.reads.insert(b.reads.begin(), b.reads.end());
        for (const auto& v : a.writes)
            if (b.writes.count(v)) rw.writes.insert(v);
        return rw;
    }
    case Stmt::Kind::While: {
        // The loop may run zero times, so nothing is definitely written.
        ReadWrite body = reads_writes(s.body());
        ReadWrite rw;
        collect_vars(s.cond(), rw.reads);
        rw.reads.insert(body.reads.begin(), body.reads.end());
        return rw;
    }
    }
    return {};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bounded validity of a forall-exists Hoare tuple (the defining quantifier
// structure, checked by enumeration).

inline OracleOutcome feht_check_bounded(const Feht& f, long long d, long long S,
                                        long long quant_radius = 0) {
    if (quant_radius <= 0) quant_radius = 4 * d;
    std::vector<std::set<VarName>> vars_by_copy;
    std::vector<VarName> all;
    State base;
    for (const auto& p : f.programs) {
        vars_by_copy.push_back(f.copy_vars(p.copy));
        for (const auto& v : vars_by_copy.back()) base[v] = 0;
        // Enumerate only initial values that can matter: variables the copy
        // may read before writing, variables the pre constrains, and
        // variables the post can still see unwritten. The rest stay pinned.
        detail::ReadWrite rw = detail::reads_writes(p.remaining);
        std::set<VarName> rel = rw.reads;
        for (const auto& v : free_vars(f.pre))
            if (v.copy == p.copy) rel.insert(v);
        for (const auto& v : free_vars(f.post))
            if (v.copy == p.copy && !rw.writes.count(v)) rel.insert(v);
        for (const auto& v : rel)
            if (vars_by_copy.back().count(v)) all.push_back(v);
    }
    detail::ExecCache cache;
    bool saw_unknown = false;
    OracleOutcome out;
    out.verdict = OracleVerdict::Valid;

    bool completed = for_each_state(all, d, base, [&](const State& init) {
        if (!eval(f.pre, init, quant_radius)) return true;
        // Resolve each copy's executions from its slice of the initial state.
        std::vector<const detail::ExecCache::Entry*> runs;
        bool univ_taint = false, exist_taint = false;
        for (size_t i = 0; i < f.programs.size(); ++i) {
            const auto& p = f.programs[i];
            // Witness executions may need nondeterministic values outside the
            // universal state box, so existential copies draw from the wider
            // quantifier radius.
            long long hd = p.quant == Quant::Exists ? quant_radius : d;
            const auto& e =
                cache.get(p.copy, p.remaining, project(init, vars_by_copy[i]), hd, S);
            runs.push_back(&e);
            if (e.result.bound_exceeded)
                (p.quant == Quant::Forall ? univ_taint : exist_taint) = true;
        }
        std::vector<const std::vector<State>*> univ_parts, exist_parts;
        for (size_t i = 0; i < f.programs.size(); ++i)
            (f.programs[i].quant == Quant::Forall ? univ_parts : exist_parts)
                .push_back(&runs[i]->result.finals);
        if (univ_taint) saw_unknown = true;

        return detail::for_each_product(univ_parts, State{}, 0, [&](const State& u) {
            bool witnessed = !detail::for_each_product(exist_parts, u, 0, [&](const State& full) {
                return !eval(f.post, full, quant_radius);  // stop when post holds
            });
            if (witnessed) return true;
            if (exist_taint) {
                saw_unknown = true;
                return true;
            }
            out.verdict = OracleVerdict::Invalid;
            out.detail = "no existential witness from initial " + detail::show_state(init) +
                         " with universal finals " + detail::show_state(u);
            return false;
        });
    });

    if (out.verdict == OracleVerdict::Invalid) return out;
    (void)completed;
    if (saw_unknown) {
        out.verdict = OracleVerdict::Unknown;
        out.detail = "step bound exceeded on some path";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bounded check that (xi, c) is a parametric postcondition for the given
// precondition and program copies. For every admissible universal initial
// slice, every tuple of universal final states, and every parameter
// evaluation kappa satisfying c: (1) some assignment to the existential
// coordinates satisfies xi[kappa], and (2) every assignment satisfying
// xi[kappa] is genuinely reachable, i.e. each existential slice is a final
// state of its copy from some initial tuple satisfying pre. The initial
// tuple in (2) is re-chosen in full: derived formulas quantify initial
// values away, so they promise reachability from the admissible initials
// as a set, not from each one separately. Holding any part of the tuple
// fixed would reject even exact postconditions whenever a copy leaves a
// variable untouched or the precondition couples copies.

inline OracleOutcome check_parametric_postcondition(const Formula& pre,
                                                    const std::vector<QuantifiedProgram>& programs,
                                                    const Formula& xi, const Formula& c,
                                                    long long d, long long S,
                                                    long long quant_radius = 0,
                                                    long long init_radius = 0) {
    if (quant_radius <= 0) quant_radius = 4 * d;
    // Scanned states near the box edge may only be reachable from initial
    // states or nondet draws slightly outside it (a shifting program maps
    // -r-1 onto -r). Callers can widen the initial box independently.
    if (init_radius < quant_radius) init_radius = quant_radius;

    std::vector<std::set<VarName>> vars_by_copy;
    std::vector<VarName> univ_enum, exist_enum, exist_scan;
    std::vector<size_t> exist_idx;
    std::set<VarName> pre_univ;  // universal-side variables pre constrains
    State base;
    for (size_t i = 0; i < programs.size(); ++i) {
        const auto& p = programs[i];
        std::set<VarName> vs = vars_of(p.remaining);
        for (const auto& f : {std::cref(pre), std::cref(xi)})
            for (const auto& v : free_vars(f.get()))
                if (v.copy == p.copy) vs.insert(v);
        vars_by_copy.push_back(vs);
        for (const auto& v : vs) base[v] = 0;

        detail::ReadWrite rw = detail::reads_writes(p.remaining);
        std::set<VarName> rel = rw.reads;
        for (const auto& v : free_vars(pre))
            if (v.copy == p.copy) rel.insert(v);
        if (p.quant == Quant::Forall) {
            // Unwritten variables survive into the final states xi talks
            // about, so their initial values need enumerating too.
            for (const auto& v : free_vars(xi))
                if (v.copy == p.copy && !rw.writes.count(v)) rel.insert(v);
            for (const auto& v : free_vars(pre))
                if (v.copy == p.copy) pre_univ.insert(v);
            for (const auto& v : rel)
                if (vs.count(v)) univ_enum.push_back(v);
        } else {
            for (const auto& v : vs)
                if (!rw.writes.count(v)) rel.insert(v);
            for (const auto& v : rel)
                if (vs.count(v)) exist_enum.push_back(v);
            for (const auto& v : vs) exist_scan.push_back(v);
            exist_idx.push_back(i);
        }
    }

    std::set<Param> params = free_params(xi);
    for (const auto& p : free_params(c)) params.insert(p);

    // Admissible parameter evaluations (kappa over the [-d, d] box) and the
    // instantiated function formula for each.
    struct KappaInfo {
        ParamEval kappa;
        Formula xik;
    };
    std::vector<KappaInfo> kappas;
    {
        std::vector<Param> plist(params.begin(), params.end());
        std::vector<long long> idx(plist.size(), 0);
        const long long width = 2 * d + 1;
        for (;;) {
            ParamEval kappa;
            for (size_t i = 0; i < plist.size(); ++i) kappa.values[plist[i].id] = idx[i] - d;
            if (eval(normalize_for_eval(instantiate_params(c, kappa)), State{}, quant_radius))
                kappas.push_back(
                    KappaInfo{kappa, normalize_for_eval(instantiate_params(xi, kappa))});
            size_t i = 0;
            for (; i < plist.size(); ++i) {
                if (++idx[i] < width) break;
                idx[i] = 0;
            }
            if (i == plist.size() || plist.empty()) break;
        }
    }

    detail::ExecCache cache;
    bool saw_unknown = false;
    OracleOutcome out;
    out.verdict = OracleVerdict::Valid;

    // Reachable final states of each existential copy, over all initial
    // tuples pre admits. Universal-side initials join the enumeration only
    // through the variables pre couples to the rest of the tuple; everything
    // ranges over the widened initial box so that preserved or shifted
    // variables can match any scanned coordinate value.
    struct Reach {
        std::vector<std::set<State>> finals;
        std::vector<bool> taint;
    };
    Reach reach;
    reach.finals.resize(programs.size());
    reach.taint.assign(programs.size(), false);
    if (!exist_idx.empty()) {
        std::vector<VarName> init_vars(pre_univ.begin(), pre_univ.end());
        init_vars.insert(init_vars.end(), exist_enum.begin(), exist_enum.end());
        for_each_state(init_vars, init_radius, base, [&](const State& st) {
            if (!eval(pre, st, quant_radius)) return true;
            for (size_t i : exist_idx) {
                const auto& e = cache.get(programs[i].copy, programs[i].remaining,
                                          project(st, vars_by_copy[i]), init_radius, S);
                if (e.result.bound_exceeded) reach.taint[i] = true;
                reach.finals[i].insert(e.result.finals.begin(), e.result.finals.end());
            }
            return true;
        });
    }

    // Whether some assignment to the existential initials completes this
    // universal slice into a pre-state. Inadmissible slices impose nothing.
    std::map<State, bool> adm_memo;
    auto admissible = [&](const State& univ) -> bool {
        State key = project(univ, pre_univ);
        auto it = adm_memo.find(key);
        if (it != adm_memo.end()) return it->second;
        State ebase = base;
        for (const auto& [v, z] : key) ebase[v] = z;
        bool found = !for_each_state(exist_enum, init_radius, ebase, [&](const State& st) {
            return !eval(pre, st, quant_radius);  // stop at the first pre-state
        });
        return adm_memo.emplace(std::move(key), found).first->second;
    };

    for_each_state(univ_enum, d, base, [&](const State& univ) {
        if (!admissible(univ)) return true;  // pre rules out every completion
        std::vector<const std::vector<State>*> univ_parts;
        for (size_t i = 0; i < programs.size(); ++i) {
            if (programs[i].quant != Quant::Forall) continue;
            const auto& e = cache.get(programs[i].copy, programs[i].remaining,
                                      project(univ, vars_by_copy[i]), d, S);
            if (e.result.bound_exceeded) saw_unknown = true;
            univ_parts.push_back(&e.result.finals);
        }
        // Merging finals over the initial slice keeps unwritten universal
        // variables at their initial values in the scanned state.
        return detail::for_each_product(univ_parts, univ, 0, [&](const State& u) {
            for (const auto& ki : kappas) {
                bool found = false, ok = true;
                std::string why;
                for_each_state(exist_scan, quant_radius, u, [&](const State& full) {
                    if (!eval(ki.xik, full, quant_radius)) return true;
                    found = true;
                    for (size_t i : exist_idx) {
                        State sub = project(full, vars_by_copy[i]);
                        if (!reach.finals[i].count(sub)) {
                            if (reach.taint[i]) {
                                saw_unknown = true;
                                continue;
                            }
                            ok = false;
                            why = "condition 2 fails: state " + detail::show_state(sub) +
                                  " satisfies the function formula but is unreachable in copy " +
                                  std::to_string(programs[i].copy);
                            return false;
                        }
                    }
                    return true;
                });
                if (ok && !found) {
                    ok = false;
                    why = "condition 1 fails: no state satisfying the function formula with "
                          "universal finals " +
                          detail::show_state(project(u, [&] {
                              std::set<VarName> uv;
                              for (size_t i = 0; i < programs.size(); ++i)
                                  if (programs[i].quant == Quant::Forall)
                                      uv.insert(vars_by_copy[i].begin(), vars_by_copy[i].end());
                              return uv;
                          }())) +
                          ", parameters " + detail::show_state([&] {
                              State s;
                              for (const auto& [id, z] : ki.kappa.values)
                                  s[VarName{"mu", id}] = z;
                              return s;
                          }());
                }
                if (!ok) {
                    out.verdict = OracleVerdict::Invalid;
                    out.detail = std::move(why);
                    return false;
                }
            }
            return true;
        });
    });

    if (out.verdict == OracleVerdict::Invalid) return out;
    if (saw_unknown) {
        out.verdict = OracleVerdict::Unknown;
        out.detail = "step bound exceeded on some path";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bounded check of a universal-existential Hoare triple for one program:
// from every bounded initial state satisfying pre, some execution terminates
// in a state satisfying post.

inline OracleOutcome uht_check_bounded(const Formula& pre, const Stmt& p, const Formula& post,
                                       long long d, long long S, long long quant_radius = 0) {
    if (quant_radius <= 0) quant_radius = 4 * d;
    std::set<VarName> vars = vars_of(p);
    for (const auto& f : {std::cref(pre), std::cref(post)})
        for (const auto& v : free_vars(f.get())) vars.insert(v);
    State base;
    for (const auto& v : vars) base[v] = 0;
    detail::ReadWrite rw = detail::reads_writes(p);
    std::set<VarName> rel = rw.reads;
    for (const auto& v : free_vars(pre)) rel.insert(v);
    for (const auto& v : free_vars(post))
        if (!rw.writes.count(v)) rel.insert(v);
    std::vector<VarName> all(rel.begin(), rel.end());

    bool saw_unknown = false;
    OracleOutcome out;
    out.verdict = OracleVerdict::Valid;
    for_each_state(all, d, base, [&](const State& init) {
        if (!eval(pre, init, quant_radius)) return true;
        ExecResult r = exec_all(p, init, d, S);
        for (const auto& fin : r.finals)
            if (eval(post, fin, quant_radius)) return true;
        if (r.bound_exceeded) {
            saw_unknown = true;
            return true;
        }
        out.verdict = OracleVerdict::Invalid;
        out.detail = "no terminating execution satisfies post from " + detail::show_state(init);
        return false;
    });
    if (out.verdict == OracleVerdict::Invalid) return out;
    if (saw_unknown) {
        out.verdict = OracleVerdict::Unknown;
        out.detail = "step bound exceeded on some path";
    }
    return out;
}

}  // namespace forex
