// forex-lite: automated verification of forall-exists program properties.
// Copyright 2026 The forex-lite Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// A forall-exists Hoare tuple: k universally and l existentially quantified
// program copies, a relational precondition and postcondition, and optional
// user hints for the loop alignment search.

#include "formula.hpp"

namespace forex {

struct Hints {
    std::vector<Formula> invariants;   // candidate loop invariants, tried in order
    std::vector<long> counters;        // per-copy iteration counts; empty if none
    std::optional<int> unroll;         // upper bound for generated counter tuples

    bool any() const { return !invariants.empty() || !counters.empty() || unroll.has_value(); }
};

struct Feht {
    // Copies 1..k are universal, k+1..k+l existential, in that order.
    std::vector<QuantifiedProgram> programs;
    Formula pre = Formula::tt();
    Formula post = Formula::tt();
    Hints hints;
    int k = 0;
    int l = 0;

    const QuantifiedProgram& program(int copy) const { return programs.at(size_t(copy) - 1); }

    // Variables of one copy: everything its program touches plus any
    // variables of that copy mentioned in the pre, post, or hints (ghost
    // inputs are allowed and simply never written).
    std::set<VarName> copy_vars(int copy) const {
        std::set<VarName> out;
        for (const auto& p : programs)
            if (p.copy == copy) collect_vars(p.remaining, out);
        auto take = [&](const Formula& f) {
            for (const auto& v : free_vars(f))
                if (v.copy == copy) out.insert(v);
        };
        take(pre);
        take(post);
        for (const auto& h : hints.invariants) take(h);
        return out;
    }

    std::set<VarName> all_vars() const {
        std::set<VarName> out;
        for (const auto& p : programs) {
            auto v = copy_vars(p.copy);
            out.insert(v.begin(), v.end());
        }
        return out;
    }
};

}  // namespace forex
