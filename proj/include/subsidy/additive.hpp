#pragma once

// Round-based bounded-subsidy solver for additive valuations. Each round
// matches every agent to one remaining item by maximum-weight matching;
// the final round is padded with zero-value dummy items. The resulting
// allocation is envy-freeable, EF1, balanced, and its heaviest-path
// payments are at most one dollar per agent.
//
// The modified-profile machinery turns the one-dollar proof into a runtime
// certificate; it is diagnostic only and never changes solver output.

#include "subsidy/envy_graph.hpp"
#include "subsidy/matching.hpp"
#include "subsidy/model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace subsidy {

constexpr int kDummyItem = -1;

struct RoundTrace {
    // matched[t][i] = item matched to agent i in round t, or kDummyItem.
    std::vector<std::vector<int>> matched;

    int rounds() const { return static_cast<int>(matched.size()); }
};

struct AdditiveSolveResult {
    Allocation allocation;
    PaymentVector payments;
    RoundTrace trace;
};

inline AdditiveSolveResult solve_additive(const Instance& inst) {
    const ValueMatrix* vm = inst.matrix();
    if (!vm)
        throw std::invalid_argument(
            "solve_additive: instance is not additive; use solve_monotone");
    const int n = inst.n;

    AdditiveSolveResult out;
    out.allocation.bundles.assign(n, {});

    std::vector<int> remaining(inst.m);
    for (int j = 0; j < inst.m; ++j) remaining[j] = j;

    while (!remaining.empty()) {
        const int real = static_cast<int>(remaining.size());
        const int cols = std::max(real, n);  // pad the last round with dummies
        WeightTable table;
        table.weights.assign(n, std::vector<Value>(cols, Value(0)));
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < real; ++c) table.weights[i][c] = (*vm)[i][remaining[c]];

        Matching match = max_weight_matching(table);

        std::vector<int> round(n, kDummyItem);
        std::vector<char> taken(real, 0);
        for (int i = 0; i < n; ++i) {
            const int c = match.assignment[i];
            if (c < real) {
                round[i] = remaining[c];
                taken[c] = 1;
                out.allocation.bundles[i].push_back(remaining[c]);
            }
        }
        out.trace.matched.push_back(std::move(round));

        std::vector<int> next;
        for (int c = 0; c < real; ++c)
            if (!taken[c]) next.push_back(remaining[c]);
        remaining = std::move(next);
    }

    for (Bundle& b : out.allocation.bundles) std::sort(b.begin(), b.end());
    out.payments = minimal_payments(inst, out.allocation);
    return out;
}

struct ModifiedProfile {
    ValueMatrix matrix;  // v-bar, n x m
};

/// Own items keep their value; another agent's round-t item is raised to
/// the value of one's own round-(t+1) item when that is larger; final-round
/// items are unchanged. Dummy items count as zero value.
inline ModifiedProfile build_modified_profile(const Instance& inst, const RoundTrace& trace) {
    const ValueMatrix* vm = inst.matrix();
    if (!vm) throw std::invalid_argument("build_modified_profile: instance is not additive");
    const int n = inst.n;
    const int T = trace.rounds();

    std::vector<int> item_round(inst.m, -1);
    std::vector<int> item_owner(inst.m, -1);
    for (int t = 0; t < T; ++t) {
        if (static_cast<int>(trace.matched[t].size()) != n)
            throw std::invalid_argument("build_modified_profile: trace width mismatch");
        for (int i = 0; i < n; ++i) {
            const int j = trace.matched[t][i];
            if (j == kDummyItem) continue;
            if (j < 0 || j >= inst.m || item_round[j] != -1)
                throw std::invalid_argument("build_modified_profile: malformed trace");
            item_round[j] = t;
            item_owner[j] = i;
        }
    }
    for (int j = 0; j < inst.m; ++j)
        if (item_round[j] == -1)
            throw std::invalid_argument("build_modified_profile: item missing from trace");

    ModifiedProfile mp;
    mp.matrix = *vm;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < inst.m; ++j) {
            const int t = item_round[j];
            if (item_owner[j] == i || t == T - 1) continue;
            const int own_next = trace.matched[t + 1][i];
            const Value next_value = own_next == kDummyItem ? Value(0) : (*vm)[i][own_next];
            mp.matrix[i][j] = max(mp.matrix[i][j], next_value);
        }
    }
    return mp;
}

struct OneDollarCertificate {
    bool modified_envy_freeable = false;  // no positive cycle under v-bar
    bool arcs_at_least_minus_one = false;  // every v-bar arc weight >= -1
    bool arcs_dominate_original = false;   // v-bar arc weight >= v arc weight
    bool max_ell_at_most_one = false;      // max ell(v) <= max ell(v-bar) <= 1
    std::string violation;                 // first failed inequality, with witness arc

    bool all_ok() const {
        return modified_envy_freeable && arcs_at_least_minus_one && arcs_dominate_original &&
               max_ell_at_most_one;
    }
};

/// Checks the inequality chain behind the one-dollar bound on a concrete
/// solver run. Every check holds for every correct run; a failure indicates
/// an implementation bug.
inline OneDollarCertificate certify_one_dollar(const Instance& inst, const Allocation& alloc,
                                               const RoundTrace& trace) {
    OneDollarCertificate cert;
    ModifiedProfile mp = build_modified_profile(inst, trace);
    Instance modified = inst;
    modified.valuation = AdditiveValuation{mp.matrix};

    EnvyGraph original = build_envy_graph(inst, alloc);
    EnvyGraph bar = build_envy_graph(modified, alloc);
    const int n = inst.n;

    auto arc_name = [](int i, int k) {
        return "arc (" + std::to_string(i) + "," + std::to_string(k) + ")";
    };

    cert.arcs_at_least_minus_one = true;
    cert.arcs_dominate_original = true;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            if (i == k) continue;
            if (bar.w[i][k] < Value(-1) && cert.arcs_at_least_minus_one) {
                cert.arcs_at_least_minus_one = false;
                if (cert.violation.empty())
                    cert.violation = "modified arc weight below -1 at " + arc_name(i, k);
            }
            if (bar.w[i][k] < original.w[i][k] && cert.arcs_dominate_original) {
                cert.arcs_dominate_original = false;
                if (cert.violation.empty())
                    cert.violation = "modified arc weight below original at " + arc_name(i, k);
            }
        }
    }

    auto bar_relax = detail::relax(bar);
    if (bar_relax.cycle) {
        cert.modified_envy_freeable = false;
        if (cert.violation.empty())
            cert.violation = "positive cycle in modified envy graph through agent " +
                             std::to_string(bar_relax.cycle->agents.front());
    } else {
        cert.modified_envy_freeable = true;
        auto orig_relax = detail::relax(original);
        if (!orig_relax.cycle) {
            Value max_orig = 0, max_bar = 0;
            for (const Value& x : orig_relax.label) max_orig = max(max_orig, x);
            for (const Value& x : bar_relax.label) max_bar = max(max_bar, x);
            cert.max_ell_at_most_one = max_orig <= max_bar && max_bar <= Value(1);
            if (!cert.max_ell_at_most_one && cert.violation.empty())
                cert.violation = "heaviest-path bound violated: max ell(v)=" + max_orig.render() +
                                 ", max ell(v-bar)=" + max_bar.render();
        } else if (cert.violation.empty()) {
            cert.violation = "original envy graph has a positive cycle";
        }
    }
    return cert;
}

}  // namespace subsidy
