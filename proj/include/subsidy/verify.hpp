#pragma once

// Independent checkers for every guarantee, plus a deliberately naive
// brute-force oracle over all n^m ordered partitions of tiny instances.

#include "subsidy/envy_graph.hpp"
#include "subsidy/model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace subsidy {

struct PairViolation {
    int i = 0;
    int k = 0;
};

struct CheckResult {
    bool ok = true;
    std::optional<PairViolation> violation;  // first (i,k) in lexicographic order
};

/// v_i(A_i) + p_i >= v_i(A_k) + p_k for every ordered pair.
inline CheckResult check_envy_free(const Instance& inst, const Allocation& alloc,
                                   const PaymentVector& payments) {
    if (alloc.agents() != inst.n || static_cast<int>(payments.payments.size()) != inst.n)
        throw std::invalid_argument("check_envy_free: dimension mismatch");
    std::vector<Value> own(inst.n);
    for (int i = 0; i < inst.n; ++i) own[i] = bundle_value(inst, i, alloc.bundles[i]);
    for (int i = 0; i < inst.n; ++i)
        for (int k = 0; k < inst.n; ++k) {
            if (i == k) continue;
            if (own[i] + payments.payments[i] <
                bundle_value(inst, i, alloc.bundles[k]) + payments.payments[k])
                return CheckResult{false, PairViolation{i, k}};
        }
    return CheckResult{};
}

/// EF1: for every envied pair, either A_k is empty or removing some single
/// item from A_k eliminates the envy.
inline CheckResult check_ef1(const Instance& inst, const Allocation& alloc) {
    if (alloc.agents() != inst.n)
        throw std::invalid_argument("check_ef1: dimension mismatch");
    std::vector<Value> own(inst.n);
    for (int i = 0; i < inst.n; ++i) own[i] = bundle_value(inst, i, alloc.bundles[i]);
    for (int i = 0; i < inst.n; ++i) {
        for (int k = 0; k < inst.n; ++k) {
            if (i == k || alloc.bundles[k].empty()) continue;
            bool fine = false;
            for (size_t drop = 0; drop < alloc.bundles[k].size() && !fine; ++drop) {
                Bundle reduced;
                reduced.reserve(alloc.bundles[k].size() - 1);
                for (size_t t = 0; t < alloc.bundles[k].size(); ++t)
                    if (t != drop) reduced.push_back(alloc.bundles[k][t]);
                fine = bundle_value(inst, i, reduced) <= own[i];
            }
            if (!fine) return CheckResult{false, PairViolation{i, k}};
        }
    }
    return CheckResult{};
}

/// Every bundle has size floor(m/n) or ceil(m/n).
inline bool check_balanced(const Allocation& alloc) {
    const int n = alloc.agents();
    if (n == 0) return true;
    int m = 0;
    for (const Bundle& b : alloc.bundles) m += static_cast<int>(b.size());
    const int lo = m / n;
    const int hi = (m + n - 1) / n;
    for (const Bundle& b : alloc.bundles) {
        const int s = static_cast<int>(b.size());
        if (s != lo && s != hi) return false;
    }
    return true;
}

struct OracleCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BruteForceResult {
    Value optimal_total_subsidy;
    Allocation optimal_allocation;
    uint64_t enumerated = 0;
    uint64_t envy_freeable_count = 0;
    bool cross_checked = false;  // condition (b) <=> (c) verified on every allocation
};

namespace detail {

inline bool welfare_maximal_over_permutations(const std::vector<std::vector<Value>>& val) {
    // val[i][k] = v_i(A_k); checks no permutation beats the identity
    const int n = static_cast<int>(val.size());
    Value identity = 0;
    for (int i = 0; i < n; ++i) identity += val[i][i];
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    do {
        Value w = 0;
        for (int i = 0; i < n; ++i) w += val[i][perm[i]];
        if (identity < w) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return true;
}

}  // namespace detail

constexpr uint64_t kDefaultOracleCap = 2'000'000;

/// Enumerates every ordered partition, testing envy-freeability by cycle
/// detection and minimizing the heaviest-path subsidy total. When
/// cross_check is set (default for n <= 4), the welfare-maximality
/// condition is verified against the cycle condition on every allocation.
inline BruteForceResult brute_force_min_subsidy(
    const Instance& inst, uint64_t cap = kDefaultOracleCap,
    std::optional<bool> cross_check = std::nullopt) {
    const int n = inst.n;
    const int m = inst.m;
    if (n < 1) throw std::invalid_argument("brute_force_min_subsidy: empty instance");

    uint64_t total = 1;
    for (int j = 0; j < m; ++j) {
        total *= static_cast<uint64_t>(n);
        if (total > cap)
            throw OracleCapExceeded("brute_force_min_subsidy: n^m exceeds cap of " +
                                     std::to_string(cap));
    }
    const bool do_cross = cross_check.value_or(n <= 4);

    BruteForceResult result;
    result.cross_checked = do_cross;

    std::vector<int> owner(m, 0);
    // val[i][k] = v_i(A_k), maintained incrementally for additive profiles
    std::vector<std::vector<Value>> val(n, std::vector<Value>(n, Value(0)));
    const ValueMatrix* add = inst.matrix();
    if (add)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) val[i][0] += (*add)[i][j];

    auto bundles_of = [&](const std::vector<int>& who) {
        Allocation a;
        a.bundles.assign(n, {});
        for (int j = 0; j < m; ++j) a.bundles[who[j]].push_back(j);
        return a;
    };
    auto refresh_generic = [&](const Allocation& a) {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) val[i][k] = bundle_value(inst, i, a.bundles[k]);
    };

    bool have_best = false;
    while (true) {
        Allocation current;  // only materialized when needed
        if (!add) {
            current = bundles_of(owner);
            refresh_generic(current);
        }

        EnvyGraph g;
        g.w.assign(n, std::vector<Value>(n, Value(0)));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (i != k) g.w[i][k] = val[i][k] - val[i][i];
        detail::Relaxation r = detail::relax(g);
        const bool freeable = !r.cycle.has_value();

        if (do_cross && freeable != detail::welfare_maximal_over_permutations(val))
            throw std::logic_error(
                "brute_force_min_subsidy: conditions (b) and (c) disagree");

        ++result.enumerated;
        if (freeable) {
            ++result.envy_freeable_count;
            Value subsidy = 0;
            for (const Value& x : r.label) subsidy += x;
            if (!have_best || subsidy < result.optimal_total_subsidy) {
                have_best = true;
                result.optimal_total_subsidy = subsidy;
                result.optimal_allocation = add ? bundles_of(owner) : current;
            }
        }

        // odometer step; incremental column updates for the additive path
        int pos = m - 1;
        while (pos >= 0 && owner[pos] == n - 1) --pos;
        if (pos < 0) break;
        if (add) {
            for (int q = pos + 1; q < m; ++q)  // rolled-over suffix returns to agent 0
                for (int i = 0; i < n; ++i) {
                    val[i][owner[q]] -= (*add)[i][q];
                    val[i][0] += (*add)[i][q];
                }
            for (int i = 0; i < n; ++i) {
                val[i][owner[pos]] -= (*add)[i][pos];
                val[i][owner[pos] + 1] += (*add)[i][pos];
            }
        }
        ++owner[pos];
        for (int q = pos + 1; q < m; ++q) owner[q] = 0;
    }

    if (!have_best)
        throw std::logic_error("brute_force_min_subsidy: no envy-freeable allocation found");
    return result;
}

}  // namespace subsidy
