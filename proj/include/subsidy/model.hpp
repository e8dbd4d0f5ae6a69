#pragma once

// Domain model: agents, items, valuation profiles, allocations, payments.
// Items are 0-based indices 0..m-1 internally; file formats use 1-based ids.

#include "subsidy/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

namespace subsidy {

using Bundle = std::vector<int>;  // sorted, distinct item ids

using ValueMatrix = std::vector<std::vector<Value>>;  // n rows, m columns

/// v_i(S) = sum of entries.
struct AdditiveValuation {
    ValueMatrix matrix;
};

/// v_i(S) = max entry (0 for the empty bundle).
struct UnitDemandValuation {
    ValueMatrix matrix;
};

/// v_i(S) = min(cap_i, sum of entries).
struct BudgetAdditiveValuation {
    ValueMatrix matrix;
    std::vector<Value> caps;
};

/// Explicit subset table, one value per subset per agent, indexed by item
/// bitmask. Only sensible for small m (capped at 20).
struct TableValuation {
    int n = 0;
    int m = 0;
    std::vector<std::vector<Value>> values;  // values[i][mask], size 1<<m

    static constexpr int kMaxItems = 20;
};

using MonotoneValuation =
    std::variant<AdditiveValuation, UnitDemandValuation, BudgetAdditiveValuation, TableValuation>;

struct Instance {
    int n = 0;
    int m = 0;
    MonotoneValuation valuation;
    std::vector<std::string> agent_labels;  // optional, empty when unused
    std::vector<std::string> item_labels;

    bool is_additive() const { return std::holds_alternative<AdditiveValuation>(valuation); }

    const ValueMatrix* matrix() const {
        if (auto* a = std::get_if<AdditiveValuation>(&valuation)) return &a->matrix;
        return nullptr;
    }
};

struct Allocation {
    std::vector<Bundle> bundles;

    int agents() const { return static_cast<int>(bundles.size()); }

    /// Partition check against item universe {0..m-1}.
    bool is_partition(int m) const {
        std::vector<int> seen(m, 0);
        for (const Bundle& b : bundles)
            for (int j : b) {
                if (j < 0 || j >= m || seen[j]) return false;
                seen[j] = 1;
            }
        return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
    }

    bool balanced() const {
        if (bundles.empty()) return true;
        size_t lo = bundles[0].size(), hi = lo;
        for (const Bundle& b : bundles) {
            lo = std::min(lo, b.size());
            hi = std::max(hi, b.size());
        }
        return hi - lo <= 1;
    }
};

struct PaymentVector {
    std::vector<Value> payments;

    Value total() const {
        Value t = 0;
        for (const Value& p : payments) t += p;
        return t;
    }
    Value max_payment() const {
        Value mx = 0;
        for (const Value& p : payments) mx = max(mx, p);
        return mx;
    }
};

namespace detail {

inline uint32_t bundle_mask(const Bundle& bundle) {
    uint32_t mask = 0;
    for (int j : bundle) mask |= 1u << j;
    return mask;
}

}  // namespace detail

/// Exact bundle value v_i(S) under any valuation variant.
inline Value bundle_value(const Instance& inst, int agent, const Bundle& bundle) {
    if (agent < 0 || agent >= inst.n) throw std::out_of_range("bundle_value: bad agent id");
    for (int j : bundle)
        if (j < 0 || j >= inst.m) throw std::out_of_range("bundle_value: bad item id");

    struct Visitor {
        int agent;
        const Bundle& bundle;

        Value operator()(const AdditiveValuation& v) const {
            Value s = 0;
            for (int j : bundle) s += v.matrix[agent][j];
            return s;
        }
        Value operator()(const UnitDemandValuation& v) const {
            Value mx = 0;
            for (int j : bundle) mx = max(mx, v.matrix[agent][j]);
            return mx;
        }
        Value operator()(const BudgetAdditiveValuation& v) const {
            Value s = 0;
            for (int j : bundle) s += v.matrix[agent][j];
            return min(s, v.caps[agent]);
        }
        Value operator()(const TableValuation& v) const {
            return v.values[agent][detail::bundle_mask(bundle)];
        }
    };
    return std::visit(Visitor{agent, bundle}, inst.valuation);
}

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Report-only check of the scaling and monotonicity assumptions. Matrix
/// variants need entries in [0,1]; tables are checked exhaustively.
inline ValidationReport validate_instance(const Instance& inst) {
    ValidationReport report;
    auto complain = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    if (inst.n < 1) complain("agent count must be at least 1");
    if (inst.m < 0) complain("item count must be non-negative");

    auto check_matrix = [&](const ValueMatrix& mat, const char* what) {
        if (static_cast<int>(mat.size()) != inst.n) {
            complain(std::string(what) + ": row count does not match n");
            return;
        }
        for (int i = 0; i < inst.n; ++i) {
            if (static_cast<int>(mat[i].size()) != inst.m) {
                complain(std::string(what) + ": column count does not match m in row " +
                         std::to_string(i));
                continue;
            }
            for (int j = 0; j < inst.m; ++j) {
                if (mat[i][j] < Value(0))
                    complain("negative value at agent " + std::to_string(i) + ", item " +
                             std::to_string(j));
                if (Value(1) < mat[i][j])
                    complain("value exceeds 1 at agent " + std::to_string(i) + ", item " +
                             std::to_string(j));
            }
        }
    };

    if (auto* a = std::get_if<AdditiveValuation>(&inst.valuation)) {
        check_matrix(a->matrix, "additive matrix");
    } else if (auto* u = std::get_if<UnitDemandValuation>(&inst.valuation)) {
        check_matrix(u->matrix, "unit-demand matrix");
    } else if (auto* b = std::get_if<BudgetAdditiveValuation>(&inst.valuation)) {
        check_matrix(b->matrix, "budget-additive matrix");
        if (static_cast<int>(b->caps.size()) != inst.n)
            complain("budget-additive caps: size does not match n");
        else
            for (int i = 0; i < inst.n; ++i)
                if (b->caps[i] < Value(0))
                    complain("negative cap for agent " + std::to_string(i));
    } else if (auto* t = std::get_if<TableValuation>(&inst.valuation)) {
        if (inst.m > TableValuation::kMaxItems) {
            complain("table valuation: m exceeds " + std::to_string(TableValuation::kMaxItems));
            return report;
        }
        if (t->n != inst.n || t->m != inst.m) complain("table valuation: dimension mismatch");
        const size_t want = size_t{1} << inst.m;
        if (static_cast<int>(t->values.size()) != inst.n) {
            complain("table valuation: agent count mismatch");
            return report;
        }
        for (int i = 0; i < inst.n; ++i) {
            if (t->values[i].size() != want) {
                complain("table valuation: agent " + std::to_string(i) + " has wrong subset count");
                continue;
            }
            const auto& vals = t->values[i];
            if (!vals[0].is_zero())
                complain("v(empty set) != 0 for agent " + std::to_string(i));
            // monotone + unit marginal, checked over every (S, S + item j) pair
            for (uint32_t mask = 0; mask < want; ++mask) {
                for (int j = 0; j < inst.m; ++j) {
                    if (mask & (1u << j)) continue;
                    const uint32_t bigger = mask | (1u << j);
                    Value marginal = vals[bigger] - vals[mask];
                    if (marginal < Value(0))
                        complain("monotonicity violated at (S=" + std::to_string(mask) +
                                 ", T=" + std::to_string(bigger) + ") for agent " +
                                 std::to_string(i));
                    else if (Value(1) < marginal)
                        complain("marginal value exceeds 1 at (S=" + std::to_string(mask) +
                                 ", item " + std::to_string(j) + ") for agent " +
                                 std::to_string(i));
                }
            }
        }
    }
    return report;
}

}  // namespace subsidy
