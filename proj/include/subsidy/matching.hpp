#pragma once

// Exact maximum-weight bipartite matching between agents (rows) and
// candidate items or bundles (columns), k >= n. Deterministic: among all
// maximum-weight matchings the lexicographically smallest assignment
// vector is returned.
//
// Method: Jonker-Volgenant style potentials on the (shifted, non-negative)
// cost matrix give optimal duals; every optimal matching lies in the tight
// subgraph and covers every column with negative potential. The result is
// then built greedily, column by column, with unweighted feasibility checks
// in the tight subgraph.

#include "subsidy/model.hpp"
#include "subsidy/rational.hpp"

#include <stdexcept>
#include <vector>

namespace subsidy {

struct WeightTable {
    ValueMatrix weights;  // n x k

    int rows() const { return static_cast<int>(weights.size()); }
    int cols() const { return weights.empty() ? 0 : static_cast<int>(weights[0].size()); }
};

struct Matching {
    std::vector<int> assignment;  // assignment[i] = column matched to agent i
    Value total_weight;
};

namespace detail {

struct Duals {
    std::vector<Value> row;  // u, size n
    std::vector<Value> col;  // v, size k; v <= 0, and v[j] < 0 only on matched columns
};

// Min-cost rectangular assignment (n <= k) with exact potentials.
// cost must be non-negative. Returns duals with u_i + v_j <= cost(i,j),
// tight on matched edges.
inline Duals jv_assignment(const ValueMatrix& cost, std::vector<int>& rowsol) {
    const int n = static_cast<int>(cost.size());
    const int k = static_cast<int>(cost[0].size());
    std::vector<Value> u(n + 1), v(k + 1);
    std::vector<int> p(k + 1, 0), way(k + 1, 0);  // p[j] = row (1-based) matched to column j

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<Value> minv(k + 1);
        std::vector<char> have(k + 1, 0), used(k + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            Value delta;
            bool have_delta = false;
            for (int j = 1; j <= k; ++j) {
                if (used[j]) continue;
                Value cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (!have[j] || cur < minv[j]) {
                    minv[j] = cur;
                    have[j] = 1;
                    way[j] = j0;
                }
                if (!have_delta || minv[j] < delta) {
                    delta = minv[j];
                    have_delta = true;
                    j1 = j;
                }
            }
            for (int j = 0; j <= k; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else if (have[j]) {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    rowsol.assign(n, -1);
    for (int j = 1; j <= k; ++j)
        if (p[j]) rowsol[p[j] - 1] = j - 1;

    Duals d;
    d.row.assign(u.begin() + 1, u.end());
    d.col.assign(v.begin() + 1, v.end());
    return d;
}

// Kuhn augmenting-path matching restricted to tight edges, trying columns
// in ascending order.
class TightMatcher {
public:
    TightMatcher(const std::vector<std::vector<char>>& tight, int n, int k)
        : tight_(tight), n_(n), k_(k) {}

    bool saturates_rows(const std::vector<char>& row_active, const std::vector<char>& col_active) {
        std::vector<int> rm(n_, -1), cm(k_, -1);
        for (int i = 0; i < n_; ++i) {
            if (!row_active[i]) continue;
            std::vector<char> vis(k_, 0);
            if (!augment_row(i, row_active, col_active, vis, rm, cm)) return false;
        }
        return true;
    }

    // Can every active column be matched to some active row?
    bool saturates_cols(const std::vector<char>& row_active, const std::vector<char>& col_active,
                        const std::vector<char>& col_required) {
        std::vector<int> rm(n_, -1), cm(k_, -1);
        for (int j = 0; j < k_; ++j) {
            if (!col_required[j]) continue;
            std::vector<char> vis(n_, 0);
            if (!augment_col(j, row_active, col_active, col_required, vis, rm, cm)) return false;
        }
        return true;
    }

private:
    bool augment_row(int i, const std::vector<char>& ra, const std::vector<char>& ca,
                     std::vector<char>& vis, std::vector<int>& rm, std::vector<int>& cm) {
        for (int j = 0; j < k_; ++j) {
            if (!ca[j] || vis[j] || !tight_[i][j]) continue;
            vis[j] = 1;
            if (cm[j] < 0 || augment_row(cm[j], ra, ca, vis, rm, cm)) {
                cm[j] = i;
                rm[i] = j;
                return true;
            }
        }
        return false;
    }

    bool augment_col(int j, const std::vector<char>& ra, const std::vector<char>& ca,
                     const std::vector<char>& creq, std::vector<char>& vis, std::vector<int>& rm,
                     std::vector<int>& cm) {
        for (int i = 0; i < n_; ++i) {
            if (!ra[i] || vis[i] || !tight_[i][j]) continue;
            vis[i] = 1;
            if (rm[i] < 0 || augment_col(rm[i], ra, ca, creq, vis, rm, cm)) {
                rm[i] = j;
                cm[j] = i;
                return true;
            }
        }
        return false;
    }

    const std::vector<std::vector<char>>& tight_;
    int n_, k_;
};

}  // namespace detail

/// Maximum-weight agent-perfect matching; deterministic lexicographic
/// tie-break on the assignment vector.
inline Matching max_weight_matching(const WeightTable& table) {
    const int n = table.rows();
    const int k = table.cols();
    if (n == 0) return Matching{{}, Value(0)};
    if (k < n) throw std::invalid_argument("max_weight_matching: fewer columns than agents");

    // shift to non-negative min-cost: cost(i,j) = wmax - w(i,j)
    Value wmax = table.weights[0][0];
    for (const auto& row : table.weights)
        for (const Value& w : row) wmax = max(wmax, w);
    ValueMatrix cost(n, std::vector<Value>(k));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) cost[i][j] = wmax - table.weights[i][j];

    std::vector<int> rowsol;
    detail::Duals duals = detail::jv_assignment(cost, rowsol);

    // Tight subgraph: exactly the edges any optimal matching may use.
    std::vector<std::vector<char>> tight(n, std::vector<char>(k, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j)
            tight[i][j] = cost[i][j] == duals.row[i] + duals.col[j];

    // Columns with negative potential must be covered by every optimum.
    std::vector<char> required(k, 0);
    for (int j = 0; j < k; ++j) required[j] = duals.col[j] < Value(0);

    std::vector<int> assignment(n, -1);
    std::vector<char> row_active(n, 1), col_active(k, 1);

    for (int i = 0; i < n; ++i) {
        row_active[i] = 0;
        bool placed = false;
        for (int j = 0; j < k && !placed; ++j) {
            if (!col_active[j] || !tight[i][j]) continue;
            col_active[j] = 0;
            std::vector<char> creq = required;
            creq[j] = 0;
            for (int jj = 0; jj < k; ++jj)
                if (!col_active[jj]) creq[jj] = 0;
            detail::TightMatcher probe(tight, n, k);
            if (probe.saturates_rows(row_active, col_active) &&
                probe.saturates_cols(row_active, col_active, creq)) {
                assignment[i] = j;
                placed = true;
            } else {
                col_active[j] = 1;
            }
        }
        if (!placed) throw std::logic_error("max_weight_matching: internal tight-graph failure");
    }

    Value total = 0;
    for (int i = 0; i < n; ++i) total += table.weights[i][assignment[i]];
    return Matching{std::move(assignment), total};
}

}  // namespace subsidy
