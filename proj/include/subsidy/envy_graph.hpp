#pragma once

// Envy graph over agents for a fixed allocation: positive-cycle detection,
// heaviest-path payments, envy-freeability certification, and
// welfare-maximizing rematching of the bundles.

#include "subsidy/matching.hpp"
#include "subsidy/model.hpp"
#include "subsidy/rational.hpp"

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace subsidy {

struct EnvyGraph {
    ValueMatrix w;  // w[i][k] = v_i(A_k) - v_i(A_i); diagonal 0

    int agents() const { return static_cast<int>(w.size()); }
};

struct CycleWitness {
    std::vector<int> agents;  // >= 2 distinct ids, in cycle order
    Value weight;             // > 0
};

struct HeaviestPaths {
    std::vector<Value> ell;  // ell[i] = max weight of a path starting at i

    Value max_ell() const {
        Value mx = 0;
        for (const Value& x : ell) mx = max(mx, x);
        return mx;
    }
};

inline EnvyGraph build_envy_graph(const Instance& inst, const Allocation& alloc) {
    if (alloc.agents() != inst.n || !alloc.is_partition(inst.m))
        throw std::invalid_argument("build_envy_graph: allocation is not a partition");
    std::vector<Value> own(inst.n);
    for (int i = 0; i < inst.n; ++i) own[i] = bundle_value(inst, i, alloc.bundles[i]);
    EnvyGraph g;
    g.w.assign(inst.n, std::vector<Value>(inst.n, Value(0)));
    for (int i = 0; i < inst.n; ++i)
        for (int k = 0; k < inst.n; ++k)
            if (i != k) g.w[i][k] = bundle_value(inst, i, alloc.bundles[k]) - own[i];
    return g;
}

namespace detail {

// Bellman-Ford style longest-path relaxation on the complete digraph.
// When no positive cycle exists the labels are the heaviest-path weights;
// an improving pass after n-1 rounds certifies a positive cycle, recovered
// by predecessor walking.
struct Relaxation {
    std::vector<Value> label;
    std::optional<CycleWitness> cycle;
};

inline Relaxation relax(const EnvyGraph& g) {
    const int n = g.agents();
    Relaxation out;
    out.label.assign(n, Value(0));
    std::vector<int> pred(n, -1);

    auto pass = [&]() {
        bool improved = false;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
                if (i == k) continue;
                Value cand = g.w[i][k] + out.label[k];
                if (out.label[i] < cand) {
                    out.label[i] = cand;
                    pred[i] = k;
                    improved = true;
                }
            }
        }
        return improved;
    };

    for (int round = 0; round + 1 < n; ++round)
        if (!pass()) return out;

    // extra pass: any improvement means a positive cycle on the pred chain
    std::vector<Value> before = out.label;
    if (!pass()) return out;
    int start = -1;
    for (int i = 0; i < n && start < 0; ++i)
        if (before[i] < out.label[i]) start = i;

    // walk n steps to land inside the cycle, then collect it
    int u = start;
    for (int step = 0; step < n; ++step) u = pred[u];
    std::vector<int> cyc;
    std::vector<char> seen(n, 0);
    int x = u;
    while (!seen[x]) {
        seen[x] = 1;
        cyc.push_back(x);
        x = pred[x];
    }
    // pred points along the heaviest path, so cyc is in arc order reversed;
    // reverse to list the cycle following arc direction i -> pred(i)... the
    // arcs used are (cyc[t], cyc[t+1]) already.
    Value weight = 0;
    for (size_t t = 0; t < cyc.size(); ++t)
        weight += g.w[cyc[t]][cyc[(t + 1) % cyc.size()]];
    out.cycle = CycleWitness{std::move(cyc), weight};
    return out;
}

}  // namespace detail

inline std::optional<CycleWitness> find_positive_cycle(const EnvyGraph& g) {
    return detail::relax(g).cycle;
}

/// Heaviest-path labels; throws (carrying the witness) on a positive cycle.
struct NotEnvyFreeable : std::runtime_error {
    CycleWitness witness;
    explicit NotEnvyFreeable(CycleWitness w)
        : std::runtime_error("allocation is not envy-freeable"), witness(std::move(w)) {}
};

inline HeaviestPaths heaviest_paths(const EnvyGraph& g) {
    detail::Relaxation r = detail::relax(g);
    if (r.cycle) throw NotEnvyFreeable(*r.cycle);
    return HeaviestPaths{std::move(r.label)};
}

struct EnvyFreeableCertificate {
    bool envy_freeable = false;
    std::optional<HeaviestPaths> payments_witness;  // set when envy-freeable
    std::optional<CycleWitness> cycle_witness;      // set otherwise
};

inline EnvyFreeableCertificate is_envy_freeable(const Instance& inst, const Allocation& alloc) {
    detail::Relaxation r = detail::relax(build_envy_graph(inst, alloc));
    EnvyFreeableCertificate cert;
    if (r.cycle) {
        cert.envy_freeable = false;
        cert.cycle_witness = std::move(r.cycle);
    } else {
        cert.envy_freeable = true;
        cert.payments_witness = HeaviestPaths{std::move(r.label)};
    }
    return cert;
}

/// p_i = heaviest-path weight from i; the pointwise-minimal envy-eliminating
/// payments for an envy-freeable allocation. Throws NotEnvyFreeable otherwise.
inline PaymentVector minimal_payments(const Instance& inst, const Allocation& alloc) {
    HeaviestPaths hp = heaviest_paths(build_envy_graph(inst, alloc));
    return PaymentVector{std::move(hp.ell)};
}

struct RematchResult {
    Allocation allocation;
    std::vector<int> permutation;  // permutation[i] = index of the original bundle agent i gets
    Value welfare;
};

/// Keeps the bundle set fixed and reassigns bundles to agents by
/// maximum-weight matching; the result is always envy-freeable.
inline RematchResult rematch_bundles(const Instance& inst, const Allocation& alloc) {
    if (alloc.agents() != inst.n || !alloc.is_partition(inst.m))
        throw std::invalid_argument("rematch_bundles: allocation is not a partition");
    WeightTable table;
    table.weights.assign(inst.n, std::vector<Value>(inst.n, Value(0)));
    for (int i = 0; i < inst.n; ++i)
        for (int b = 0; b < inst.n; ++b)
            table.weights[i][b] = bundle_value(inst, i, alloc.bundles[b]);
    Matching m = max_weight_matching(table);
    RematchResult out;
    out.permutation = m.assignment;
    out.welfare = m.total_weight;
    out.allocation.bundles.resize(inst.n);
    for (int i = 0; i < inst.n; ++i) out.allocation.bundles[i] = alloc.bundles[m.assignment[i]];
    return out;
}

}  // namespace subsidy
