#pragma once

// Envy-cycles allocation for monotone valuations, then bundle rematching
// and heaviest-path payments. Per-agent subsidy is at most 2(n-1).

#include "subsidy/envy_graph.hpp"
#include "subsidy/model.hpp"

#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace subsidy {

struct CycleRotation {
    std::vector<int> cycle;  // agents in arc order; each takes its successor's bundle
    int arcs_before = 0;
    int arcs_after = 0;
};

struct EnvyCyclesRound {
    int item = 0;
    int agent = 0;  // chosen source vertex
    std::vector<CycleRotation> rotations;
};

using EnvyCyclesLog = std::vector<EnvyCyclesRound>;

namespace detail {

// Positive-envy arcs for the current (partial) bundles.
inline std::vector<std::vector<char>> auxiliary_graph(const Instance& inst,
                                                      const std::vector<Bundle>& bundles) {
    const int n = inst.n;
    std::vector<Value> own(n);
    for (int i = 0; i < n; ++i) own[i] = bundle_value(inst, i, bundles[i]);
    std::vector<std::vector<char>> h(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (i != k && own[i] < bundle_value(inst, i, bundles[k])) h[i][k] = 1;
    return h;
}

inline int arc_count(const std::vector<std::vector<char>>& h) {
    int c = 0;
    for (const auto& row : h)
        for (char a : row) c += a;
    return c;
}

// First directed cycle by DFS from the smallest vertex; empty if acyclic.
inline std::vector<int> find_cycle(const std::vector<std::vector<char>>& h) {
    const int n = static_cast<int>(h.size());
    std::vector<int> color(n, 0), stack;
    std::vector<int> result;

    auto dfs = [&](auto&& self, int u) -> bool {
        color[u] = 1;
        stack.push_back(u);
        for (int v = 0; v < n; ++v) {
            if (!h[u][v]) continue;
            if (color[v] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                result.assign(it, stack.end());
                return true;
            }
            if (color[v] == 0 && self(self, v)) return true;
        }
        color[u] = 2;
        stack.pop_back();
        return false;
    };

    for (int s = 0; s < n; ++s)
        if (color[s] == 0 && dfs(dfs, s)) return result;
    return {};
}

}  // namespace detail

struct EnvyCyclesResult {
    Allocation allocation;
    EnvyCyclesLog log;
};

/// Allocates items in ascending index order, each to a source vertex of the
/// auxiliary graph, rotating bundles around positive-envy cycles until the
/// graph is acyclic again. Output is EF1. With a seed, the source is chosen
/// uniformly at random among sources instead of by smallest index.
inline EnvyCyclesResult envy_cycles_allocate(const Instance& inst,
                                             std::optional<uint64_t> seed = std::nullopt) {
    const int n = inst.n;
    std::vector<Bundle> bundles(n);
    EnvyCyclesLog log;
    std::mt19937_64 rng(seed.value_or(0));

    for (int item = 0; item < inst.m; ++item) {
        auto h = detail::auxiliary_graph(inst, bundles);
        if (!detail::find_cycle(h).empty())
            throw std::logic_error("envy_cycles_allocate: auxiliary graph cyclic at round start");

        std::vector<int> sources;
        for (int i = 0; i < n; ++i) {
            bool has_incoming = false;
            for (int k = 0; k < n && !has_incoming; ++k) has_incoming = h[k][i];
            if (!has_incoming) sources.push_back(i);
        }
        // a DAG always has a source
        int chosen = sources[seed ? rng() % sources.size() : 0];

        bundles[chosen].push_back(item);
        std::sort(bundles[chosen].begin(), bundles[chosen].end());

        EnvyCyclesRound round{item, chosen, {}};
        h = detail::auxiliary_graph(inst, bundles);
        for (std::vector<int> cycle = detail::find_cycle(h); !cycle.empty();
             cycle = detail::find_cycle(h)) {
            const int before = detail::arc_count(h);
            // each agent on the cycle takes the bundle of the agent it envies
            std::vector<Bundle> old = bundles;
            const int r = static_cast<int>(cycle.size());
            for (int t = 0; t < r; ++t) bundles[cycle[t]] = old[cycle[(t + 1) % r]];
            h = detail::auxiliary_graph(inst, bundles);
            const int after = detail::arc_count(h);
            if (after >= before)
                throw std::logic_error("envy_cycles_allocate: rotation did not reduce arc count");
            round.rotations.push_back({std::move(cycle), before, after});
        }
        log.push_back(std::move(round));
    }

    return EnvyCyclesResult{Allocation{std::move(bundles)}, std::move(log)};
}

struct MonotoneSolveResult {
    Allocation ef1_allocation;  // output of the envy-cycles phase
    EnvyCyclesLog log;
    std::vector<int> permutation;  // bundle reassignment from the rematch
    Allocation allocation;         // final, envy-freeable
    PaymentVector payments;
    Value rematch_decrease;  // total value lost by agents the rematch hurt
    Value rematch_increase;  // total value gained by the others
};

inline MonotoneSolveResult solve_monotone(const Instance& inst,
                                          std::optional<uint64_t> seed = std::nullopt) {
    MonotoneSolveResult out;
    EnvyCyclesResult ec = envy_cycles_allocate(inst, seed);
    out.ef1_allocation = ec.allocation;
    out.log = std::move(ec.log);

    RematchResult rm = rematch_bundles(inst, ec.allocation);
    out.permutation = rm.permutation;
    out.allocation = std::move(rm.allocation);

    out.rematch_decrease = 0;
    out.rematch_increase = 0;
    for (int i = 0; i < inst.n; ++i) {
        Value before = bundle_value(inst, i, out.ef1_allocation.bundles[i]);
        Value after = bundle_value(inst, i, out.allocation.bundles[i]);
        if (after < before)
            out.rematch_decrease += before - after;
        else
            out.rematch_increase += after - before;
    }
    if (out.rematch_increase < out.rematch_decrease)
        throw std::logic_error("solve_monotone: rematch lowered total welfare");

    out.payments = minimal_payments(inst, out.allocation);
    return out;
}

}  // namespace subsidy
