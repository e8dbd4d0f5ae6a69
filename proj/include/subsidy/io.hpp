#pragma once

// Instance/result documents (JSON with exact decimal or p/q value strings),
// the random instance generator, and CSV helpers for the bench command.
// Item and agent ids are 1-based in files, 0-based in memory.

#include "subsidy/additive.hpp"
#include "subsidy/model.hpp"
#include "subsidy/monotone.hpp"

#include <json.hpp>

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace subsidy {

using json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ValuationKind { Additive, UnitDemand, BudgetAdditive, Table };

inline std::string kind_name(ValuationKind k) {
    switch (k) {
        case ValuationKind::Additive: return "additive";
        case ValuationKind::UnitDemand: return "unit_demand";
        case ValuationKind::BudgetAdditive: return "budget_additive";
        case ValuationKind::Table: return "table";
    }
    throw std::logic_error("kind_name: bad kind");
}

inline ValuationKind kind_from_name(const std::string& s) {
    if (s == "additive") return ValuationKind::Additive;
    if (s == "unit_demand") return ValuationKind::UnitDemand;
    if (s == "budget_additive") return ValuationKind::BudgetAdditive;
    if (s == "table") return ValuationKind::Table;
    throw ParseError("unknown valuation kind '" + s + "'");
}

namespace detail {

inline Value value_from_json(const json& j) {
    if (!j.is_string()) throw ParseError("values must be strings, got " + j.dump());
    auto v = Value::parse(j.get<std::string>());
    if (!v) throw ParseError("cannot parse value '" + j.get<std::string>() + "'");
    return *v;
}

inline ValueMatrix matrix_from_json(const json& j, int n, int m) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ParseError("matrix must have n rows");
    ValueMatrix mat(n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != m)
            throw ParseError("matrix row " + std::to_string(i) + " must have m entries");
        mat[i].reserve(m);
        for (int c = 0; c < m; ++c) mat[i].push_back(value_from_json(j[i][c]));
    }
    return mat;
}

inline json matrix_to_json(const ValueMatrix& mat) {
    json rows = json::array();
    for (const auto& row : mat) {
        json r = json::array();
        for (const Value& v : row) r.push_back(v.render());
        rows.push_back(std::move(r));
    }
    return rows;
}

// subset key: sorted 1-based item ids joined by ','; "" is the empty set
inline std::string subset_key(uint32_t mask, int m) {
    std::string key;
    for (int j = 0; j < m; ++j) {
        if (!(mask & (1u << j))) continue;
        if (!key.empty()) key += ',';
        key += std::to_string(j + 1);
    }
    return key;
}

inline uint32_t subset_mask(const std::string& key, int m) {
    uint32_t mask = 0;
    std::stringstream ss(key);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        int id = 0;
        try {
            id = std::stoi(tok);
        } catch (const std::exception&) {
            throw ParseError("bad item id '" + tok + "' in subset key");
        }
        if (id < 1 || id > m) throw ParseError("item id out of range in subset key '" + key + "'");
        if (mask & (1u << (id - 1))) throw ParseError("duplicate item in subset key '" + key + "'");
        mask |= 1u << (id - 1);
    }
    return mask;
}

}  // namespace detail

inline json instance_to_json(const Instance& inst) {
    json doc;
    doc["version"] = 1;
    doc["n"] = inst.n;
    doc["m"] = inst.m;
    json val;
    if (auto* a = std::get_if<AdditiveValuation>(&inst.valuation)) {
        val["kind"] = "additive";
        val["matrix"] = detail::matrix_to_json(a->matrix);
    } else if (auto* u = std::get_if<UnitDemandValuation>(&inst.valuation)) {
        val["kind"] = "unit_demand";
        val["matrix"] = detail::matrix_to_json(u->matrix);
    } else if (auto* b = std::get_if<BudgetAdditiveValuation>(&inst.valuation)) {
        val["kind"] = "budget_additive";
        val["matrix"] = detail::matrix_to_json(b->matrix);
        json caps = json::array();
        for (const Value& c : b->caps) caps.push_back(c.render());
        val["cap"] = std::move(caps);
    } else if (auto* t = std::get_if<TableValuation>(&inst.valuation)) {
        val["kind"] = "table";
        json subsets = json::array();
        for (int i = 0; i < t->n; ++i) {
            json per_agent;
            for (uint32_t mask = 0; mask < (1u << t->m); ++mask)
                per_agent[detail::subset_key(mask, t->m)] = t->values[i][mask].render();
            subsets.push_back(std::move(per_agent));
        }
        val["subsets"] = std::move(subsets);
    }
    doc["valuation"] = std::move(val);
    if (!inst.agent_labels.empty() || !inst.item_labels.empty()) {
        json labels;
        if (!inst.agent_labels.empty()) labels["agents"] = inst.agent_labels;
        if (!inst.item_labels.empty()) labels["items"] = inst.item_labels;
        doc["labels"] = std::move(labels);
    }
    return doc;
}

inline Instance instance_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("instance document must be an object");
    Instance inst;
    inst.n = doc.value("n", -1);
    inst.m = doc.value("m", -1);
    if (inst.n < 1 || inst.m < 0) throw ParseError("bad n or m");
    if (!doc.contains("valuation")) throw ParseError("missing 'valuation'");
    const json& val = doc["valuation"];
    const ValuationKind kind = kind_from_name(val.value("kind", ""));

    switch (kind) {
        case ValuationKind::Additive:
            inst.valuation = AdditiveValuation{detail::matrix_from_json(val.at("matrix"), inst.n, inst.m)};
            break;
        case ValuationKind::UnitDemand:
            inst.valuation =
                UnitDemandValuation{detail::matrix_from_json(val.at("matrix"), inst.n, inst.m)};
            break;
        case ValuationKind::BudgetAdditive: {
            BudgetAdditiveValuation b;
            b.matrix = detail::matrix_from_json(val.at("matrix"), inst.n, inst.m);
            if (!val.contains("cap") || static_cast<int>(val["cap"].size()) != inst.n)
                throw ParseError("budget_additive needs n caps");
            for (const auto& c : val["cap"]) b.caps.push_back(detail::value_from_json(c));
            inst.valuation = std::move(b);
            break;
        }
        case ValuationKind::Table: {
            if (inst.m > TableValuation::kMaxItems)
                throw ParseError("table valuation limited to m <= 20");
            TableValuation t;
            t.n = inst.n;
            t.m = inst.m;
            const json& subsets = val.at("subsets");
            if (static_cast<int>(subsets.size()) != inst.n)
                throw ParseError("table needs one subset map per agent");
            t.values.assign(inst.n, std::vector<Value>(size_t{1} << inst.m, Value(0)));
            for (int i = 0; i < inst.n; ++i) {
                std::vector<char> seen(size_t{1} << inst.m, 0);
                for (auto it = subsets[i].begin(); it != subsets[i].end(); ++it) {
                    const uint32_t mask = detail::subset_mask(it.key(), inst.m);
                    t.values[i][mask] = detail::value_from_json(it.value());
                    seen[mask] = 1;
                }
                for (size_t mask = 0; mask < seen.size(); ++mask)
                    if (!seen[mask])
                        throw ParseError("agent " + std::to_string(i + 1) +
                                         " is missing subset '" +
                                         detail::subset_key(static_cast<uint32_t>(mask), inst.m) +
                                         "'");
            }
            inst.valuation = std::move(t);
            break;
        }
    }

    if (doc.contains("labels")) {
        const json& labels = doc["labels"];
        if (labels.contains("agents"))
            inst.agent_labels = labels["agents"].get<std::vector<std::string>>();
        if (labels.contains("items"))
            inst.item_labels = labels["items"].get<std::vector<std::string>>();
    }
    return inst;
}

inline json allocation_to_json(const Allocation& alloc) {
    json bundles = json::array();
    for (const Bundle& b : alloc.bundles) {
        json ids = json::array();
        for (int j : b) ids.push_back(j + 1);
        bundles.push_back(std::move(ids));
    }
    json doc;
    doc["allocation"] = std::move(bundles);
    return doc;
}

inline Allocation allocation_from_json(const json& doc, int n, int m) {
    const json& arr = doc.is_array() ? doc : doc.at("allocation");
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
        throw ParseError("allocation must list one bundle per agent");
    Allocation a;
    for (const auto& ids : arr) {
        Bundle b;
        for (const auto& id : ids) {
            const int j = id.get<int>();
            if (j < 1 || j > m) throw ParseError("item id out of range in allocation");
            b.push_back(j - 1);
        }
        std::sort(b.begin(), b.end());
        a.bundles.push_back(std::move(b));
    }
    return a;
}

inline json payments_to_json(const PaymentVector& p) {
    json doc;
    json arr = json::array();
    for (const Value& v : p.payments) arr.push_back(v.render());
    doc["payments"] = std::move(arr);
    return doc;
}

inline PaymentVector payments_from_json(const json& doc, int n) {
    const json& arr = doc.is_array() ? doc : doc.at("payments");
    if (!arr.is_array() || static_cast<int>(arr.size()) != n)
        throw ParseError("payments must list one value per agent");
    PaymentVector p;
    for (const auto& v : arr) p.payments.push_back(detail::value_from_json(v));
    return p;
}

inline json trace_to_json(const RoundTrace& trace) {
    json rounds = json::array();
    for (const auto& round : trace.matched) {
        json r = json::array();
        for (int j : round)
            if (j == kDummyItem)
                r.push_back(nullptr);
            else
                r.push_back(j + 1);
        rounds.push_back(std::move(r));
    }
    json doc;
    doc["rounds"] = std::move(rounds);
    return doc;
}

inline json envy_cycles_log_to_json(const EnvyCyclesLog& log) {
    json steps = json::array();
    for (const auto& round : log) {
        json step;
        step["item"] = round.item + 1;
        step["agent"] = round.agent + 1;
        json rotations = json::array();
        for (const auto& rot : round.rotations) {
            json r;
            json cyc = json::array();
            for (int a : rot.cycle) cyc.push_back(a + 1);
            r["cycle"] = std::move(cyc);
            r["arcs_before"] = rot.arcs_before;
            r["arcs_after"] = rot.arcs_after;
            rotations.push_back(std::move(r));
        }
        step["rotations"] = std::move(rotations);
        steps.push_back(std::move(step));
    }
    return steps;
}

// ---------------------------------------------------------------------------
// Random instance generation. Deterministic for a fixed spec: all draws come
// from one mt19937_64 stream via modulo reduction, never from
// std::uniform_int_distribution (whose mapping varies across libraries).

struct GenSpec {
    int n = 2;
    int m = 1;
    ValuationKind kind = ValuationKind::Additive;
    long long denominator = 100;  // values drawn from {0, 1/d, ..., 1}
    uint64_t seed = 0;
};

inline Instance generate_instance(const GenSpec& spec) {
    if (spec.n < 1 || spec.m < 0 || spec.denominator < 1)
        throw std::invalid_argument("generate_instance: bad spec");
    if (spec.kind == ValuationKind::Table && spec.m > TableValuation::kMaxItems)
        throw std::invalid_argument("generate_instance: table kind limited to m <= 20");

    std::mt19937_64 rng(spec.seed);
    const long long d = spec.denominator;
    auto grid = [&](long long steps) {  // uniform on {0, 1/d, ..., steps/d}
        return Value(static_cast<long long>(rng() % static_cast<uint64_t>(steps + 1)), d);
    };

    Instance inst;
    inst.n = spec.n;
    inst.m = spec.m;

    auto random_matrix = [&]() {
        ValueMatrix mat(spec.n, std::vector<Value>(spec.m, Value(0)));
        for (int i = 0; i < spec.n; ++i)
            for (int j = 0; j < spec.m; ++j) mat[i][j] = grid(d);
        return mat;
    };

    switch (spec.kind) {
        case ValuationKind::Additive:
            inst.valuation = AdditiveValuation{random_matrix()};
            break;
        case ValuationKind::UnitDemand:
            inst.valuation = UnitDemandValuation{random_matrix()};
            break;
        case ValuationKind::BudgetAdditive: {
            BudgetAdditiveValuation b;
            b.matrix = random_matrix();
            for (int i = 0; i < spec.n; ++i)
                b.caps.push_back(grid(d) * Value(std::max(inst.m, 1)));
            inst.valuation = std::move(b);
            break;
        }
        case ValuationKind::Table: {
            TableValuation t;
            t.n = spec.n;
            t.m = spec.m;
            const size_t count = size_t{1} << spec.m;
            t.values.assign(spec.n, std::vector<Value>(count, Value(0)));
            for (int i = 0; i < spec.n; ++i) {
                for (uint32_t mask = 1; mask < count; ++mask) {
                    Value lo, hi;
                    bool first = true;
                    for (int j = 0; j < spec.m; ++j) {
                        if (!(mask & (1u << j))) continue;
                        const Value& sub = t.values[i][mask & ~(1u << j)];
                        if (first) {
                            lo = hi = sub;
                            first = false;
                        } else {
                            lo = min(lo, sub);
                            hi = max(hi, sub);
                        }
                    }
                    // any delta <= 1 - (hi - lo) keeps every marginal in [0, 1]
                    const Value headroom = Value(1) - (hi - lo);
                    using boost::multiprecision::cpp_int;
                    cpp_int steps =
                        numerator(headroom.raw()) * d / denominator(headroom.raw());
                    long long cap = steps < 0 ? 0 : static_cast<long long>(steps);
                    t.values[i][mask] = hi + grid(cap);
                }
            }
            inst.valuation = std::move(t);
            break;
        }
    }
    return inst;
}

}  // namespace subsidy
