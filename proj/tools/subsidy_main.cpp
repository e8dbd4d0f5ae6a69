// subsidy - envy-free allocation with bounded monetary subsidies.
//
// Subcommands: solve, solve-monotone, payments, rematch, check, oracle,
// gen, bench. Instances and results are JSON documents with exact value
// strings; see README.md for the schemas.

#include "subsidy/additive.hpp"
#include "subsidy/envy_graph.hpp"
#include "subsidy/io.hpp"
#include "subsidy/model.hpp"
#include "subsidy/monotone.hpp"
#include "subsidy/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kTheoremViolated = 1;  // always an implementation bug
constexpr int kInvalidInput = 2;
constexpr int kNotEnvyFreeable = 3;
constexpr int kUsageError = 64;
constexpr int kFileError = 66;

struct FileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw FileError("cannot read '" + path + "'");
    return ss.str();
}

void write_output(const subsidy::json& doc, const std::string& out_path) {
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw FileError("cannot open '" + out_path + "' for writing");
    out << text;
    if (!out) throw FileError("cannot write '" + out_path + "'");
}

subsidy::json parse_json(const std::string& text, const std::string& what) {
    subsidy::json doc = subsidy::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw subsidy::ParseError("malformed JSON in " + what);
    return doc;
}

subsidy::Instance load_instance(const std::string& path) {
    return subsidy::instance_from_json(parse_json(read_file(path), path));
}

int require_valid(const subsidy::Instance& inst) {
    subsidy::ValidationReport report = subsidy::validate_instance(inst);
    if (report.ok()) return kOk;
    std::cerr << "invalid instance:\n";
    for (const auto& v : report.violations) std::cerr << "  - " << v << "\n";
    return kInvalidInput;
}

subsidy::json certificates_json(const subsidy::Instance& inst, const subsidy::Allocation& alloc,
                                const subsidy::PaymentVector& payments,
                                const subsidy::Value& per_agent_bound,
                                const subsidy::Value& total_bound, bool& all_ok) {
    const bool ef = subsidy::check_envy_free(inst, alloc, payments).ok;
    const bool ef1 = subsidy::check_ef1(inst, alloc).ok;
    const bool balanced = subsidy::check_balanced(alloc);
    const bool bound_ok =
        !(per_agent_bound < payments.max_payment()) && !(total_bound < payments.total());
    subsidy::json certs;
    certs["envy_freeable"] = ef;
    certs["ef1"] = ef1;
    certs["balanced"] = balanced;
    certs["max_payment"] = payments.max_payment().render();
    certs["theorem_bound_ok"] = bound_ok;
    all_ok = ef && bound_ok;
    return certs;
}

subsidy::json cycle_to_json(const subsidy::CycleWitness& w) {
    subsidy::json cyc;
    subsidy::json agents = subsidy::json::array();
    for (int a : w.agents) agents.push_back(a + 1);
    cyc["cycle"] = std::move(agents);
    cyc["weight"] = w.weight.render();
    return cyc;
}

uint64_t oracle_cap() {
    if (const char* env = std::getenv("SUBSIDY_ORACLE_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
        std::cerr << "warning: ignoring bad SUBSIDY_ORACLE_CAP '" << env << "'\n";
    }
    return subsidy::kDefaultOracleCap;
}

struct BenchRow {
    uint64_t seed;
    int n, m;
    subsidy::Value total, max_payment;
    bool ef1, balanced;
    double runtime_ms;
};

}  // namespace

int main(int argc, char** argv) {
    using namespace subsidy;

    CLI::App app{"envy-free allocation of indivisible goods with bounded subsidies"};
    app.require_subcommand(1);

    // solve
    std::string inst_path, alloc_path, pay_path, out_path;
    auto* solve = app.add_subcommand("solve", "bounded-subsidy solver for additive instances");
    solve->add_option("instance", inst_path)->required();
    solve->add_option("--out", out_path);

    auto* solve_mono =
        app.add_subcommand("solve-monotone", "envy-cycles + rematch pipeline for monotone instances");
    std::optional<uint64_t> mono_seed;
    solve_mono->add_option("instance", inst_path)->required();
    solve_mono->add_option("--out", out_path);
    solve_mono->add_option("--source-seed", mono_seed,
                           "randomize source choice in the envy-cycles phase");

    auto* payments_cmd =
        app.add_subcommand("payments", "minimal envy-eliminating payments for a fixed allocation");
    payments_cmd->add_option("instance", inst_path)->required();
    payments_cmd->add_option("allocation", alloc_path)->required();
    payments_cmd->add_option("--out", out_path);

    auto* rematch_cmd =
        app.add_subcommand("rematch", "welfare-maximizing reassignment of the given bundles");
    rematch_cmd->add_option("instance", inst_path)->required();
    rematch_cmd->add_option("allocation", alloc_path)->required();
    rematch_cmd->add_option("--out", out_path);

    auto* check_cmd = app.add_subcommand("check", "verify an allocation + payments pair");
    std::string require = "ef,ef1,balanced";
    check_cmd->add_option("instance", inst_path)->required();
    check_cmd->add_option("allocation", alloc_path)->required();
    check_cmd->add_option("payments", pay_path)->required();
    check_cmd->add_option("--require", require, "comma-separated: ef,ef1,balanced");

    auto* oracle_cmd =
        app.add_subcommand("oracle", "brute-force minimum total subsidy (size-capped)");
    oracle_cmd->add_option("instance", inst_path)->required();
    oracle_cmd->add_option("--out", out_path);

    auto* gen_cmd = app.add_subcommand("gen", "generate a random instance");
    GenSpec spec;
    std::string kind_str = "additive";
    gen_cmd->add_option("--n", spec.n)->required();
    gen_cmd->add_option("--m", spec.m)->required();
    gen_cmd->add_option("--kind", kind_str, "additive|unit_demand|budget_additive|table");
    gen_cmd->add_option("--denom", spec.denominator, "value grid denominator");
    gen_cmd->add_option("--seed", spec.seed);
    gen_cmd->add_option("--out", out_path);

    auto* bench_cmd = app.add_subcommand("bench", "solve a batch of random instances");
    int bench_count = 100, bench_n = 5, bench_m = 10;
    long long bench_denom = 100;
    uint64_t bench_seed = 0;
    std::string bench_kind = "additive", csv_path;
    bench_cmd->add_option("--count", bench_count);
    bench_cmd->add_option("--n", bench_n, "maximum agent count (n drawn from [2, n])");
    bench_cmd->add_option("--m", bench_m, "maximum item count (m drawn from [1, m])");
    bench_cmd->add_option("--kind", bench_kind);
    bench_cmd->add_option("--denom", bench_denom);
    bench_cmd->add_option("--seed", bench_seed);
    bench_cmd->add_option("--csv", csv_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kUsageError;
    }

    try {
        if (*solve) {
            Instance inst = load_instance(inst_path);
            if (int rc = require_valid(inst)) return rc;
            if (!inst.is_additive()) {
                std::cerr << "instance is not additive; use solve-monotone\n";
                return kInvalidInput;
            }
            AdditiveSolveResult res = solve_additive(inst);
            json doc;
            doc["version"] = 1;
            doc["config"] = {{"command", "solve"}, {"instance", inst_path}};
            doc["allocation"] = allocation_to_json(res.allocation)["allocation"];
            doc["payments"] = payments_to_json(res.payments)["payments"];
            doc["total_subsidy"] = res.payments.total().render();
            bool ok = false;
            doc["certificates"] = certificates_json(inst, res.allocation, res.payments, Value(1),
                                                    Value(inst.n - 1), ok);
            doc["trace"] = trace_to_json(res.trace);
            write_output(doc, out_path);
            if (!ok) {
                std::cerr << "theorem bound violated; this is a bug\n";
                return kTheoremViolated;
            }
            return kOk;
        }

        if (*solve_mono) {
            Instance inst = load_instance(inst_path);
            if (int rc = require_valid(inst)) return rc;
            MonotoneSolveResult res = solve_monotone(inst, mono_seed);
            const Value per_agent = Value(2) * Value(inst.n - 1);
            const Value total = per_agent * Value(inst.n - 1);
            json doc;
            doc["version"] = 1;
            doc["config"] = {{"command", "solve-monotone"}, {"instance", inst_path}};
            if (mono_seed) doc["config"]["source_seed"] = *mono_seed;
            doc["allocation"] = allocation_to_json(res.allocation)["allocation"];
            doc["payments"] = payments_to_json(res.payments)["payments"];
            doc["total_subsidy"] = res.payments.total().render();
            bool ok = false;
            doc["certificates"] =
                certificates_json(inst, res.allocation, res.payments, per_agent, total, ok);
            // the EF1 certificate refers to the pre-rematch allocation here
            doc["certificates"]["ef1"] = check_ef1(inst, res.ef1_allocation).ok;
            json trace;
            trace["steps"] = envy_cycles_log_to_json(res.log);
            json perm = json::array();
            for (int b : res.permutation) perm.push_back(b + 1);
            trace["rematch_permutation"] = std::move(perm);
            doc["trace"] = std::move(trace);
            write_output(doc, out_path);
            if (!ok || !doc["certificates"]["ef1"].get<bool>()) {
                std::cerr << "theorem bound violated; this is a bug\n";
                return kTheoremViolated;
            }
            return kOk;
        }

        if (*payments_cmd) {
            Instance inst = load_instance(inst_path);
            if (int rc = require_valid(inst)) return rc;
            Allocation alloc =
                allocation_from_json(parse_json(read_file(alloc_path), alloc_path), inst.n, inst.m);
            try {
                PaymentVector p = minimal_payments(inst, alloc);
                json doc = payments_to_json(p);
                doc["total_subsidy"] = p.total().render();
                write_output(doc, out_path);
                return kOk;
            } catch (const NotEnvyFreeable& e) {
                json doc;
                doc["error"] = "allocation is not envy-freeable";
                doc["witness"] = cycle_to_json(e.witness);
                write_output(doc, out_path);
                return kNotEnvyFreeable;
            }
        }

        if (*rematch_cmd) {
            Instance inst = load_instance(inst_path);
            if (int rc = require_valid(inst)) return rc;
            Allocation alloc =
                allocation_from_json(parse_json(read_file(alloc_path), alloc_path), inst.n, inst.m);
            RematchResult res = rematch_bundles(inst, alloc);
            json doc = allocation_to_json(res.allocation);
            json perm = json::array();
            for (int b : res.permutation) perm.push_back(b + 1);
            doc["permutation"] = std::move(perm);
            doc["welfare"] = res.welfare.render();
            write_output(doc, out_path);
            return kOk;
        }

        if (*check_cmd) {
            Instance inst = load_instance(inst_path);
            if (int rc = require_valid(inst)) return rc;
            Allocation alloc =
                allocation_from_json(parse_json(read_file(alloc_path), alloc_path), inst.n, inst.m);
            if (!alloc.is_partition(inst.m)) {
                std::cerr << "allocation is not a partition of the items\n";
                return kInvalidInput;
            }
            PaymentVector p =
                payments_from_json(parse_json(read_file(pay_path), pay_path), inst.n);

            CheckResult ef = check_envy_free(inst, alloc, p);
            CheckResult ef1 = check_ef1(inst, alloc);
            const bool balanced = check_balanced(alloc);

            json doc;
            doc["envy_free"] = ef.ok;
            if (!ef.ok)
                doc["envy_free_violation"] = {{"i", ef.violation->i + 1},
                                              {"k", ef.violation->k + 1}};
            doc["ef1"] = ef1.ok;
            if (!ef1.ok)
                doc["ef1_violation"] = {{"i", ef1.violation->i + 1}, {"k", ef1.violation->k + 1}};
            doc["balanced"] = balanced;
            write_output(doc, out_path);

            bool pass = true;
            std::stringstream ss(require);
            std::string prop;
            while (std::getline(ss, prop, ',')) {
                if (prop == "ef")
                    pass = pass && ef.ok;
                else if (prop == "ef1")
                    pass = pass && ef1.ok;
                else if (prop == "balanced")
                    pass = pass && balanced;
                else {
                    std::cerr << "unknown property '" << prop << "' in --require\n";
                    return kUsageError;
                }
            }
            return pass ? kOk : kTheoremViolated;
        }

        if (*oracle_cmd) {
            Instance inst = load_instance(inst_path);
            if (int rc = require_valid(inst)) return rc;
            try {
                BruteForceResult res = brute_force_min_subsidy(inst, oracle_cap());
                json doc;
                doc["optimal_total_subsidy"] = res.optimal_total_subsidy.render();
                doc["optimal_allocation"] = allocation_to_json(res.optimal_allocation)["allocation"];
                doc["enumerated"] = res.enumerated;
                doc["envy_freeable_count"] = res.envy_freeable_count;
                doc["cross_checked"] = res.cross_checked;
                write_output(doc, out_path);
                return kOk;
            } catch (const OracleCapExceeded& e) {
                std::cerr << e.what() << "\n";
                return kInvalidInput;
            }
        }

        if (*gen_cmd) {
            spec.kind = kind_from_name(kind_str);
            Instance inst = generate_instance(spec);
            json doc = instance_to_json(inst);
            doc["config"] = {{"command", "gen"},
                             {"kind", kind_str},
                             {"denom", spec.denominator},
                             {"seed", spec.seed}};
            write_output(doc, out_path);
            return kOk;
        }

        if (*bench_cmd) {
            const ValuationKind kind = kind_from_name(bench_kind);
            if (bench_count < 1 || bench_n < 2 || bench_m < 1) {
                std::cerr << "bench: need --count >= 1, --n >= 2, --m >= 1\n";
                return kUsageError;
            }
            std::ofstream csv(csv_path, std::ios::binary);
            if (!csv) throw FileError("cannot open '" + csv_path + "' for writing");
            csv << "seed,n,m,total_subsidy,max_payment,ef1,balanced,runtime_ms\n";

            Value worst_max = 0;
            for (int idx = 0; idx < bench_count; ++idx) {
                const uint64_t seed = bench_seed + static_cast<uint64_t>(idx);
                std::mt19937_64 dims(seed);
                GenSpec s;
                s.n = 2 + static_cast<int>(dims() % static_cast<uint64_t>(bench_n - 1));
                s.m = 1 + static_cast<int>(dims() % static_cast<uint64_t>(bench_m));
                s.kind = kind;
                s.denominator = bench_denom;
                s.seed = seed ^ 0x9E3779B97F4A7C15ull;  // decorrelate from the dims stream
                Instance inst = generate_instance(s);

                const auto start = std::chrono::steady_clock::now();
                Allocation alloc;
                PaymentVector pay;
                bool ef1 = false;
                if (kind == ValuationKind::Additive) {
                    AdditiveSolveResult res = solve_additive(inst);
                    alloc = std::move(res.allocation);
                    pay = std::move(res.payments);
                    ef1 = check_ef1(inst, alloc).ok;
                } else {
                    MonotoneSolveResult res = solve_monotone(inst);
                    alloc = std::move(res.allocation);
                    pay = std::move(res.payments);
                    ef1 = check_ef1(inst, res.ef1_allocation).ok;  // pre-rematch guarantee
                }
                const double ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();

                const bool ef = check_envy_free(inst, alloc, pay).ok;
                const bool balanced = check_balanced(alloc);
                const Value per_agent_bound =
                    kind == ValuationKind::Additive ? Value(1) : Value(2) * Value(s.n - 1);
                const Value total_bound = kind == ValuationKind::Additive
                                              ? Value(s.n - 1)
                                              : Value(2) * Value(s.n - 1) * Value(s.n - 1);

                csv << seed << ',' << s.n << ',' << s.m << ',' << pay.total().render() << ','
                    << pay.max_payment().render() << ',' << (ef1 ? 1 : 0) << ','
                    << (balanced ? 1 : 0) << ',' << ms << "\n";

                worst_max = max(worst_max, pay.max_payment());
                const bool violated = !ef || !ef1 || per_agent_bound < pay.max_payment() ||
                                      total_bound < pay.total() ||
                                      (kind == ValuationKind::Additive && !balanced);
                if (violated) {
                    std::cerr << "theorem bound violated at seed " << seed << "\n";
                    return kTheoremViolated;
                }
            }
            std::cout << "bench: " << bench_count << " instances, 0 bound violations, "
                      << "max per-agent payment " << worst_max.render() << "\n";
            return kOk;
        }
    } catch (const FileError& e) {
        std::cerr << e.what() << "\n";
        return kFileError;
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kTheoremViolated;
    }

    return kUsageError;
}
