// cvarcut: CVaR-constrained portfolio optimization from the command line.
//
// Subcommands: generate (synthetic scenario CSV), optimize (one target risk,
// cutting-plane or reformulation), frontier (efficient-frontier sweep CSV),
// bench (method A vs B comparison report).
//
// Exit codes: 0 success, 2 usage error, 3 I/O error, 4 infeasible target
// risk, 5 solver failure, 6 iteration limit.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvarcut/bench.hpp"
#include "cvarcut/cutting_plane.hpp"
#include "cvarcut/frontier.hpp"
#include "cvarcut/reformulation.hpp"
#include "cvarcut/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitSolver = 5;
constexpr int kExitIterationLimit = 6;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using namespace cvarcut;

ScenarioMatrix load_scenarios_or_throw(const std::string& path) {
    try {
        return load_csv(path);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
}

// Two-column CSV instrument,value matched against the scenario header by
// name.
Vec load_named_values(const std::string& path, const std::vector<std::string>& names,
                      const std::string& what) {
    std::ifstream in(path);
    if (!in) throw IoError(what + ": cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError(what + ": '" + path + "' is empty");
    Vec values = Vec::Constant(static_cast<Index>(names.size()),
                               std::numeric_limits<double>::quiet_NaN());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw IoError(what + ": row " + std::to_string(line_no) + " is not name,value");
        }
        const std::string name = line.substr(0, comma);
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw IoError(what + ": unknown instrument '" + name + "' at row " +
                          std::to_string(line_no));
        }
        try {
            values[static_cast<Index>(it - names.begin())] = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw IoError(what + ": bad number at row " + std::to_string(line_no));
        }
    }
    for (Index i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) {
            throw IoError(what + ": no value for instrument '" +
                          names[static_cast<std::size_t>(i)] + "'");
        }
    }
    return values;
}

// Three-column CSV instrument,lower,upper matched by name.
PositionBounds load_bounds_csv(const std::string& path, const std::vector<std::string>& names) {
    std::ifstream in(path);
    if (!in) throw IoError("bounds: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("bounds: '" + path + "' is empty");
    const Index n = static_cast<Index>(names.size());
    Vec lower = Vec::Constant(n, std::numeric_limits<double>::quiet_NaN());
    Vec upper = lower;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = (c1 == std::string::npos) ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            throw IoError("bounds: row " + std::to_string(line_no) +
                          " is not instrument,lower,upper");
        }
        const std::string name = line.substr(0, c1);
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw IoError("bounds: unknown instrument '" + name + "' at row " +
                          std::to_string(line_no));
        }
        const Index i = static_cast<Index>(it - names.begin());
        try {
            lower[i] = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            upper[i] = std::stod(line.substr(c2 + 1));
        } catch (const std::exception&) {
            throw IoError("bounds: bad number at row " + std::to_string(line_no));
        }
    }
    for (Index i = 0; i < n; ++i) {
        if (std::isnan(lower[i]) || std::isnan(upper[i])) {
            throw IoError("bounds: no row for instrument '" + names[static_cast<std::size_t>(i)] +
                          "'");
        }
    }
    return PositionBounds(std::move(lower), std::move(upper));
}

void write_positions_csv(const std::string& path, const std::vector<std::string>& names,
                         const Vec& x) {
    std::ofstream out(path);
    if (!out) throw IoError("positions: cannot open '" + path + "' for writing");
    out << "instrument,position\n";
    char buf[32];
    for (Index i = 0; i < x.size(); ++i) {
        auto res = std::to_chars(buf, buf + sizeof(buf), x[i]);
        out << names[static_cast<std::size_t>(i)] << ',' << std::string(buf, res.ptr) << "\n";
    }
    if (!out) throw IoError("positions: write to '" + path + "' failed");
}

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace) {
    std::ofstream out(path);
    if (!out) throw IoError("trace: cannot open '" + path + "' for writing");
    out << "iteration,objective,achieved_risk,violation\n";
    char buf[32];
    auto fmt = [&buf](double v) {
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    };
    for (const auto& t : trace) {
        out << t.iteration << ',' << fmt(t.objective) << ',' << fmt(t.achieved_risk) << ','
            << fmt(t.violation) << "\n";
    }
}

struct SharedProblemArgs {
    std::string input;
    std::string risk_spec = "100:1";
    std::optional<double> lower_scalar;
    std::optional<double> upper_scalar;
    std::string bounds_csv;
    std::string profit_csv;

    void add_to(CLI::App& cmd) {
        cmd.add_option("-i,--input", input, "scenario CSV (header of instrument names, J rows)")
            ->required();
        cmd.add_option("--risk", risk_spec,
                       "risk metric as return_period:weight pairs, e.g. \"100:0.5,1000:0.5\"");
        auto* lo = cmd.add_option("--lower", lower_scalar, "uniform lower position bound");
        auto* hi = cmd.add_option("--upper", upper_scalar, "uniform upper position bound");
        auto* bc = cmd.add_option("--bounds", bounds_csv,
                                  "per-instrument bounds CSV: instrument,lower,upper");
        bc->excludes(lo)->excludes(hi);
        cmd.add_option("--profit", profit_csv,
                       "profit vector CSV instrument,value (default: column means)");
    }

    PositionBounds resolve_bounds(const ScenarioMatrix& Y) const {
        if (!bounds_csv.empty()) return load_bounds_csv(bounds_csv, Y.instrument_names());
        if (!lower_scalar || !upper_scalar) {
            throw CLI::ValidationError("bounds", "need --lower and --upper, or --bounds CSV");
        }
        return PositionBounds::uniform(Y.instruments(), *lower_scalar, *upper_scalar);
    }

    ProfitVector resolve_profit(const ScenarioMatrix& Y) const {
        if (profit_csv.empty()) return column_means(Y);
        return ProfitVector(load_named_values(profit_csv, Y.instrument_names(), "profit"));
    }
};

int cmd_generate(Index scenarios, Index instruments, Index factors, std::uint64_t seed,
                 const std::string& output) {
    const auto Y = generate_synthetic({scenarios, instruments, factors, seed});
    try {
        save_csv(Y, output);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    std::printf("wrote %s: %lld scenarios x %lld instruments (factors=%lld, seed=%llu)\n",
                output.c_str(), static_cast<long long>(Y.scenarios()),
                static_cast<long long>(Y.instruments()), static_cast<long long>(factors),
                static_cast<unsigned long long>(seed));
    std::printf("mean entry: %.10g\n", Y.values().mean());
    return kExitOk;
}

int cmd_optimize(const SharedProblemArgs& shared, const std::string& method_name,
                 double target_risk, double delta, long max_iterations, bool verify,
                 const std::string& output, const std::string& trace_path) {
    const auto Y = load_scenarios_or_throw(shared.input);
    const auto terms = parse_cvar_terms(shared.risk_spec);
    const auto r = risk_vector_from_terms(terms, Y.scenarios());
    const auto bounds = shared.resolve_bounds(Y);
    const auto p = shared.resolve_profit(Y);

    SolveConfig config;
    config.delta = delta;
    config.verify = verify;
    if (max_iterations > 0) config.max_iterations = max_iterations;

    OptimizationResult result;
    if (method_name == "cutting-plane") {
        result = optimize(Y, p, bounds, r, target_risk, config);
    } else {
        result = optimize_reformulated(build_reformulation(Y, p, bounds, terms, target_risk), Y, p);
    }

    if (result.termination != Termination::Converged) {
        const double d = min_achievable_risk(Y, bounds, terms);
        if (result.termination == Termination::InfeasibleTarget ||
            target_risk < d - 1e-9 * (1.0 + std::abs(d))) {
            std::fprintf(stderr,
                         "infeasible target risk %.10g: minimum achievable risk is %.10g\n",
                         target_risk, d);
            return kExitInfeasible;
        }
        if (result.termination == Termination::IterationLimit) {
            std::fprintf(stderr, "iteration limit reached after %ld rounds\n", result.iterations);
            return kExitIterationLimit;
        }
        std::fprintf(stderr, "solver failure (%s)\n", to_string(result.termination));
        return kExitSolver;
    }

    if (!output.empty()) write_positions_csv(output, Y.instrument_names(), result.x_star);
    if (!trace_path.empty()) write_trace_csv(trace_path, result.trace);

    std::printf("Method:        %s\n", result.method.c_str());
    std::printf("Target risk:   %.10g\n", target_risk);
    std::printf("Achieved risk: %.10g\n", result.achieved_risk);
    std::printf("Profit:        %.10g\n", result.profit);
    std::printf("Iterations:    %ld\n", result.iterations);
    if (result.verification.has_value()) {
        std::printf("Verification:  %s (duality gap %.3g)\n",
                    result.verification->verified ? "passed" : "FAILED",
                    result.verification->lp_report.duality_gap);
        if (!result.verification->verified) return kExitSolver;
    }
    return kExitOk;
}

int cmd_frontier(const SharedProblemArgs& shared, const std::string& method_name,
                 std::optional<double> r_lo, std::optional<double> r_hi, Index steps, double delta,
                 const std::string& output) {
    const auto Y = load_scenarios_or_throw(shared.input);
    const auto terms = parse_cvar_terms(shared.risk_spec);
    const auto r = risk_vector_from_terms(terms, Y.scenarios());
    const auto bounds = shared.resolve_bounds(Y);
    const auto p = shared.resolve_profit(Y);

    double lo_value;
    if (r_lo) {
        lo_value = *r_lo;
    } else {
        lo_value = min_achievable_risk(Y, bounds, terms);
    }
    double hi_value;
    if (r_hi) {
        hi_value = *r_hi;
    } else {
        Vec box_opt(Y.instruments());
        for (Index i = 0; i < Y.instruments(); ++i) {
            box_opt[i] = p.p[i] >= 0.0 ? bounds.upper[i] : bounds.lower[i];
        }
        hi_value = evaluate_risk(r, outcome_vector(Y, box_opt));
    }

    SolveConfig config;
    config.delta = delta;
    const Method method =
        method_name == "reformulation" ? Method::Reformulation : Method::CuttingPlane;
    const auto points = sweep(Y, p, bounds, terms, lo_value, hi_value, steps, method, config);
    write_frontier_csv(points, output);

    std::size_t solved = 0, infeasible = 0;
    for (const auto& pt : points) {
        if (pt.status == "ok") ++solved;
        if (pt.status == "infeasible") ++infeasible;
    }
    std::printf("wrote %s: %zu points (%zu solved, %zu infeasible targets)\n", output.c_str(),
                points.size(), solved, infeasible);
    return kExitOk;
}

std::vector<std::pair<Index, Index>> parse_grid(const std::string& spec) {
    std::vector<std::pair<Index, Index>> grid;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t end = spec.find(',', start);
        if (end == std::string::npos) end = spec.size();
        const std::string item = spec.substr(start, end - start);
        const auto x = item.find('x');
        if (item.empty() || x == std::string::npos) {
            throw CLI::ValidationError("--grid", "expected JxN pairs like 1000x100,10000x100");
        }
        try {
            grid.emplace_back(static_cast<Index>(std::stoll(item.substr(0, x))),
                              static_cast<Index>(std::stoll(item.substr(x + 1))));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--grid", "cannot parse '" + item + "'");
        }
        if (end == spec.size()) break;
        start = end + 1;
    }
    return grid;
}

int cmd_bench(const std::string& grid_spec, bool full, std::uint64_t seed,
              const std::string& risk_spec, double memory_budget_mb, bool parallel,
              const std::string& output) {
    BenchConfig config;
    config.terms = parse_cvar_terms(risk_spec);
    config.parallel = parallel;
    if (const char* env = std::getenv("CVARCUT_MEMORY_BUDGET_MB")) {
        memory_budget_mb = std::stod(env);
    }
    config.memory_budget_bytes = static_cast<std::uint64_t>(memory_budget_mb * 1024.0 * 1024.0);

    std::vector<std::pair<Index, Index>> grid;
    if (!grid_spec.empty()) {
        grid = parse_grid(grid_spec);
    } else if (full) {
        // The paper's full case-study grid; the largest rows only run when
        // the memory budget admits them.
        grid = {{1000, 100}, {10000, 200}, {100000, 500}, {1000000, 1000}};
    } else {
        grid = {{1000, 100}, {2000, 100}, {10000, 100}};
    }

    const auto report = run_case_study(grid, seed, config);
    if (!output.empty()) write_bench_csv(report, output);
    std::fputs(format_bench_table(report).c_str(), stdout);
    for (const auto& rec : report.records) {
        if (rec.status == "error" || rec.status == "mismatch") {
            std::fprintf(stderr, "instance (%lld, %lld) %s: %s\n",
                         static_cast<long long>(rec.scenarios),
                         static_cast<long long>(rec.instruments), rec.status.c_str(),
                         rec.note.c_str());
            return kExitSolver;
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CVaR-constrained portfolio optimization (cutting-plane and reformulation)"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic factor-model scenario CSV");
    Index g_scenarios = 1000, g_instruments = 100, g_factors = 100;
    std::uint64_t g_seed = 0;
    std::string g_output;
    gen->add_option("--scenarios,-J", g_scenarios, "number of scenarios")->required();
    gen->add_option("--instruments,-n", g_instruments, "number of instruments")->required();
    gen->add_option("--factors", g_factors, "number of latent factors")->capture_default_str();
    gen->add_option("--seed", g_seed, "generator seed")->capture_default_str();
    gen->add_option("-o,--output", g_output, "output CSV path")->required();

    // optimize
    auto* opt = app.add_subcommand("optimize", "solve one target-risk problem");
    SharedProblemArgs opt_shared;
    opt_shared.add_to(*opt);
    std::string o_method = "cutting-plane";
    double o_target = 0.0, o_delta = 1e-6;
    long o_max_iterations = 0;
    bool o_verify = false;
    std::string o_output, o_trace;
    opt->add_option("--method", o_method, "cutting-plane | reformulation")
        ->check(CLI::IsMember({"cutting-plane", "reformulation"}))
        ->capture_default_str();
    opt->add_option("--target-risk", o_target, "risk cap R")->required();
    opt->add_option("--delta", o_delta, "relative risk tolerance")->capture_default_str();
    opt->add_option("--max-iterations", o_max_iterations, "cut-round cap (0: 10n+1000)");
    opt->add_flag("--verify", o_verify, "run the dual verification after convergence");
    opt->add_option("-o,--output", o_output, "write x* as instrument,position CSV");
    opt->add_option("--trace", o_trace, "write per-iteration trace CSV");

    // frontier
    auto* fr = app.add_subcommand("frontier", "sweep a segment of the efficient frontier");
    SharedProblemArgs fr_shared;
    fr_shared.add_to(*fr);
    std::string f_method = "cutting-plane";
    std::optional<double> f_lo, f_hi;
    Index f_steps = 9;
    double f_delta = 1e-6;
    std::string f_output;
    fr->add_option("--method", f_method, "cutting-plane | reformulation")
        ->check(CLI::IsMember({"cutting-plane", "reformulation"}))
        ->capture_default_str();
    fr->add_option("--min", f_lo, "lowest target risk (default: minimum achievable)");
    fr->add_option("--max", f_hi, "highest target risk (default: box-optimum risk)");
    fr->add_option("--steps", f_steps, "number of sweep points")->capture_default_str();
    fr->add_option("--delta", f_delta, "relative risk tolerance")->capture_default_str();
    fr->add_option("-o,--output", f_output, "frontier CSV path")->required();

    // bench
    auto* be = app.add_subcommand("bench", "compare methods A and B on generated instances");
    std::string b_grid, b_risk = "100:1", b_output;
    bool b_full = false, b_parallel = false;
    std::uint64_t b_seed = 0;
    double b_budget_mb = 4096.0;
    be->add_option("--grid", b_grid, "JxN pairs, e.g. 1000x100,10000x100");
    be->add_flag("--full", b_full, "use the paper's full case-study grid (memory permitting)");
    be->add_option("--seed", b_seed, "base seed; instance k uses substream k")
        ->capture_default_str();
    be->add_option("--risk", b_risk, "risk metric spec")->capture_default_str();
    be->add_option("--memory-budget-mb", b_budget_mb,
                   "skip instances whose matrix exceeds this (env CVARCUT_MEMORY_BUDGET_MB)")
        ->capture_default_str();
    be->add_flag("--parallel", b_parallel, "run instances concurrently (timings not comparable)");
    be->add_option("-o,--output", b_output, "report CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            return cmd_generate(g_scenarios, g_instruments, g_factors, g_seed, g_output);
        }
        if (opt->parsed()) {
            return cmd_optimize(opt_shared, o_method, o_target, o_delta, o_max_iterations,
                                o_verify, o_output, o_trace);
        }
        if (fr->parsed()) {
            return cmd_frontier(fr_shared, f_method, f_lo, f_hi, f_steps, f_delta, f_output);
        }
        if (be->parsed()) {
            return cmd_bench(b_grid, b_full, b_seed, b_risk, b_budget_mb, b_parallel, b_output);
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitUsage;
    } catch (const IoError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitSolver;
    }
    return kExitUsage;
}
