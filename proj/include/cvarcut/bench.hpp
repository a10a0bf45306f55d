#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cvarcut/frontier.hpp"
#include "cvarcut/reformulation.hpp"

namespace cvarcut {

struct BenchConfig {
    std::vector<CvarTerm> terms{{100, 1.0}};
    double lower = 0.5;
    double upper = 1.5;
    Index num_factors = 100;
    double delta = 1e-6;
    // Instances whose scenario matrix alone exceeds this are skipped with a
    // note rather than attempted.
    std::uint64_t memory_budget_bytes = 4ull << 30;
    // Parallel instances disturb each other's clocks; timings are marked
    // non-comparable when enabled.
    bool parallel = false;
};

struct BenchRecord {
    Index scenarios = 0;
    Index instruments = 0;
    Method method = Method::CuttingPlane;
    Index variables = 0;
    Index rows = 0;
    long iterations = 0;
    double wall_time_s = 0.0;
    double objective = 0.0;
    double achieved_risk = 0.0;
    double target_risk = 0.0;
    std::string status = "ok";
    std::string note;
};

struct BenchReport {
    std::vector<BenchRecord> records;
    std::string backend_policy;
    unsigned thread_count = 1;
    bool timings_comparable = true;

    // Run time of method A divided by method B for one grid cell.
    double speedup(Index J, Index n) const {
        double a = 0.0, b = 0.0;
        for (const auto& rec : records) {
            if (rec.scenarios != J || rec.instruments != n || rec.status != "ok") continue;
            if (rec.method == Method::Reformulation) a = rec.wall_time_s;
            if (rec.method == Method::CuttingPlane) b = rec.wall_time_s;
        }
        return (a > 0.0 && b > 0.0) ? a / b : 0.0;
    }
};

namespace detail {

struct InstanceOutcome {
    BenchRecord a;
    BenchRecord b;
    bool skipped = false;
};

inline InstanceOutcome run_bench_instance(Index J, Index n, std::uint64_t instance_seed,
                                          const BenchConfig& config) {
    InstanceOutcome out;
    out.a.scenarios = out.b.scenarios = J;
    out.a.instruments = out.b.instruments = n;
    out.a.method = Method::Reformulation;
    out.b.method = Method::CuttingPlane;

    const std::uint64_t bytes =
        static_cast<std::uint64_t>(J) * static_cast<std::uint64_t>(n) * sizeof(double);
    if (bytes > config.memory_budget_bytes) {
        out.skipped = true;
        out.a.status = out.b.status = "skipped";
        out.a.note = out.b.note = "scenario matrix needs " + std::to_string(bytes >> 20) +
                                  " MiB, over the configured budget";
        return out;
    }

    try {
        const auto Y = generate_synthetic({J, n, config.num_factors, instance_seed});
        const auto p = column_means(Y);
        const auto bounds = PositionBounds::uniform(n, config.lower, config.upper);
        const auto r = risk_vector_from_terms(config.terms, J);
        // Risk cap at the level of risk in the unaltered portfolio.
        const double target = evaluate_risk(r, outcome_vector(Y, Vec::Ones(n)));
        out.a.target_risk = out.b.target_risk = target;

        {
            const auto refo = build_reformulation(Y, p, bounds, config.terms, target);
            out.a.variables = refo.variable_count();
            out.a.rows = refo.row_count();
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = optimize_reformulated(refo, Y, p);
            const auto t1 = std::chrono::steady_clock::now();
            out.a.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
            out.a.iterations = res.iterations;
            out.a.objective = res.profit;
            out.a.achieved_risk = res.achieved_risk;
            out.a.status = res.termination == Termination::Converged ? "ok"
                                                                     : to_string(res.termination);
        }
        {
            SolveConfig sc;
            sc.delta = config.delta;
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = optimize(Y, p, bounds, r, target, sc);
            const auto t1 = std::chrono::steady_clock::now();
            out.b.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
            out.b.variables = n;
            out.b.rows = res.constraint_rows();
            out.b.iterations = res.iterations;
            out.b.objective = res.profit;
            out.b.achieved_risk = res.achieved_risk;
            out.b.status = res.termination == Termination::Converged ? "ok"
                                                                     : to_string(res.termination);
        }
        if (out.a.status == "ok" && out.b.status == "ok") {
            const double diff = std::abs(out.a.objective - out.b.objective);
            if (diff > 1e-6 * (1.0 + std::abs(out.a.objective))) {
                out.a.note = out.b.note =
                    "objectives disagree by " + std::to_string(diff) + " (relative check failed)";
                out.a.status = out.b.status = "mismatch";
            }
        }
    } catch (const std::exception& e) {
        out.a.status = out.b.status = "error";
        out.a.note = out.b.note = e.what();
    }
    return out;
}

} // namespace detail

// The case-study comparison: for each (J, n) generate the factor-model
// instance, cap the risk at the unaltered portfolio's level, run both
// methods and record sizes, iterations and wall times (solve only;
// generation and risk-vector setup excluded).
inline BenchReport run_case_study(const std::vector<std::pair<Index, Index>>& grid,
                                  std::uint64_t seed, const BenchConfig& config = {}) {
    if (grid.empty()) throw std::invalid_argument("run_case_study: empty grid");
    BenchReport report;
    report.backend_policy = "simplex up to 600 rows, interior-point above";
    report.thread_count = std::max(1u, std::thread::hardware_concurrency());
    report.timings_comparable = !config.parallel;

    std::vector<detail::InstanceOutcome> outcomes(grid.size());
    if (config.parallel) {
        std::vector<std::future<detail::InstanceOutcome>> futures;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            futures.push_back(std::async(std::launch::async, [&, k] {
                return detail::run_bench_instance(grid[k].first, grid[k].second,
                                                  substream_seed(seed, k), config);
            }));
        }
        for (std::size_t k = 0; k < grid.size(); ++k) outcomes[k] = futures[k].get();
    } else {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            outcomes[k] = detail::run_bench_instance(grid[k].first, grid[k].second,
                                                     substream_seed(seed, k), config);
        }
    }
    for (auto& out : outcomes) {
        report.records.push_back(std::move(out.a));
        report.records.push_back(std::move(out.b));
    }
    return report;
}

inline void write_bench_csv(const BenchReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_bench_csv: cannot open '" + path.string() + "'");
    out << "# backend_policy=" << report.backend_policy
        << " threads=" << report.thread_count
        << " timings_comparable=" << (report.timings_comparable ? "yes" : "no") << "\n";
    out << "scenarios,instruments,method,variables,rows,iterations,wall_time_s,objective,"
           "achieved_risk,target_risk,status,note\n";
    for (const auto& r : report.records) {
        out << r.scenarios << ',' << r.instruments << ','
            << (r.method == Method::Reformulation ? "A" : "B") << ',' << r.variables << ','
            << r.rows << ',' << r.iterations << ',' << std::setprecision(6) << r.wall_time_s << ','
            << std::setprecision(17) << r.objective << ',' << r.achieved_risk << ','
            << r.target_risk << ',' << r.status << ',' << r.note << "\n";
    }
}

inline std::string format_bench_table(const BenchReport& report) {
    std::ostringstream os;
    os << "backend policy: " << report.backend_policy << ", threads: " << report.thread_count
       << (report.timings_comparable ? "" : " (parallel run, timings not comparable)") << "\n";
    os << std::right << std::setw(9) << "J" << std::setw(7) << "n" << std::setw(8) << "method"
       << std::setw(11) << "variables" << std::setw(9) << "rows" << std::setw(7) << "iters"
       << std::setw(12) << "time [s]" << std::setw(17) << "objective" << std::setw(10) << "status"
       << "\n";
    for (const auto& r : report.records) {
        os << std::setw(9) << r.scenarios << std::setw(7) << r.instruments << std::setw(8)
           << (r.method == Method::Reformulation ? "A" : "B") << std::setw(11) << r.variables
           << std::setw(9) << r.rows << std::setw(7) << r.iterations << std::setw(12)
           << std::fixed << std::setprecision(4) << r.wall_time_s << std::setw(17)
           << std::setprecision(4) << r.objective << std::setw(10) << r.status;
        if (!r.note.empty()) os << "  " << r.note;
        os << "\n";
        os.unsetf(std::ios::fixed);
    }
    // One acceleration line per grid cell, in the spirit of Table 2.
    for (std::size_t k = 0; k + 1 < report.records.size(); k += 2) {
        const auto& a = report.records[k];
        const double s = report.speedup(a.scenarios, a.instruments);
        if (s > 0.0) {
            os << "speedup A->B at (" << a.scenarios << ", " << a.instruments << "): "
               << std::setprecision(1) << std::fixed << s << "x\n";
            os.unsetf(std::ios::fixed);
        }
    }
    return os.str();
}

} // namespace cvarcut
