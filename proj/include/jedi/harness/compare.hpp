#pragma once

#include <jedi/harness/io.hpp>
#include <jedi/harness/run.hpp>
#include <jedi/stats/stats.hpp>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace jedi::harness {

struct MethodResults {
    std::string directory;
    std::string method;
    std::string env;
    std::vector<std::uint64_t> seeds; ///< seeds that made it in
    std::vector<double> finals;
    std::vector<stats::Trace> traces;
};

/// Reads one result directory. Seeds that failed, lack a metrics file, or
/// whose last row stops short of the recorded final evaluation count are
/// skipped with a warning.
inline MethodResults load_results(const std::string& directory, std::ostream& warn)
{
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    std::ifstream in(dir / "manifest.json");
    if (!in)
        throw std::runtime_error("no manifest.json in '" + directory + "'");
    nlohmann::json manifest;
    try {
        in >> manifest;
    }
    catch (const std::exception& e) {
        throw std::runtime_error("unreadable manifest in '" + directory + "': " + e.what());
    }
    MethodResults out;
    out.directory = directory;
    out.method = manifest.at("method").get<std::string>();
    out.env = manifest.at("env").get<std::string>();
    for (const auto& run : manifest.at("runs")) {
        const auto seed = run.at("seed").get<std::uint64_t>();
        const std::string file = (dir / (out.method + "_" + std::to_string(seed) + "_metrics.csv")).string();
        if (run.value("status", "") != "ok") {
            warn << "warning: " << directory << ": seed " << seed << " did not complete; excluded\n";
            continue;
        }
        std::vector<algo::MetricsRow> rows;
        try {
            rows = read_metrics_csv(file);
        }
        catch (const std::exception& e) {
            warn << "warning: " << e.what() << "; seed " << seed << " excluded\n";
            continue;
        }
        const auto expected = run.value("final_evaluations", std::int64_t{-1});
        if (rows.empty() || rows.back().evaluations != expected) {
            warn << "warning: " << file << " is missing its final row; seed " << seed << " excluded\n";
            continue;
        }
        stats::Trace t;
        for (const auto& r : rows) {
            t.evaluations.push_back(r.evaluations);
            t.best_fitness.push_back(r.best_fitness);
        }
        out.seeds.push_back(seed);
        out.finals.push_back(rows.back().best_fitness);
        out.traces.push_back(std::move(t));
    }
    return out;
}

struct ComparisonRow {
    std::string method;
    std::string directory;
    std::size_t seeds = 0;
    double median_final = 0.0;
    std::optional<stats::UTestResult> test; ///< vs the first listed method
    bool not_significant = false;           ///< p > 0.05
};

inline std::vector<ComparisonRow> compare_results(const std::vector<MethodResults>& all)
{
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < all.size(); ++i) {
        ComparisonRow r;
        r.method = all[i].method;
        r.directory = all[i].directory;
        r.seeds = all[i].finals.size();
        r.median_final = stats::median(all[i].finals);
        if (i > 0) {
            r.test = stats::mann_whitney_u(all[0].finals, all[i].finals);
            r.not_significant = r.test->p_value > 0.05;
        }
        rows.push_back(r);
    }
    return rows;
}

/// Evenly spaced grid reaching the largest final evaluation count.
inline std::vector<std::int64_t> shared_grid(const std::vector<MethodResults>& all, int points = 100)
{
    std::int64_t max_e = 0;
    for (const auto& m : all)
        for (const auto& t : m.traces)
            if (!t.evaluations.empty())
                max_e = std::max(max_e, t.evaluations.back());
    std::vector<std::int64_t> grid;
    if (max_e == 0)
        return grid;
    const std::int64_t step = std::max<std::int64_t>(1, (max_e + points - 1) / points);
    for (std::int64_t e = step; e < max_e; e += step)
        grid.push_back(e);
    grid.push_back(max_e);
    return grid;
}

/// Writes the report to `out` and the convergence table next to it
/// (<stem>_convergence.csv). Returns an exit code.
inline int compare(const std::vector<std::string>& dirs, const std::string& out, std::ostream& log = std::cerr)
{
    if (dirs.size() < 2) {
        log << "error: compare needs at least two result directories\n";
        return exit_config;
    }
    std::vector<MethodResults> all;
    try {
        for (const auto& d : dirs)
            all.push_back(load_results(d, log));
    }
    catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    for (const auto& m : all)
        if (m.env != all.front().env) {
            log << "error: environments differ: '" << all.front().directory << "' ran " << all.front().env << " but '"
                << m.directory << "' ran " << m.env << "\n";
            return exit_config;
        }
    for (const auto& m : all)
        if (m.finals.empty()) {
            log << "error: no usable seeds in '" << m.directory << "'\n";
            return exit_runtime;
        }

    using kv::format_number;
    const auto rows = compare_results(all);
    std::ostringstream report;
    report << "method,directory,seeds,median_final_best,u_statistic,p_value,test,flag\n";
    for (const auto& r : rows) {
        report << r.method << ',' << r.directory << ',' << r.seeds << ',' << format_number(r.median_final) << ',';
        if (r.test)
            report << format_number(r.test->u_statistic) << ',' << format_number(r.test->p_value) << ','
                   << stats::to_string(r.test->method) << ',' << (r.not_significant ? "*" : "");
        else
            report << ",,reference,";
        report << "\n";
    }

    const auto grid = shared_grid(all);
    std::ostringstream conv;
    conv << "evaluations";
    for (const auto& m : all)
        conv << ',' << m.method << "_median," << m.method << "_std," << m.method << "_runs";
    conv << "\n";
    std::vector<std::vector<stats::ConvergenceRow>> tables;
    for (const auto& m : all)
        tables.push_back(stats::convergence_table(m.traces, grid));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        conv << grid[g];
        for (const auto& t : tables) {
            const auto& row = t[g];
            conv << ',' << (row.median ? format_number(*row.median) : "") << ','
                 << (row.stddev ? format_number(*row.stddev) : "") << ',' << row.runs;
        }
        conv << "\n";
    }

    namespace fs = std::filesystem;
    const fs::path report_path(out);
    fs::path conv_path = report_path;
    conv_path.replace_filename(report_path.stem().string() + "_convergence.csv");
    try {
        if (report_path.has_parent_path())
            fs::create_directories(report_path.parent_path());
        detail::write_file(report_path, report.str());
        detail::write_file(conv_path, conv.str());
    }
    catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    log << report.str();
    return exit_ok;
}

} // namespace jedi::harness
