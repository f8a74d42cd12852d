#pragma once

#include <jedi/harness/config.hpp>
#include <jedi/harness/io.hpp>

#include <Eigen/Core>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace jedi::harness {

inline constexpr const char* version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_runtime = 2 };

inline std::string metrics_file(const ExperimentConfig& c, std::uint64_t seed)
{
    return to_string(c.method) + "_" + std::to_string(seed) + "_metrics.csv";
}

/// Runs the configured method for one seed.
inline algo::RunResult run_method(const ExperimentConfig& c, const env::AnyEnvironment& environment,
                                  const archive::Centroids& centroids, std::uint64_t seed, unsigned workers)
{
    switch (c.method) {
    case Method::jedi: return algo::jedi_run(jedi_config(c), environment, centroids, seed, workers);
    case Method::map_elites: return algo::map_elites_run(map_elites_config(c), environment, centroids, seed, workers);
    case Method::es:
    case Method::es_restart: return algo::es_restart_run(es_config(c), environment, centroids, seed, workers);
    }
    throw ConfigError("unknown method");
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace detail

/// Executes every seed, writing metrics, timing, archive and best-genome files
/// per seed plus one manifest.json. A failing seed is recorded and the rest
/// proceed; the return value is exit_runtime if any seed failed.
inline int run_experiment(const ExperimentConfig& c, unsigned workers = 1, std::ostream& log = std::cerr)
{
    namespace fs = std::filesystem;
    const fs::path dir(c.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        log << "error: cannot create output directory '" << dir.string() << "': " << ec.message() << "\n";
        return exit_runtime;
    }
    const env::AnyEnvironment environment = make_environment(c);
    const archive::Centroids centroids = archive::build_centroids(c.centroids, c.centroid_seed);

    nlohmann::ordered_json manifest;
    manifest["method"] = to_string(c.method);
    manifest["env"] = environment.describe();
    manifest["config_hash"] = hex(config_hash(c));
    manifest["config"] = serialize_config(c);
    manifest["seeds"] = c.seeds;
    manifest["eval_budget"] = c.eval_budget;
    manifest["versions"] = {{"jedi", version},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION)
                                          + "." + std::to_string(EIGEN_MINOR_VERSION)},
                            {"cxx", std::to_string(__cplusplus)}};
    manifest["runs"] = nlohmann::ordered_json::array();

    bool failed = false;
    for (std::uint64_t seed : c.seeds) {
        nlohmann::ordered_json entry;
        entry["seed"] = seed;
        const std::string stem = to_string(c.method) + "_" + std::to_string(seed);
        try {
            const algo::RunResult r = run_method(c, environment, centroids, seed, workers);
            std::ostringstream metrics, timing, archive_csv, best;
            write_metrics_csv(metrics, r.rows);
            write_timing_csv(timing, r.rows);
            archive::write_archive_csv(archive_csv, r.repertoire);
            write_best_csv(best, r.best_genome, r.best_result);
            detail::write_file(dir / metrics_file(c, seed), metrics.str());
            detail::write_file(dir / (stem + "_timing.csv"), timing.str());
            detail::write_file(dir / (stem + "_archive.csv"), archive_csv.str());
            detail::write_file(dir / (stem + "_best.csv"), best.str());
            entry["status"] = "ok";
            entry["final_evaluations"] = r.evaluations;
            entry["final_best_fitness"] = r.best_result.fitness;
            entry["coverage"] = r.repertoire.coverage();
            entry["reached_target"] = r.best_result.reached_target;
            if (c.method == Method::es_restart)
                entry["restarts"] = r.restarts;
            log << stem << ": evaluations " << r.evaluations << ", best " << kv::format_number(r.best_result.fitness)
                << ", coverage " << kv::format_number(r.repertoire.coverage()) << "\n";
        }
        catch (const std::exception& e) {
            failed = true;
            entry["status"] = "failed";
            entry["error"] = e.what();
            log << stem << ": failed: " << e.what() << "\n";
        }
        manifest["runs"].push_back(entry);
    }
    try {
        detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    }
    catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return failed ? exit_runtime : exit_ok;
}

} // namespace jedi::harness
