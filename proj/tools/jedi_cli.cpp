#include <jedi/archive/centroids.hpp>
#include <jedi/harness/compare.hpp>
#include <jedi/harness/config.hpp>
#include <jedi/harness/replay.hpp>
#include <jedi/harness/run.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace jedi;
using harness::exit_config;
using harness::exit_ok;
using harness::exit_runtime;

std::vector<std::uint64_t> parse_seed_list(const std::string& text)
{
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size())
            throw ConfigError("'--seeds': bad seed '" + item + "'");
        seeds.push_back(v);
    }
    if (seeds.empty())
        throw ConfigError("'--seeds': empty seed list");
    return seeds;
}

int write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return exit_runtime;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"JEDi quality-diversity toolkit"};
    app.require_subcommand(1);

    std::string config_path, seeds_text, out_dir;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("--config", config_path, "experiment config")->required();
    run->add_option("--seeds", seeds_text, "comma-separated seeds overriding the config");
    run->add_option("--out", out_dir, "output directory overriding the config");

    std::vector<std::string> dirs;
    std::string compare_out;
    auto* cmp = app.add_subcommand("compare", "compare result directories");
    cmp->add_option("dirs", dirs, "result directories; the first is the reference")->required();
    cmp->add_option("--out", compare_out, "report CSV")->required();

    std::string genome_path, maze_path, replay_out;
    auto* rep = app.add_subcommand("replay", "re-run a saved genome and dump its trajectory");
    rep->add_option("--genome", genome_path, "best-genome CSV")->required();
    rep->add_option("--maze", maze_path, "maze file")->required();
    rep->add_option("--out", replay_out, "trajectory CSV")->required();

    int k = 1024;
    std::uint64_t centroid_seed = 0;
    std::string centroids_out;
    auto* cen = app.add_subcommand("centroids", "write CVT centroids of the unit square");
    cen->add_option("--k", k, "number of centroids");
    cen->add_option("--seed", centroid_seed, "sampling seed");
    cen->add_option("--out", centroids_out, "output CSV")->required();

    std::string quad_in, quad_out;
    double opening = 0.3;
    auto* quad = app.add_subcommand("quad-maze", "tile a maze into a four-quadrant maze");
    quad->add_option("--maze", quad_in, "base maze file")->required();
    quad->add_option("--opening", opening, "half-width of the doorways around the centre");
    quad->add_option("--out", quad_out, "output maze file")->required();

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run) {
            auto cfg = harness::load_config(config_path);
            if (!seeds_text.empty()) {
                cfg.seeds = parse_seed_list(seeds_text);
                harness::validate(cfg);
            }
            if (!out_dir.empty())
                cfg.output_dir = out_dir;
            return harness::run_experiment(cfg, workers_from_env());
        }
        if (*cmp)
            return harness::compare(dirs, compare_out);
        if (*rep) {
            const auto best = harness::read_best_csv(genome_path);
            const auto maze = env::load_maze(maze_path);
            std::ostringstream out;
            const auto result = harness::write_trajectory(out, best.genome, maze);
            if (result.fitness != best.result.fitness)
                std::cerr << "warning: replayed fitness " << kv::format_number(result.fitness)
                          << " differs from the recorded " << kv::format_number(best.result.fitness) << "\n";
            return write_text(replay_out, out.str());
        }
        if (*cen) {
            if (k < 1)
                throw ConfigError("'--k' must be >= 1");
            const auto c = archive::build_centroids(k, centroid_seed);
            std::ostringstream out;
            out << "index,x,y\n";
            for (std::size_t i = 0; i < c.size(); ++i)
                out << i << ',' << kv::format_number(c.points[i].x) << ',' << kv::format_number(c.points[i].y) << "\n";
            return write_text(centroids_out, out.str());
        }
        if (*quad) {
            const auto m = env::make_quad_maze(env::load_maze(quad_in), opening);
            return write_text(quad_out, env::format_maze(m));
        }
    }
    catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_ok;
}
