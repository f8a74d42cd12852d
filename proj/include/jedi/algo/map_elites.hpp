#pragma once

#include <jedi/algo/run_result.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace jedi::algo {

struct MapElitesConfig {
    int n_init = 128;
    int batch = 64;
    double iso_sigma = 0.2;
    double line_sigma = 0.0;
    std::int64_t eval_budget = 200000;

    void validate() const
    {
        if (n_init < 1)
            throw ConfigError("archive.n_init must be >= 1");
        if (batch < 1)
            throw ConfigError("map_elites.batch must be >= 1");
        if (!(iso_sigma >= 0.0) || !(line_sigma >= 0.0))
            throw ConfigError("map_elites sigmas must be >= 0");
        if (eval_budget < n_init)
            throw ConfigError("eval_budget is smaller than archive.n_init");
    }
};

/// CVT MAP-Elites with iso+line variation: x' = x + iso*g + line*u*(y - x).
/// The last batch is truncated so the budget is spent exactly.
template <env::Environment E>
RunResult map_elites_run(const MapElitesConfig& config, const E& environment, const archive::Centroids& centroids,
                         std::uint64_t seed, unsigned workers = 1)
{
    config.validate();
    const auto dim = environment.genome_dim();
    Recorder rec(centroids);
    Rng init_rng = derive_rng(seed, {tag_init});
    Rng rng = derive_rng(seed, {tag_map_elites});

    auto evaluate_all = [&](const std::vector<Genome>& genomes) {
        std::vector<const Genome*> ptrs;
        for (const auto& g : genomes)
            ptrs.push_back(&g);
        const auto results = evaluate_batch(environment, ptrs, workers);
        for (std::size_t i = 0; i < genomes.size(); ++i) {
            rec.note(genomes[i], results[i]);
            rec.archive(genomes[i], results[i]);
        }
        rec.row();
    };

    {
        std::vector<Genome> init;
        for (int i = 0; i < config.n_init; ++i)
            init.push_back(uniform_genome(init_rng, dim));
        evaluate_all(init);
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    while (rec.evaluations() < config.eval_budget) {
        const auto n = std::min<std::int64_t>(config.batch, config.eval_budget - rec.evaluations());
        const auto& filled = rec.repertoire().filled_cells();
        std::uniform_int_distribution<std::size_t> pick(0, filled.size() - 1);
        std::vector<Genome> offspring;
        for (std::int64_t k = 0; k < n; ++k) {
            const Genome& x = *rec.repertoire().cell(filled[pick(rng)]).elite;
            Genome child = x;
            for (Eigen::Index i = 0; i < dim; ++i)
                child[i] += config.iso_sigma * normal(rng);
            if (config.line_sigma != 0.0) {
                const Genome& y = *rec.repertoire().cell(filled[pick(rng)]).elite;
                child += config.line_sigma * normal(rng) * (y - x);
            }
            offspring.push_back(std::move(child));
        }
        evaluate_all(offspring);
    }
    rec.finish();
    return rec.take();
}

} // namespace jedi::algo
