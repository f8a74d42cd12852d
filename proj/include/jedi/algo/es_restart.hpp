#pragma once

#include <jedi/algo/run_result.hpp>
#include <jedi/es/restart.hpp>
#include <jedi/es/strategy.hpp>

#include <cstdint>
#include <vector>

namespace jedi::algo {

struct EsRunConfig {
    es::EsConfig es{es::Engine::sep_cma, 1, 64, 0.05, 0.5, 0};
    bool restart = true;
    int window = 20;
    double tolerance = 1e-6;
    std::int64_t eval_budget = 200000;

    void validate() const
    {
        es.validate();
        if (window < 1)
            throw ConfigError("restart.window must be >= 1");
        if (!(tolerance >= 0.0))
            throw ConfigError("restart.tolerance must be >= 0");
        if (eval_budget < es.population)
            throw ConfigError("eval_budget is smaller than one ES population");
    }
};

/// Single ES on raw fitness, restarted from a fresh random genome once the
/// population fitness has stalled. Evaluations also feed a repertoire so
/// coverage can be reported.
template <env::Environment E>
RunResult es_restart_run(const EsRunConfig& config, const E& environment, const archive::Centroids& centroids,
                         std::uint64_t seed, unsigned workers = 1)
{
    config.validate();
    es::EsConfig es_cfg = config.es;
    es_cfg.dim = static_cast<int>(environment.genome_dim());
    es_cfg.validate();
    const int lambda = es_cfg.population;

    Recorder rec(centroids);
    std::uint64_t restart_index = 0;
    auto fresh = [&] {
        Rng center_rng = derive_rng(seed, {tag_restart, restart_index, 0});
        return es::EvolutionStrategy(es_cfg, uniform_genome(center_rng, es_cfg.dim),
                                     derive_rng(seed, {tag_restart, restart_index, 1}));
    };
    es::EvolutionStrategy strategy = fresh();
    es::RestartMonitor monitor(config.window, config.tolerance);

    while (config.eval_budget - rec.evaluations() >= lambda) {
        const auto& samples = strategy.ask();
        std::vector<const Genome*> ptrs;
        for (const auto& g : samples)
            ptrs.push_back(&g);
        const auto results = evaluate_batch(environment, ptrs, workers);
        std::vector<double> fitness;
        for (std::size_t k = 0; k < results.size(); ++k) {
            rec.note(samples[k], results[k]);
            rec.archive(samples[k], results[k]);
            fitness.push_back(results[k].fitness);
        }
        strategy.tell(fitness);
        rec.row();
        if (config.restart && monitor.observe(fitness)) {
            ++restart_index;
            strategy = fresh();
            monitor.reset();
        }
    }
    rec.finish();
    RunResult out = rec.take();
    out.restarts = static_cast<std::int64_t>(restart_index);
    return out;
}

} // namespace jedi::algo
