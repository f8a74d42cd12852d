#pragma once

#include <jedi/algo/run_result.hpp>
#include <jedi/es/strategy.hpp>
#include <jedi/gp/weighted_gp.hpp>
#include <jedi/scoring/wtfs.hpp>
#include <jedi/targeting/targets.hpp>

#include <cstdint>
#include <vector>

namespace jedi::algo {

struct JediConfig {
    int n_init = 128;
    int n_es = 4;
    int loops = 0; ///< 0 derives the loop count from the budget
    int generations = 100;
    es::EsConfig es{};
    scoring::WtfsConfig wtfs{};
    targeting::Selection selection = targeting::Selection::weighted_gp;
    std::int64_t eval_budget = 200000;
    gp::FitOptions gp{};

    std::int64_t evaluations_per_loop() const
    {
        return static_cast<std::int64_t>(n_es) * generations * es.population;
    }

    int planned_loops() const
    {
        if (loops > 0)
            return loops;
        const std::int64_t rest = std::max<std::int64_t>(0, eval_budget - n_init);
        const std::int64_t per = evaluations_per_loop();
        return static_cast<int>(std::max<std::int64_t>(1, (rest + per - 1) / per));
    }

    void validate() const
    {
        if (n_init < 1)
            throw ConfigError("archive.n_init must be >= 1");
        if (n_es < 1)
            throw ConfigError("jedi.n_es must be >= 1");
        if (loops < 0)
            throw ConfigError("jedi.loops must be >= 0");
        if (generations < 1)
            throw ConfigError("jedi.generations must be >= 1");
        if (eval_budget < n_init)
            throw ConfigError("eval_budget is smaller than archive.n_init");
        es.validate();
        wtfs.validate();
    }
};

/// JEDi: GP-guided target selection, target-conditioned ES emitters and a
/// MAP-Elites archive refreshed after every loop.
template <env::Environment E>
RunResult jedi_run(const JediConfig& config, const E& environment, const archive::Centroids& centroids,
                   std::uint64_t seed, unsigned workers = 1)
{
    config.validate();
    es::EsConfig es_cfg = config.es;
    es_cfg.dim = static_cast<int>(environment.genome_dim());
    es_cfg.validate();
    const int lambda = es_cfg.population;
    const std::int64_t budget = config.eval_budget;

    Recorder rec(centroids);
    {
        Rng rng = derive_rng(seed, {tag_init});
        std::vector<Genome> init;
        for (int i = 0; i < config.n_init; ++i)
            init.push_back(uniform_genome(rng, es_cfg.dim));
        std::vector<const Genome*> ptrs;
        for (const auto& g : init)
            ptrs.push_back(&g);
        const auto results = evaluate_batch(environment, ptrs, workers);
        for (std::size_t i = 0; i < init.size(); ++i) {
            rec.note(init[i], results[i]);
            rec.archive(init[i], results[i]);
        }
        rec.row();
    }

    const int total_loops = config.planned_loops();
    for (int l = 0; l < total_loops; ++l) {
        if (budget - rec.evaluations() < lambda)
            break;
        const double alpha = scoring::alpha_at(config.wtfs, l, total_loops);
        const auto loop_tag = static_cast<std::uint64_t>(l);
        Rng target_rng = derive_rng(seed, {tag_targets, loop_tag});
        targeting::TargetBatch batch;
        if (config.selection == targeting::Selection::uniform) {
            batch = targeting::select_targets_uniform(rec.repertoire(), config.n_es, target_rng);
        }
        else {
            auto set = rec.repertoire().gp_training_set();
            if (config.selection == targeting::Selection::standard_gp)
                std::fill(set.counts.begin(), set.counts.end(), std::int64_t{1});
            const std::uint64_t gp_seed = derive_rng(seed, {tag_gp, loop_tag})();
            const auto model = gp::WeightedGp::fit(set.inputs, set.fitness, set.counts, gp_seed, config.gp);
            batch = targeting::select_targets(model, rec.repertoire(), config.n_es, target_rng);
        }

        std::vector<es::EvolutionStrategy> emitters;
        emitters.reserve(static_cast<std::size_t>(config.n_es));
        for (int s = 0; s < config.n_es; ++s) {
            const auto elite = rec.repertoire().nearest_elite(batch.targets[static_cast<std::size_t>(s)]);
            emitters.emplace_back(es_cfg, *elite.genome,
                                  derive_rng(seed, {tag_es, loop_tag, static_cast<std::uint64_t>(s)}));
        }

        std::vector<std::pair<Genome, env::EpisodeResult>> buffer;
        for (int gen = 0; gen < config.generations; ++gen) {
            std::vector<std::size_t> active;
            std::int64_t planned = rec.evaluations();
            for (std::size_t s = 0; s < emitters.size(); ++s)
                if (budget - planned >= lambda) {
                    active.push_back(s);
                    planned += lambda;
                }
            if (active.empty())
                break;
            std::vector<const Genome*> ptrs;
            for (std::size_t s : active)
                for (const auto& g : emitters[s].ask())
                    ptrs.push_back(&g);
            const auto results = evaluate_batch(environment, ptrs, workers);
            for (std::size_t a = 0; a < active.size(); ++a) {
                const std::size_t s = active[a];
                scoring::PopulationEval pop;
                pop.target = batch.targets[s];
                for (int k = 0; k < lambda; ++k) {
                    const std::size_t idx = a * static_cast<std::size_t>(lambda) + static_cast<std::size_t>(k);
                    pop.fitnesses.push_back(results[idx].fitness);
                    pop.descriptors.push_back(results[idx].descriptor);
                    rec.note(*ptrs[idx], results[idx]);
                    buffer.emplace_back(*ptrs[idx], results[idx]);
                }
                emitters[s].tell(scoring::wtfs_scores(pop, alpha));
                rec.row(alpha, l);
            }
        }
        for (const auto& [g, r] : buffer)
            rec.archive(g, r);
        rec.refresh_coverage();
    }
    rec.finish();
    return rec.take();
}

} // namespace jedi::algo
