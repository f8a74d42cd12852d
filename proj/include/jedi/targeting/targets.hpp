#pragma once

#include <jedi/archive/repertoire.hpp>
#include <jedi/common.hpp>
#include <jedi/gp/weighted_gp.hpp>
#include <jedi/targeting/pareto.hpp>

#include <random>
#include <string>
#include <vector>

namespace jedi::targeting {

enum class Selection { weighted_gp, standard_gp, uniform };

inline std::string to_string(Selection s)
{
    switch (s) {
    case Selection::weighted_gp: return "weighted-gp";
    case Selection::standard_gp: return "standard-gp";
    case Selection::uniform: return "uniform";
    }
    return "?";
}

inline Selection parse_selection(const std::string& s)
{
    if (s == "weighted-gp")
        return Selection::weighted_gp;
    if (s == "standard-gp")
        return Selection::standard_gp;
    if (s == "uniform")
        return Selection::uniform;
    throw ConfigError("unknown selection '" + s + "' (expected weighted-gp, standard-gp or uniform)");
}

struct TargetBatch {
    std::vector<Vec2> targets;
    std::vector<std::size_t> source_indices;
};

/// GP posterior at every centroid (filled or not).
inline std::vector<AcquisitionPoint> acquisition_points(const gp::WeightedGp& model, const archive::Repertoire& rep)
{
    const auto preds = model.predict_batch(rep.centroids().points);
    std::vector<AcquisitionPoint> out(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i)
        out[i] = {i, preds[i].standardized_mean, preds[i].variance};
    return out;
}

/// Uniform draws from the front: without replacement when it holds at least
/// n_es points, with replacement otherwise.
inline TargetBatch sample_front(std::span<const AcquisitionPoint> acquisition, const archive::Repertoire& rep, int n_es,
                                Rng& rng)
{
    if (n_es < 1)
        throw PreconditionError("n_es must be >= 1");
    std::vector<std::size_t> front = pareto_front(acquisition);
    const auto n = static_cast<std::size_t>(n_es);
    std::vector<std::size_t> picks;
    if (front.size() >= n) {
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> d(i, front.size() - 1);
            std::swap(front[i], front[d(rng)]);
            picks.push_back(front[i]);
        }
    }
    else {
        std::uniform_int_distribution<std::size_t> d(0, front.size() - 1);
        for (std::size_t i = 0; i < n; ++i)
            picks.push_back(front[d(rng)]);
    }
    TargetBatch batch;
    for (std::size_t p : picks) {
        const std::size_t c = acquisition[p].centroid_index;
        batch.source_indices.push_back(c);
        batch.targets.push_back(rep.centroids().points.at(c));
    }
    return batch;
}

inline TargetBatch select_targets(const gp::WeightedGp& model, const archive::Repertoire& rep, int n_es, Rng& rng)
{
    const auto acq = acquisition_points(model, rep);
    return sample_front(acq, rep, n_es, rng);
}

/// Ablation arm: centroids drawn uniformly with replacement, no model.
inline TargetBatch select_targets_uniform(const archive::Repertoire& rep, int n_es, Rng& rng)
{
    if (n_es < 1)
        throw PreconditionError("n_es must be >= 1");
    std::uniform_int_distribution<std::size_t> d(0, rep.size() - 1);
    TargetBatch batch;
    for (int i = 0; i < n_es; ++i) {
        const std::size_t c = d(rng);
        batch.source_indices.push_back(c);
        batch.targets.push_back(rep.centroids().points[c]);
    }
    return batch;
}

} // namespace jedi::targeting
