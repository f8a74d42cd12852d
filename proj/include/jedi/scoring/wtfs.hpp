#pragma once

#include <jedi/common.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace jedi::scoring {

enum class AlphaSchedule { constant, linear };

struct WtfsConfig {
    AlphaSchedule schedule = AlphaSchedule::linear;
    double alpha = 0.5; ///< constant schedule
    double alpha_start = 0.8;
    double alpha_end = 0.0;

    void validate() const
    {
        for (double a : {alpha, alpha_start, alpha_end})
            if (!(a >= 0.0 && a <= 1.0))
                throw ConfigError("alpha out of [0,1]");
    }
};

inline std::string to_string(AlphaSchedule s) { return s == AlphaSchedule::constant ? "constant" : "linear"; }

inline AlphaSchedule parse_schedule(const std::string& s)
{
    if (s == "constant")
        return AlphaSchedule::constant;
    if (s == "linear")
        return AlphaSchedule::linear;
    throw ConfigError("unknown alpha schedule '" + s + "' (expected constant or linear)");
}

namespace detail {

// (v - lo) / (hi - lo), or 0.5 everywhere when the population is flat.
inline std::vector<double> min_max(std::span<const double> v)
{
    std::vector<double> out(v.size(), 0.5);
    if (v.empty())
        return out;
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo))
        return out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = std::clamp((v[i] - lo) / (hi - lo), 0.0, 1.0);
    return out;
}

} // namespace detail

inline std::vector<double> fitness_scores(std::span<const double> fitnesses) { return detail::min_max(fitnesses); }

inline std::vector<double> target_scores(std::span<const Vec2> descriptors, Vec2 target)
{
    std::vector<double> d(descriptors.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = distance(descriptors[i], target);
    auto s = detail::min_max(d);
    const bool flat = std::all_of(d.begin(), d.end(), [&](double x) { return x == d.front(); });
    if (!flat)
        for (double& x : s)
            x = 1.0 - x;
    return s;
}

struct PopulationEval {
    std::vector<double> fitnesses;
    std::vector<Vec2> descriptors;
    Vec2 target;
};

inline std::vector<double> wtfs_scores(const PopulationEval& pop, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw PreconditionError("alpha out of [0,1]");
    if (pop.fitnesses.size() != pop.descriptors.size())
        throw PreconditionError("wtfs_scores: fitness and descriptor counts differ");
    const auto f = fitness_scores(pop.fitnesses);
    const auto t = target_scores(pop.descriptors, pop.target);
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = alpha == 0.0 ? f[i] : alpha == 1.0 ? t[i] : alpha * t[i] + (1.0 - alpha) * f[i];
    return out;
}

inline double alpha_at(const WtfsConfig& cfg, long loop_index, long total_loops)
{
    if (total_loops < 1 || loop_index < 0 || loop_index >= total_loops)
        throw PreconditionError("alpha_at: loop index out of range");
    if (cfg.schedule == AlphaSchedule::constant)
        return cfg.alpha;
    if (total_loops == 1)
        return cfg.alpha_start;
    // std::lerp is exact at both ends, so the last loop gets alpha_end.
    return std::lerp(cfg.alpha_start, cfg.alpha_end,
                     static_cast<double>(loop_index) / static_cast<double>(total_loops - 1));
}

} // namespace jedi::scoring
