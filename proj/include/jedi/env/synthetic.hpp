#pragma once

#include <jedi/common.hpp>
#include <jedi/env/episode.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace jedi::env {

enum class SyntheticKind { sphere, rastrigin, deceptive_trap };

inline std::string to_string(SyntheticKind k)
{
    switch (k) {
    case SyntheticKind::sphere: return "sphere";
    case SyntheticKind::rastrigin: return "rastrigin";
    case SyntheticKind::deceptive_trap: return "deceptive-trap";
    }
    return "?";
}

/// Two-basin trap in descriptor space: a narrow global peak and a wide local
/// one. From the centre of the space the fitness gradient points at the local
/// basin. Genome coordinates past the first two add a quadratic penalty.
struct TrapShape {
    Vec2 global_center{0.9, 0.9};
    Vec2 local_center{0.2, 0.2};
    double global_width = 0.04;
    double local_width = 0.4; // 10x the global width
    double global_peak = 100.0;
    double local_peak = 50.0;
};

struct SyntheticTask {
    SyntheticKind kind = SyntheticKind::sphere;
    int dim = 10;
    TrapShape trap;
};

/// Genome coordinates in [-descriptor_span, descriptor_span] cover the
/// descriptor square. Random genomes from [-1, 1] therefore start in the
/// central [0.25, 0.75] box.
inline constexpr double descriptor_span = 2.0;

/// First two genome coordinates mapped affinely onto [0, 1], clamped.
inline Vec2 synthetic_descriptor(const Genome& g)
{
    auto map = [](double v) { return std::clamp(0.5 * (v / descriptor_span + 1.0), 0.0, 1.0); };
    return {map(g[0]), map(g[1])};
}

inline double trap_fitness(const TrapShape& t, Vec2 d, double tail_penalty)
{
    auto bump = [&](Vec2 c, double w, double peak) {
        return peak * std::exp(-(d - c).squared_norm() / (2.0 * w * w));
    };
    return std::max(bump(t.global_center, t.global_width, t.global_peak),
                    bump(t.local_center, t.local_width, t.local_peak))
           - tail_penalty;
}

inline EpisodeResult evaluate_synthetic(const Genome& g, const SyntheticTask& task)
{
    if (task.dim < 2)
        throw ConfigError("synthetic task needs dim >= 2, got " + std::to_string(task.dim));
    if (g.size() != task.dim)
        throw ConfigError("genome has length " + std::to_string(g.size()) + ", task expects "
                          + std::to_string(task.dim));
    EpisodeResult r;
    r.descriptor = synthetic_descriptor(g);
    r.steps_used = 1;
    switch (task.kind) {
    case SyntheticKind::sphere:
        r.fitness = -g.squaredNorm();
        break;
    case SyntheticKind::rastrigin: {
        double s = 10.0 * task.dim;
        for (Eigen::Index i = 0; i < g.size(); ++i)
            s += g[i] * g[i] - 10.0 * std::cos(2.0 * std::numbers::pi * g[i]);
        r.fitness = -s;
        break;
    }
    case SyntheticKind::deceptive_trap:
        r.fitness = trap_fitness(task.trap, r.descriptor, g.tail(g.size() - 2).squaredNorm());
        break;
    }
    return r;
}

} // namespace jedi::env
