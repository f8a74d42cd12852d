#pragma once

#include <jedi/common.hpp>

namespace jedi::env {

/// Outcome of one rollout. The descriptor lies in [0, 1]^2.
struct EpisodeResult {
    double fitness = 0.0;
    Vec2 descriptor;
    int steps_used = 1;
    bool reached_target = false;
};

} // namespace jedi::env
