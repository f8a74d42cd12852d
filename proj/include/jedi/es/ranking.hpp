#pragma once

#include <jedi/common.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace jedi::es {

/// Sample indices ordered best first (higher score is better). Equal scores
/// keep sample order; non-finite scores rank last, also in sample order.
inline std::vector<std::size_t> rank_descending(std::span<const double> scores)
{
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool fa = std::isfinite(scores[a]), fb = std::isfinite(scores[b]);
        if (fa != fb)
            return fa;
        if (!fa)
            return false;
        return scores[a] > scores[b];
    });
    return order;
}

/// Positive log-rank recombination weights for the top mu samples, summing to one.
inline Eigen::VectorXd log_rank_weights(int mu)
{
    Eigen::VectorXd w(mu);
    for (int i = 0; i < mu; ++i)
        w[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    return w / w.sum();
}

} // namespace jedi::es
