#pragma once

#include <jedi/common.hpp>

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace jedi::targeting {

/// GP posterior at one centroid, on the standardized scale.
struct AcquisitionPoint {
    std::size_t centroid_index = 0;
    double mean = 0.0;
    double variance = 0.0;
};

/// Indices (ascending) of the points not dominated under (max mean, max
/// variance). Exact duplicates of a front point are all kept.
inline std::vector<std::size_t> pareto_front(std::span<const AcquisitionPoint> points)
{
    if (points.empty())
        throw PreconditionError("pareto_front of an empty set");
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].mean != points[b].mean)
            return points[a].mean > points[b].mean;
        return points[a].variance > points[b].variance;
    });
    std::vector<std::size_t> front;
    bool have_prev = false;
    double prev_best_var = 0.0; // best variance among strictly larger means
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        const double mean = points[order[i]].mean;
        const double group_var = points[order[i]].variance; // max within the equal-mean group
        while (j < order.size() && points[order[j]].mean == mean)
            ++j;
        if (!have_prev || group_var > prev_best_var)
            for (std::size_t k = i; k < j && points[order[k]].variance == group_var; ++k)
                front.push_back(order[k]);
        if (!have_prev || group_var > prev_best_var)
            prev_best_var = group_var;
        have_prev = true;
        i = j;
    }
    std::sort(front.begin(), front.end());
    return front;
}

/// p dominates q: no worse in both objectives and strictly better in one.
inline bool dominates(const AcquisitionPoint& p, const AcquisitionPoint& q)
{
    return p.mean >= q.mean && p.variance >= q.variance && (p.mean > q.mean || p.variance > q.variance);
}

} // namespace jedi::targeting
