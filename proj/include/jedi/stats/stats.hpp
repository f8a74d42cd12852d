#pragma once

#include <jedi/common.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jedi::stats {

inline double median(std::span<const double> values)
{
    if (values.empty())
        throw PreconditionError("median of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Population standard deviation.
inline double stddev(std::span<const double> values)
{
    if (values.empty())
        throw PreconditionError("stddev of an empty sample");
    double mean = 0.0;
    for (double x : values)
        mean += x;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double x : values)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

struct SampleSet {
    std::string label;
    std::vector<double> values;
};

enum class UMethod { exact, normal_approximation };

inline std::string to_string(UMethod m) { return m == UMethod::exact ? "exact" : "normal-approximation"; }

struct UTestResult {
    double u_statistic = 0.0; ///< U of the first sample
    double p_value = 1.0;     ///< two-sided
    UMethod method = UMethod::exact;
};

namespace detail {

/// Number of rank subsets of size n1 out of n1 + n2 whose U equals u, for all u.
inline std::vector<double> u_distribution(int n1, int n2)
{
    // f[i][j][u]: arrangements of i firsts and j seconds with U = u, rolled over i.
    const int max_u = n1 * n2;
    std::vector<std::vector<std::vector<double>>> f(
        static_cast<std::size_t>(n1 + 1),
        std::vector<std::vector<double>>(static_cast<std::size_t>(n2 + 1), std::vector<double>(max_u + 1, 0.0)));
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j) {
            auto& cell = f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (i == 0 || j == 0) {
                cell[0] = 1.0;
                continue;
            }
            // Largest element belongs to the first sample (beats all j seconds) or the second.
            const auto& a = f[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
            const auto& b = f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)];
            for (int u = 0; u <= i * j; ++u)
                cell[static_cast<std::size_t>(u)] = (u >= j ? a[static_cast<std::size_t>(u - j)] : 0.0) + b[static_cast<std::size_t>(u)];
        }
    return f[static_cast<std::size_t>(n1)][static_cast<std::size_t>(n2)];
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

} // namespace detail

/// Two-sided Mann-Whitney U test with midranks. Exact null distribution when
/// there are no ties and n1*n2 <= 400; otherwise the tie-corrected normal
/// approximation with continuity correction.
inline UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw PreconditionError("mann_whitney_u needs two non-empty samples");
    const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
    std::vector<std::pair<double, int>> all;
    for (double x : a)
        all.emplace_back(x, 0);
    for (double x : b)
        all.emplace_back(x, 1);
    std::sort(all.begin(), all.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    bool ties = false;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && all[j].first == all[i].first)
            ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        if (t > 1) {
            ties = true;
            tie_term += t * t * t - t;
        }
        for (std::size_t k = i; k < j; ++k)
            if (all[k].second == 0)
                rank_sum_a += midrank;
        i = j;
    }
    const double d1 = static_cast<double>(n1), d2 = static_cast<double>(n2);
    UTestResult r;
    r.u_statistic = rank_sum_a - d1 * (d1 + 1.0) / 2.0;
    const double mean_u = d1 * d2 / 2.0;

    if (!ties && n1 * n2 <= 400) {
        r.method = UMethod::exact;
        const auto dist = detail::u_distribution(static_cast<int>(n1), static_cast<int>(n2));
        double total = 0.0;
        for (double c : dist)
            total += c;
        // Two-sided: mass at least as far from the centre as the observed U.
        const double dev = std::abs(r.u_statistic - mean_u);
        double tail = 0.0;
        for (std::size_t u = 0; u < dist.size(); ++u)
            if (std::abs(static_cast<double>(u) - mean_u) >= dev - 1e-9)
                tail += dist[u];
        r.p_value = std::clamp(tail / total, 0.0, 1.0);
        return r;
    }

    r.method = UMethod::normal_approximation;
    const double nd = static_cast<double>(n);
    const double var = d1 * d2 / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    if (!(var > 0.0)) {
        r.p_value = 1.0;
        return r;
    }
    const double dev = std::max(0.0, std::abs(r.u_statistic - mean_u) - 0.5);
    r.p_value = std::clamp(2.0 * (1.0 - detail::normal_cdf(dev / std::sqrt(var))), 0.0, 1.0);
    return r;
}

inline UTestResult mann_whitney_u(const SampleSet& a, const SampleSet& b) { return mann_whitney_u(a.values, b.values); }

/// A run's best-ever fitness trace as (evaluations, best) steps.
struct Trace {
    std::vector<std::int64_t> evaluations;
    std::vector<double> best_fitness;

    /// Best-ever at the last row with evaluations <= at, if any.
    std::optional<double> at(std::int64_t e) const
    {
        const auto it = std::upper_bound(evaluations.begin(), evaluations.end(), e);
        if (it == evaluations.begin())
            return std::nullopt;
        return best_fitness[static_cast<std::size_t>(it - evaluations.begin() - 1)];
    }
};

struct ConvergenceRow {
    std::int64_t evaluations = 0;
    std::size_t runs = 0; ///< runs that have started by this point
    std::optional<double> median;
    std::optional<double> stddev;
};

/// Median and standard deviation across runs of best-ever fitness on a grid.
/// Runs without a row at or before a grid point are left out there; a grid
/// point no run has reached is marked absent.
inline std::vector<ConvergenceRow> convergence_table(std::span<const Trace> runs, std::span<const std::int64_t> grid)
{
    if (runs.empty())
        throw PreconditionError("convergence_table needs at least one run");
    std::vector<ConvergenceRow> out;
    for (std::int64_t e : grid) {
        ConvergenceRow row;
        row.evaluations = e;
        std::vector<double> vals;
        for (const auto& r : runs)
            if (auto v = r.at(e))
                vals.push_back(*v);
        row.runs = vals.size();
        if (!vals.empty()) {
            row.median = median(vals);
            row.stddev = stddev(vals);
        }
        out.push_back(row);
    }
    return out;
}

} // namespace jedi::stats
