#pragma once

// Weighted Gaussian process regression over the 2D behavior space.
//
// A training point observed n_i times enters the noise term with weight
// W_ii = 1 / n_i, which is exactly what a standard GP would see if the point
// were duplicated n_i times:
//
//   mu(x)      = k(x, X) (K + s_n^2 W)^-1 y
//   sigma^2(x) = k(x, x) - k(x, X) (K + s_n^2 W)^-1 k(X, x)
//
// Targets are standardized with count-weighted statistics (again matching the
// duplicated dataset) and the prior mean is zero on that scale.

#include <jedi/common.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace jedi::gp {

inline constexpr double noise_floor = 1e-8;

struct KernelParams {
    double lengthscale = 0.1;
    double signal_variance = 1.0;
    double noise = 1e-2; ///< s_n^2

    void validate() const
    {
        if (!(lengthscale > 0.0) || !(signal_variance > 0.0) || !(noise >= noise_floor))
            throw ConfigError("kernel parameters must be positive with noise >= 1e-8");
    }
};

/// Isotropic squared-exponential kernel.
inline double rbf_kernel(Vec2 a, Vec2 b, const KernelParams& p)
{
    return p.signal_variance * std::exp(-(a - b).squared_norm() / (2.0 * p.lengthscale * p.lengthscale));
}

struct FitOptions {
    int restarts = 8;
    int evaluations_per_restart = 60;
    std::array<double, 2> lengthscale_bounds{0.01, 2.0};
    std::array<double, 2> signal_bounds{0.01, 100.0};
    std::array<double, 2> noise_bounds{noise_floor, 10.0};
    /// Hyperparameters are searched on a seeded subsample of at most this many
    /// rows (0 = all rows); the final model always uses every row.
    std::size_t search_max_points = 128;
    /// Skip the search and use these parameters.
    std::optional<KernelParams> fixed;
};

struct Prediction {
    double mean = 0.0;              ///< raw fitness units
    double standardized_mean = 0.0; ///< acquisition scale
    double variance = 0.0;          ///< standardized units, >= 0
};

namespace detail {

inline Eigen::MatrixXd kernel_matrix(std::span<const Vec2> x, const KernelParams& p)
{
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd k(n, n);
    const double inv = 1.0 / (2.0 * p.lengthscale * p.lengthscale);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = p.signal_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = p.signal_variance * std::exp(-(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]).squared_norm() * inv);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

/// Cholesky of K + s_n^2 W, escalating diagonal jitter 1e-10 .. 1e-4 on failure.
inline std::optional<Eigen::LLT<Eigen::MatrixXd>> factorize(std::span<const Vec2> x, std::span<const double> inv_counts,
                                                            const KernelParams& p)
{
    Eigen::MatrixXd a = kernel_matrix(x, p);
    for (std::size_t i = 0; i < x.size(); ++i)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += p.noise * inv_counts[i];
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success)
        return llt;
    for (double jitter = 1e-10; jitter <= 1e-4 * 1.0001; jitter *= 10.0) {
        llt.compute(a + jitter * Eigen::MatrixXd::Identity(a.rows(), a.cols()));
        if (llt.info() == Eigen::Success)
            return llt;
    }
    return std::nullopt;
}

inline double log_likelihood(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& y)
{
    const Eigen::VectorXd alpha = llt.solve(y);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

} // namespace detail

/// Weighted log marginal likelihood of standardized targets y under params,
/// or -inf when the covariance cannot be factorized.
inline double weighted_log_marginal_likelihood(std::span<const Vec2> x, const Eigen::VectorXd& y,
                                               std::span<const double> inv_counts, const KernelParams& p)
{
    auto llt = detail::factorize(x, inv_counts, p);
    if (!llt)
        return -std::numeric_limits<double>::infinity();
    const double v = detail::log_likelihood(*llt, y);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
}

/// Fitted, immutable weighted GP. Safe to share across threads for prediction.
class WeightedGp {
public:
    static WeightedGp fit(std::span<const Vec2> x, std::span<const double> y_raw, std::span<const std::int64_t> counts,
                          std::uint64_t seed, const FitOptions& options = {})
    {
        const std::size_t n = x.size();
        if (n == 0)
            throw PreconditionError("gp_fit needs at least one training point");
        if (y_raw.size() != n || counts.size() != n)
            throw PreconditionError("gp_fit inputs have mismatched lengths");
        WeightedGp gp;
        gp.x_.assign(x.begin(), x.end());
        gp.y_raw_.assign(y_raw.begin(), y_raw.end());
        gp.inv_counts_.resize(n);
        double total = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[i] < 1)
                throw PreconditionError("gp_fit counts must be >= 1");
            if (!std::isfinite(y_raw[i]) || !std::isfinite(x[i].x) || !std::isfinite(x[i].y))
                throw PreconditionError("gp_fit inputs must be finite");
            gp.inv_counts_[i] = 1.0 / static_cast<double>(counts[i]);
            total += static_cast<double>(counts[i]);
            sum += static_cast<double>(counts[i]) * y_raw[i];
        }
        gp.y_mean_ = sum / total;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            var += static_cast<double>(counts[i]) * (y_raw[i] - gp.y_mean_) * (y_raw[i] - gp.y_mean_);
        var /= total;
        gp.y_std_ = std::sqrt(var);
        gp.degenerate_ = !(gp.y_std_ > 1e-12 * (1.0 + std::abs(gp.y_mean_)));
        if (gp.degenerate_)
            gp.y_std_ = 1.0;
        gp.y_ = Eigen::VectorXd(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            gp.y_[static_cast<Eigen::Index>(i)] = gp.degenerate_ ? 0.0 : (y_raw[i] - gp.y_mean_) / gp.y_std_;

        if (options.fixed) {
            options.fixed->validate();
            gp.params_ = *options.fixed;
        }
        else if (gp.degenerate_) {
            gp.params_ = KernelParams{};
        }
        else {
            gp.params_ = search(gp.x_, gp.y_, gp.inv_counts_, seed, options);
        }

        auto llt = detail::factorize(gp.x_, gp.inv_counts_, gp.params_);
        if (!llt)
            throw ModelFitError("GP covariance is not positive definite even with 1e-4 jitter");
        gp.llt_ = std::move(*llt);
        gp.alpha_ = gp.llt_.solve(gp.y_);
        gp.log_likelihood_ = detail::log_likelihood(gp.llt_, gp.y_);
        return gp;
    }

    Prediction predict(Vec2 q) const { return predict_batch(std::span<const Vec2>(&q, 1)).front(); }

    std::vector<Prediction> predict_batch(std::span<const Vec2> queries) const
    {
        const auto n = static_cast<Eigen::Index>(x_.size());
        const auto m = static_cast<Eigen::Index>(queries.size());
        Eigen::MatrixXd k_star(n, m);
        for (Eigen::Index j = 0; j < m; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                k_star(i, j) = rbf_kernel(x_[static_cast<std::size_t>(i)], queries[static_cast<std::size_t>(j)], params_);
        const Eigen::VectorXd mean = k_star.transpose() * alpha_;
        const Eigen::MatrixXd v = llt_.matrixL().solve(k_star);
        const Eigen::VectorXd reduction = v.colwise().squaredNorm().transpose();
        std::vector<Prediction> out(static_cast<std::size_t>(m));
        for (Eigen::Index j = 0; j < m; ++j) {
            auto& p = out[static_cast<std::size_t>(j)];
            p.standardized_mean = mean[j];
            p.mean = y_mean_ + y_std_ * mean[j];
            p.variance = std::max(0.0, params_.signal_variance - reduction[j]);
        }
        return out;
    }

    const KernelParams& params() const { return params_; }
    double log_marginal_likelihood() const { return log_likelihood_; }
    bool degenerate() const { return degenerate_; }
    double target_mean() const { return y_mean_; }
    double target_scale() const { return y_std_; }
    std::size_t size() const { return x_.size(); }
    const Eigen::VectorXd& standardized_targets() const { return y_; }
    const std::vector<double>& inverse_counts() const { return inv_counts_; }
    const std::vector<Vec2>& inputs() const { return x_; }

private:
    WeightedGp() = default;

    /// Multi-start Nelder-Mead on the log marginal likelihood in log-parameter
    /// space, projected onto the box bounds.
    static KernelParams search(const std::vector<Vec2>& x_all, const Eigen::VectorXd& y_all,
                               const std::vector<double>& w_all, std::uint64_t seed, const FitOptions& opt)
    {
        Rng rng = derive_rng(seed, {0x6770u});
        std::vector<Vec2> x = x_all;
        Eigen::VectorXd y = y_all;
        std::vector<double> w = w_all;
        if (opt.search_max_points > 0 && x_all.size() > opt.search_max_points) {
            std::vector<std::size_t> idx(x_all.size());
            for (std::size_t i = 0; i < idx.size(); ++i)
                idx[i] = i;
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(opt.search_max_points);
            std::sort(idx.begin(), idx.end());
            x.clear();
            w.clear();
            y.resize(static_cast<Eigen::Index>(idx.size()));
            for (std::size_t i = 0; i < idx.size(); ++i) {
                x.push_back(x_all[idx[i]]);
                w.push_back(w_all[idx[i]]);
                y[static_cast<Eigen::Index>(i)] = y_all[static_cast<Eigen::Index>(idx[i])];
            }
        }

        using P = std::array<double, 3>;
        const P lo{std::log(opt.lengthscale_bounds[0]), std::log(opt.signal_bounds[0]), std::log(opt.noise_bounds[0])};
        const P hi{std::log(opt.lengthscale_bounds[1]), std::log(opt.signal_bounds[1]), std::log(opt.noise_bounds[1])};
        auto project = [&](P p) {
            for (int i = 0; i < 3; ++i)
                p[i] = std::clamp(p[i], lo[i], hi[i]);
            return p;
        };
        auto to_params = [](const P& p) { return KernelParams{std::exp(p[0]), std::exp(p[1]), std::max(noise_floor, std::exp(p[2]))}; };
        auto objective = [&](const P& p) { return -weighted_log_marginal_likelihood(x, y, w, to_params(p)); };

        P best_point = project({std::log(0.1), 0.0, std::log(1e-2)});
        double best_value = objective(best_point);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int r = 0; r < std::max(1, opt.restarts); ++r) {
            P start;
            if (r == 0)
                start = best_point;
            else
                for (int i = 0; i < 3; ++i)
                    start[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
            auto [point, value] = nelder_mead(objective, project, start, 0.5, opt.evaluations_per_restart);
            if (value < best_value) {
                best_value = value;
                best_point = point;
            }
        }
        return to_params(best_point);
    }

    template <typename F, typename Proj>
    static std::pair<std::array<double, 3>, double> nelder_mead(F&& f, Proj&& project, std::array<double, 3> start,
                                                                double step, int max_evals)
    {
        using P = std::array<double, 3>;
        std::array<P, 4> s;
        std::array<double, 4> v;
        s[0] = project(start);
        for (int i = 0; i < 3; ++i) {
            s[i + 1] = s[0];
            s[i + 1][i] += step;
            s[i + 1] = project(s[i + 1]);
            if (s[i + 1] == s[0]) {
                s[i + 1][i] -= step;
                s[i + 1] = project(s[i + 1]);
            }
        }
        int evals = 0;
        auto eval = [&](const P& p) {
            ++evals;
            double r = f(p);
            return std::isfinite(r) ? r : std::numeric_limits<double>::max();
        };
        for (int i = 0; i < 4; ++i)
            v[i] = eval(s[i]);
        auto combine = [&](const P& a, const P& b, double t) {
            P r;
            for (int i = 0; i < 3; ++i)
                r[i] = a[i] + t * (b[i] - a[i]);
            return project(r);
        };
        while (evals < max_evals) {
            std::array<int, 4> o{0, 1, 2, 3};
            std::sort(o.begin(), o.end(), [&](int a, int b) { return v[a] < v[b]; });
            const int best = o[0], worst = o[3], second = o[2];
            if (std::abs(v[worst] - v[best]) < 1e-8 * (1.0 + std::abs(v[best])))
                break;
            P centroid{0.0, 0.0, 0.0};
            for (int k = 0; k < 3; ++k)
                for (int i = 0; i < 3; ++i)
                    centroid[i] += s[o[k]][i] / 3.0;
            const P reflected = combine(centroid, s[worst], -1.0);
            const double fr = eval(reflected);
            if (fr < v[best]) {
                const P expanded = combine(centroid, s[worst], -2.0);
                const double fe = eval(expanded);
                if (fe < fr) {
                    s[worst] = expanded;
                    v[worst] = fe;
                }
                else {
                    s[worst] = reflected;
                    v[worst] = fr;
                }
            }
            else if (fr < v[second]) {
                s[worst] = reflected;
                v[worst] = fr;
            }
            else {
                const P contracted = combine(centroid, s[worst], 0.5);
                const double fc = eval(contracted);
                if (fc < v[worst]) {
                    s[worst] = contracted;
                    v[worst] = fc;
                }
                else {
                    for (int k = 1; k < 4; ++k) {
                        s[o[k]] = combine(s[best], s[o[k]], 0.5);
                        v[o[k]] = eval(s[o[k]]);
                    }
                }
            }
        }
        int arg = 0;
        for (int i = 1; i < 4; ++i)
            if (v[i] < v[arg])
                arg = i;
        return {s[arg], v[arg]};
    }

    std::vector<Vec2> x_;
    std::vector<double> y_raw_;
    std::vector<double> inv_counts_;
    Eigen::VectorXd y_;
    double y_mean_ = 0.0;
    double y_std_ = 1.0;
    bool degenerate_ = false;
    KernelParams params_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double log_likelihood_ = 0.0;
};

} // namespace jedi::gp
