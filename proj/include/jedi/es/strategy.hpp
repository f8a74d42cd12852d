#pragma once

#include <jedi/common.hpp>
#include <jedi/es/config.hpp>
#include <jedi/es/ranking.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace jedi::es {

/// Genomes from one ask() together with their scores (higher is better).
struct ScoredPopulation {
    std::vector<Genome> genomes;
    std::vector<double> scores;
};

/// Separable CMA-ES (Ros & Hansen 2008): diagonal covariance, cumulative
/// step-size adaptation.
struct SepCmaState {
    Eigen::VectorXd diag_cov;
    Eigen::VectorXd path_sigma;
    Eigen::VectorXd path_c;
};

/// LM-MA-ES (Loshchilov, Glasmachers & Beyer 2017): m direction vectors with
/// geometrically decaying learning rates.
struct LmMaState {
    std::vector<Eigen::VectorXd> directions;
    Eigen::VectorXd path_sigma;
};

/// Rank-based ES with an ask/tell interface. Every tell() must follow the
/// ask() whose samples it scores.
class EvolutionStrategy {
public:
    EvolutionStrategy(const EsConfig& config, const Genome& center, std::uint64_t seed)
        : EvolutionStrategy(config, center, derive_rng(seed, {0x6573u}))
    {
    }

    EvolutionStrategy(const EsConfig& config, const Genome& center, Rng rng)
        : config_(config), center_(center), sigma_(config.sigma_init), rng_(std::move(rng))
    {
        config_.validate();
        if (center.size() != config.dim)
            throw ConfigError("ES centre has length " + std::to_string(center.size()) + ", expected "
                              + std::to_string(config.dim));
        const int n = config.dim;
        mu_ = config.mu();
        weights_ = log_rank_weights(mu_);
        mueff_ = 1.0 / weights_.squaredNorm();
        chi_n_ = std::sqrt(static_cast<double>(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

        if (config.engine == Engine::sep_cma) {
            c_sigma_ = (mueff_ + 2.0) / (n + mueff_ + 5.0);
            d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff_ - 1.0) / (n + 1.0)) - 1.0) + c_sigma_;
            c_c_ = (4.0 + mueff_ / n) / (n + 4.0 + 2.0 * mueff_ / n);
            const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff_);
            const double cmu = std::min(1.0 - c1, 2.0 * (mueff_ - 2.0 + 1.0 / mueff_) / ((n + 2.0) * (n + 2.0) + mueff_));
            const double sep = (n + 2.0) / 3.0;
            c1_ = std::min(1.0, c1 * sep);
            cmu_ = std::max(0.0, std::min(1.0 - c1_, cmu * sep));
            state_ = SepCmaState{Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
        }
        else {
            const int lambda = config.population;
            // 2*lambda/n exceeds one in small dimensions; the update needs c in (0, 1].
            c_sigma_ = std::min(1.0, 2.0 * lambda / n);
            const int m = config.memory_vectors();
            LmMaState s;
            s.directions.assign(static_cast<std::size_t>(m), Eigen::VectorXd::Zero(n));
            s.path_sigma = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i) {
                c_d_.push_back(1.0 / (std::pow(1.5, i) * n));
                c_m_.push_back(std::min(1.0, lambda / (std::pow(4.0, i) * n)));
            }
            state_ = std::move(s);
        }
    }

    const EsConfig& config() const { return config_; }
    const Genome& center() const { return center_; }
    double sigma() const { return sigma_; }
    void set_sigma(double s) { sigma_ = s; }
    std::int64_t generation() const { return generation_; }
    int mu() const { return mu_; }
    const Eigen::VectorXd& weights() const { return weights_; }

    /// Diagonal of the sampling covariance (all ones for lm-ma, whose shape
    /// lives in its direction vectors).
    Eigen::VectorXd diag_cov() const
    {
        if (auto* s = std::get_if<SepCmaState>(&state_))
            return s->diag_cov;
        return Eigen::VectorXd::Ones(config_.dim);
    }
    const std::variant<SepCmaState, LmMaState>& state() const { return state_; }

    /// Draws a fresh population; only the RNG stream advances.
    const std::vector<Genome>& ask()
    {
        const int lambda = config_.population;
        const int n = config_.dim;
        std::normal_distribution<double> normal(0.0, 1.0);
        z_.assign(static_cast<std::size_t>(lambda), Eigen::VectorXd(n));
        steps_.assign(static_cast<std::size_t>(lambda), Eigen::VectorXd(n));
        samples_.assign(static_cast<std::size_t>(lambda), Genome(n));
        for (int k = 0; k < lambda; ++k) {
            auto& z = z_[static_cast<std::size_t>(k)];
            for (int i = 0; i < n; ++i)
                z[i] = normal(rng_);
            auto& d = steps_[static_cast<std::size_t>(k)];
            if (auto* s = std::get_if<SepCmaState>(&state_)) {
                d = s->diag_cov.cwiseSqrt().cwiseProduct(z);
            }
            else {
                auto& lm = std::get<LmMaState>(state_);
                d = z;
                const auto used = std::min<std::size_t>(static_cast<std::size_t>(generation_), lm.directions.size());
                for (std::size_t j = 0; j < used; ++j)
                    d = (1.0 - c_d_[j]) * d + c_d_[j] * lm.directions[j] * lm.directions[j].dot(d);
            }
            samples_[static_cast<std::size_t>(k)] = center_ + sigma_ * d;
        }
        pending_ = true;
        return samples_;
    }

    void tell(const ScoredPopulation& pop)
    {
        if (pop.genomes.size() != samples_.size())
            throw PreconditionError("tell() population size does not match the last ask()");
        for (std::size_t k = 0; k < samples_.size(); ++k)
            if (pop.genomes[k].size() != samples_[k].size() || pop.genomes[k] != samples_[k])
                throw PreconditionError("tell() genomes differ from the last ask()");
        tell(pop.scores);
    }

    /// Scores are in ask() order. Non-finite scores rank last.
    void tell(std::span<const double> scores)
    {
        if (!pending_)
            throw PreconditionError("tell() without a preceding ask()");
        if (scores.size() != samples_.size())
            throw PreconditionError("tell() got " + std::to_string(scores.size()) + " scores for "
                                    + std::to_string(samples_.size()) + " samples");
        pending_ = false;
        const auto order = rank_descending(scores);
        const int n = config_.dim;

        Eigen::VectorXd step_w = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd z_w = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < mu_; ++i) {
            const std::size_t k = order[static_cast<std::size_t>(i)];
            step_w += weights_[i] * steps_[k];
            z_w += weights_[i] * z_[k];
        }
        center_ += sigma_ * step_w;

        if (auto* s = std::get_if<SepCmaState>(&state_)) {
            s->path_sigma = (1.0 - c_sigma_) * s->path_sigma + std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mueff_) * z_w;
            const double ps_norm = s->path_sigma.norm();
            const double denom = std::sqrt(1.0 - std::pow(1.0 - c_sigma_, 2.0 * (generation_ + 1)));
            const bool h_sigma = ps_norm / denom < (1.4 + 2.0 / (n + 1.0)) * chi_n_;
            s->path_c = (1.0 - c_c_) * s->path_c
                        + (h_sigma ? std::sqrt(c_c_ * (2.0 - c_c_) * mueff_) : 0.0) * step_w;
            Eigen::VectorXd rank_mu = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < mu_; ++i)
                rank_mu += weights_[i] * steps_[order[static_cast<std::size_t>(i)]].cwiseAbs2();
            const double delta_h = h_sigma ? 0.0 : c_c_ * (2.0 - c_c_);
            s->diag_cov = (1.0 - c1_ - cmu_) * s->diag_cov + c1_ * (s->path_c.cwiseAbs2() + delta_h * s->diag_cov)
                          + cmu_ * rank_mu;
            s->diag_cov = s->diag_cov.cwiseMax(1e-300);
            sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));
        }
        else {
            auto& lm = std::get<LmMaState>(state_);
            lm.path_sigma = (1.0 - c_sigma_) * lm.path_sigma + std::sqrt(mueff_ * c_sigma_ * (2.0 - c_sigma_)) * z_w;
            for (std::size_t j = 0; j < lm.directions.size(); ++j)
                lm.directions[j] = (1.0 - c_m_[j]) * lm.directions[j]
                                   + std::sqrt(mueff_ * c_m_[j] * (2.0 - c_m_[j])) * z_w;
            sigma_ *= std::exp(0.5 * c_sigma_ * (lm.path_sigma.squaredNorm() / n - 1.0));
        }
        sigma_ = std::clamp(sigma_, 1e-300, 1e300);
        ++generation_;
    }

    bool awaiting_tell() const { return pending_; }

private:
    EsConfig config_;
    Genome center_;
    double sigma_;
    Rng rng_;
    std::int64_t generation_ = 0;

    int mu_ = 1;
    Eigen::VectorXd weights_;
    double mueff_ = 1.0;
    double chi_n_ = 1.0;
    double c_sigma_ = 0.0, d_sigma_ = 1.0, c_c_ = 0.0, c1_ = 0.0, cmu_ = 0.0;
    std::vector<double> c_d_, c_m_;
    std::variant<SepCmaState, LmMaState> state_;

    bool pending_ = false;
    std::vector<Eigen::VectorXd> z_;
    std::vector<Eigen::VectorXd> steps_;
    std::vector<Genome> samples_;
};

} // namespace jedi::es
