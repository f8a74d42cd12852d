#pragma once

#include <jedi/archive/repertoire.hpp>
#include <jedi/common.hpp>
#include <jedi/env/environment.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace jedi::algo {

struct MetricsRow {
    std::int64_t evaluations = 0;
    double best_fitness = -std::numeric_limits<double>::infinity();
    double coverage = 0.0;
    std::optional<double> alpha;
    std::optional<std::int64_t> loop;
    std::int64_t wall_ms = 0; // not part of the deterministic record
};

struct RunResult {
    std::vector<MetricsRow> rows;
    archive::Repertoire repertoire;
    Genome best_genome;
    env::EpisodeResult best_result{-std::numeric_limits<double>::infinity(), {}, 0, false};
    std::int64_t evaluations = 0;
    std::int64_t restarts = 0; ///< restart-ES only
};

/// Evaluates genomes[i] into slot i on up to `workers` threads.
template <env::Environment E>
std::vector<env::EpisodeResult> evaluate_batch(const E& environment, const std::vector<const Genome*>& genomes,
                                               unsigned workers)
{
    std::vector<env::EpisodeResult> out(genomes.size());
    parallel_for(genomes.size(), workers, [&](std::size_t i) { out[i] = environment.evaluate(*genomes[i]); });
    return out;
}

/// Running bookkeeping shared by every method: evaluation count, best-ever
/// solution, the metrics rows and the repertoire.
class Recorder {
public:
    explicit Recorder(archive::Centroids centroids)
        : result_{{}, archive::Repertoire(std::move(centroids)), {}, {}, 0, 0}, start_(std::chrono::steady_clock::now())
    {
    }

    /// Counts one rollout and updates the best-ever solution (strict improvement).
    void note(const Genome& g, const env::EpisodeResult& r)
    {
        ++result_.evaluations;
        if (std::isfinite(r.fitness) && (result_.best_genome.size() == 0 || r.fitness > result_.best_result.fitness)) {
            result_.best_genome = g;
            result_.best_result = r;
        }
    }

    void archive(const Genome& g, const env::EpisodeResult& r) { result_.repertoire.add(g, r.fitness, r.descriptor); }

    void row(std::optional<double> alpha = std::nullopt, std::optional<std::int64_t> loop = std::nullopt)
    {
        MetricsRow m;
        m.evaluations = result_.evaluations;
        m.best_fitness = result_.best_result.fitness;
        m.coverage = result_.repertoire.coverage();
        m.alpha = alpha;
        m.loop = loop;
        m.wall_ms = elapsed_ms();
        if (!result_.rows.empty() && result_.rows.back().evaluations == m.evaluations) {
            result_.rows.back() = m;
            return;
        }
        result_.rows.push_back(m);
    }

    /// Refreshes the latest row's coverage after a deferred archive flush.
    void refresh_coverage()
    {
        if (!result_.rows.empty()) {
            result_.rows.back().coverage = result_.repertoire.coverage();
            result_.rows.back().wall_ms = elapsed_ms();
        }
    }

    /// Appends a closing row unless the last one already reflects the end state.
    void finish()
    {
        if (result_.rows.empty() || result_.rows.back().evaluations != result_.evaluations)
            row();
        else
            refresh_coverage();
    }

    std::int64_t evaluations() const { return result_.evaluations; }
    const archive::Repertoire& repertoire() const { return result_.repertoire; }
    const RunResult& result() const { return result_; }
    RunResult take() { return std::move(result_); }

private:
    std::int64_t elapsed_ms() const
    {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
    }

    RunResult result_;
    std::chrono::steady_clock::time_point start_;
};

// Stream tags for derive_rng.
inline constexpr std::uint64_t tag_init = 0x696e6974;
inline constexpr std::uint64_t tag_targets = 0x74677473;
inline constexpr std::uint64_t tag_gp = 0x67707374;
inline constexpr std::uint64_t tag_es = 0x65737374;
inline constexpr std::uint64_t tag_map_elites = 0x6d656c74;
inline constexpr std::uint64_t tag_restart = 0x72737472;

} // namespace jedi::algo
