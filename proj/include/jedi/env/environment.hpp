#pragma once

#include <jedi/common.hpp>
#include <jedi/env/episode.hpp>
#include <jedi/env/maze.hpp>
#include <jedi/env/policy.hpp>
#include <jedi/env/robot.hpp>
#include <jedi/env/synthetic.hpp>

#include <concepts>
#include <string>
#include <variant>

namespace jedi::env {

/// Anything that turns a genome into an EpisodeResult, deterministically and
/// without shared mutable state.
template <typename E>
concept Environment = requires(const E& e, const Genome& g) {
    { e.evaluate(g) } -> std::same_as<EpisodeResult>;
    { e.genome_dim() } -> std::convertible_to<Eigen::Index>;
};

struct MazeEnvironment {
    MazeSpec maze;
    PolicySpec policy;
    RobotModel robot;

    EpisodeResult evaluate(const Genome& g) const { return run_episode(g, maze, policy, robot); }
    Eigen::Index genome_dim() const { return policy.genome_length(); }
    std::string describe() const { return "maze:" + maze.name; }
};

struct SyntheticEnvironment {
    SyntheticTask task;

    EpisodeResult evaluate(const Genome& g) const { return evaluate_synthetic(g, task); }
    Eigen::Index genome_dim() const { return task.dim; }
    std::string describe() const { return to_string(task.kind) + ":" + std::to_string(task.dim); }
};

/// Runtime choice between the concrete environments.
class AnyEnvironment {
public:
    AnyEnvironment(MazeEnvironment m) : env_(std::move(m)) {}
    AnyEnvironment(SyntheticEnvironment s) : env_(std::move(s)) {}

    EpisodeResult evaluate(const Genome& g) const
    {
        return std::visit([&](const auto& e) { return e.evaluate(g); }, env_);
    }
    Eigen::Index genome_dim() const
    {
        return std::visit([](const auto& e) { return e.genome_dim(); }, env_);
    }
    std::string describe() const
    {
        return std::visit([](const auto& e) { return e.describe(); }, env_);
    }
    const MazeEnvironment* maze() const { return std::get_if<MazeEnvironment>(&env_); }

private:
    std::variant<MazeEnvironment, SyntheticEnvironment> env_;
};

static_assert(Environment<MazeEnvironment>);
static_assert(Environment<SyntheticEnvironment>);
static_assert(Environment<AnyEnvironment>);

} // namespace jedi::env
