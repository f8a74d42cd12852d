#pragma once

#include <jedi/common.hpp>
#include <jedi/env/episode.hpp>
#include <jedi/env/geometry.hpp>
#include <jedi/env/maze.hpp>
#include <jedi/env/policy.hpp>

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <numbers>

namespace jedi::env {

/// Differential-drive kinematics and sensor constants. dt is one control tick.
struct RobotModel {
    double v_max = 0.02;
    double axle = 0.05;
    double dt = 1.0;
    double lidar_range = 0.3;
    std::array<double, 3> lidar_offsets = {-std::numbers::pi / 4.0, 0.0, std::numbers::pi / 4.0};
};

struct RobotState {
    Vec2 position;
    double heading = 0.0;
    int step_index = 0;
    // Contacts from the last move, reported in the next observation.
    bool bump_left = false;
    bool bump_right = false;
};

/// lidar[3] normalized to [0, 1] (1 = nothing within range), then bumpers[2].
using Observation = Eigen::Matrix<double, 5, 1>;

inline RobotState initial_state(const MazeSpec& maze) { return {maze.start.position, maze.start.heading, 0, false, false}; }

inline double lidar_cast(const RobotState& state, const MazeSpec& maze, double beam_angle_offset,
                         const RobotModel& model = {})
{
    const double angle = state.heading + beam_angle_offset;
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    double range = model.lidar_range;
    for (const auto& w : maze.walls)
        if (auto t = ray_segment_distance(state.position, dir, w))
            range = std::min(range, *t);
    return std::clamp(range, 0.0, model.lidar_range);
}

inline Observation observe(const RobotState& state, const MazeSpec& maze, const RobotModel& model = {})
{
    Observation obs;
    for (std::size_t i = 0; i < 3; ++i)
        obs[static_cast<Eigen::Index>(i)] = lidar_cast(state, maze, model.lidar_offsets[i], model) / model.lidar_range;
    obs[3] = state.bump_left ? 1.0 : 0.0;
    obs[4] = state.bump_right ? 1.0 : 0.0;
    return obs;
}

/// One control tick. Wheel commands are clamped to [-1, 1]. A move that would
/// bring the body within robot_radius of a wall stops at the first contact
/// (no sliding) and raises the bumper on the side of the contact.
inline RobotState maze_step(const RobotState& state, double left, double right, const MazeSpec& maze,
                            const RobotModel& model = {})
{
    left = std::clamp(left, -1.0, 1.0);
    right = std::clamp(right, -1.0, 1.0);
    const double v = 0.5 * (left + right) * model.v_max;
    const double omega = (right - left) / model.axle * model.v_max;

    RobotState next = state;
    next.step_index = state.step_index + 1;
    next.bump_left = next.bump_right = false;
    next.heading = wrap_angle(state.heading + omega * model.dt);

    const Vec2 delta = (v * model.dt) * Vec2{std::cos(next.heading), std::sin(next.heading)};
    if (delta.x == 0.0 && delta.y == 0.0)
        return next;

    const double r = maze.robot_radius;
    const double reach = r + delta.norm();
    double t_hit = 1.0;
    const Segment* hit = nullptr;
    for (const auto& w : maze.walls) {
        if (point_segment_distance(state.position, w) > reach)
            continue;
        if (auto t = disc_sweep_contact(state.position, delta, r, w); t && *t < t_hit) {
            t_hit = *t;
            hit = &w;
        }
    }
    Vec2 p = state.position + t_hit * delta;
    if (hit) {
        // Round-off can leave the disc a hair inside; back off until clear.
        double t = t_hit;
        for (int i = 0; i < 60 && nearest_wall_distance(maze, p) < r - 1e-12; ++i) {
            t *= 0.5;
            p = state.position + t * delta;
        }
        if (nearest_wall_distance(maze, p) < r - 1e-12)
            p = state.position;
        const Vec2 c = closest_point(p, *hit) - p;
        const double rel = wrap_angle(std::atan2(c.y, c.x) - next.heading);
        next.bump_left = rel >= 0.0;
        next.bump_right = rel <= 0.0;
    }
    next.position = {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)};
    return next;
}

/// Rolls out a policy until the target is reached or the step budget runs out.
/// `on_step(state, observation, action)` is called for every visited state,
/// including the terminal one, with the action the policy outputs there.
template <typename OnStep>
EpisodeResult run_episode(const Genome& genome, const MazeSpec& maze, const PolicySpec& spec, OnStep&& on_step,
                          const RobotModel& model = {})
{
    Policy policy(genome, spec);
    RobotState state = initial_state(maze);
    for (int k = 1; k <= maze.max_steps; ++k) {
        const Observation obs = observe(state, maze, model);
        const Eigen::VectorXd& action = policy.forward(obs);
        on_step(state, obs, action);
        state = maze_step(state, action[0], action[1], maze, model);
        if (distance(state.position, maze.target_center) <= maze.target_radius) {
            const Observation last = observe(state, maze, model);
            on_step(state, last, policy.forward(last));
            return {-static_cast<double>(k), state.position, k, true};
        }
    }
    const Observation last = observe(state, maze, model);
    on_step(state, last, policy.forward(last));
    const double d = distance(state.position, maze.target_center);
    return {-static_cast<double>(maze.max_steps) - maze.distance_scale * d, state.position, maze.max_steps, false};
}

inline EpisodeResult run_episode(const Genome& genome, const MazeSpec& maze, const PolicySpec& spec,
                                 const RobotModel& model = {})
{
    Policy policy(genome, spec);
    RobotState state = initial_state(maze);
    for (int k = 1; k <= maze.max_steps; ++k) {
        const Eigen::VectorXd& action = policy.forward(observe(state, maze, model));
        state = maze_step(state, action[0], action[1], maze, model);
        if (distance(state.position, maze.target_center) <= maze.target_radius)
            return {-static_cast<double>(k), state.position, k, true};
    }
    const double d = distance(state.position, maze.target_center);
    return {-static_cast<double>(maze.max_steps) - maze.distance_scale * d, state.position, maze.max_steps, false};
}

} // namespace jedi::env
