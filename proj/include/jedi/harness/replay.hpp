#pragma once

#include <jedi/env/robot.hpp>
#include <jedi/harness/io.hpp>

#include <ostream>
#include <string>

namespace jedi::harness {

inline constexpr const char* trajectory_header =
    "step,x,y,heading,lidar_left,lidar_center,lidar_right,bump_left,bump_right,action_left,action_right";

/// Re-runs the episode and writes one row per visited state (initial state
/// included) followed by a '#' summary line.
inline env::EpisodeResult write_trajectory(std::ostream& out, const Genome& genome, const env::MazeSpec& maze,
                                           const env::PolicySpec& spec = {}, const env::RobotModel& model = {})
{
    using kv::format_number;
    if (genome.size() != spec.genome_length())
        throw ConfigError("genome has length " + std::to_string(genome.size()) + ", the maze policy expects "
                          + std::to_string(spec.genome_length()));
    out << trajectory_header << "\n";
    int step = 0;
    const auto result = env::run_episode(
        genome, maze, spec,
        [&](const env::RobotState& s, const env::Observation& obs, const Eigen::VectorXd& action) {
            out << step++ << ',' << format_number(s.position.x) << ',' << format_number(s.position.y) << ','
                << format_number(s.heading);
            for (int i = 0; i < 5; ++i)
                out << ',' << format_number(obs[i]);
            out << ',' << format_number(action[0]) << ',' << format_number(action[1]) << "\n";
        },
        model);
    out << "# fitness=" << format_number(result.fitness) << ",descriptor_x=" << format_number(result.descriptor.x)
        << ",descriptor_y=" << format_number(result.descriptor.y) << ",steps_used=" << result.steps_used
        << ",reached_target=" << (result.reached_target ? 1 : 0) << "\n";
    return result;
}

} // namespace jedi::harness
