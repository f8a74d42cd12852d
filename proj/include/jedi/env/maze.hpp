#pragma once

#include <jedi/common.hpp>
#include <jedi/env/geometry.hpp>
#include <jedi/kv_format.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace jedi::env {

struct Pose {
    Vec2 position;
    double heading = 0.0;
};

/// A maze in unit-square coordinates. Border walls are ordinary walls.
struct MazeSpec {
    std::string name;
    std::vector<Segment> walls;
    Pose start;
    Vec2 target_center;
    double target_radius = 0.05;
    double robot_radius = 0.015;
    int max_steps = 250;
    double distance_scale = 100.0;
    /// When set, validate() requires the start-to-target line to cross a wall.
    bool deceptive = false;
};

inline bool in_unit_square(Vec2 p) { return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0; }

inline double nearest_wall_distance(const MazeSpec& maze, Vec2 p)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& w : maze.walls)
        best = std::min(best, point_segment_distance(p, w));
    return best;
}

inline bool line_of_sight_blocked(const MazeSpec& maze)
{
    const Segment direct{maze.start.position, maze.target_center};
    for (const auto& w : maze.walls)
        if (segments_intersect(direct, w))
            return true;
    return false;
}

inline void validate(const MazeSpec& maze)
{
    auto fail = [&](const std::string& what) {
        throw ConfigError("maze '" + maze.name + "': " + what);
    };
    for (std::size_t i = 0; i < maze.walls.size(); ++i)
        if (!in_unit_square(maze.walls[i].a) || !in_unit_square(maze.walls[i].b))
            fail("wall " + std::to_string(i) + " leaves the unit square");
    if (!in_unit_square(maze.start.position))
        fail("start outside the unit square");
    if (!in_unit_square(maze.target_center))
        fail("target outside the unit square");
    if (!(maze.target_radius > 0.0))
        fail("target_radius must be > 0");
    if (!(maze.robot_radius > 0.0))
        fail("robot_radius must be > 0");
    if (maze.max_steps < 1)
        fail("max_steps must be >= 1");
    if (!std::isfinite(maze.start.heading))
        fail("heading must be finite");
    if (nearest_wall_distance(maze, maze.start.position) < maze.robot_radius)
        fail("start is closer than robot_radius to a wall");
    if (maze.deceptive && !line_of_sight_blocked(maze))
        fail("marked deceptive but the straight line from start to target crosses no wall");
}

inline MazeSpec parse_maze(const kv::Document& doc, const std::string& where)
{
    kv::SectionReader root(&doc.root(), "");
    root.finish();

    const kv::Section* sec = doc.section("maze");
    if (!sec)
        throw ConfigError(where + ": missing [maze] section");
    for (const auto& s : doc.sections)
        if (!s.name.empty() && s.name != "maze" && !(s.repeated && s.name == "wall"))
            throw ConfigError(where + ": unknown section [" + s.name + "]");

    MazeSpec m;
    kv::SectionReader r(sec, "maze");
    m.name = r.string("name").value_or("");
    auto point = [&](std::string_view key) {
        auto v = r.require(r.numbers(key), key);
        if (v.size() != 2)
            throw r.error(key, "expected [x, y]");
        return Vec2{v[0], v[1]};
    };
    m.start.position = point("start");
    m.start.heading = r.number("heading").value_or(0.0);
    m.target_center = point("target");
    m.target_radius = r.number("target_radius").value_or(m.target_radius);
    m.robot_radius = r.number("robot_radius").value_or(m.robot_radius);
    m.max_steps = static_cast<int>(r.integer("max_steps").value_or(m.max_steps));
    m.distance_scale = r.number("distance_scale").value_or(m.distance_scale);
    m.deceptive = r.boolean("deceptive").value_or(false);
    r.finish();

    for (const kv::Section* w : doc.repeated("wall")) {
        kv::SectionReader wr(w, "wall");
        Segment s{{wr.require(wr.number("x1"), "x1"), wr.require(wr.number("y1"), "y1")},
                  {wr.require(wr.number("x2"), "x2"), wr.require(wr.number("y2"), "y2")}};
        wr.finish();
        m.walls.push_back(s);
    }
    validate(m);
    return m;
}

inline MazeSpec load_maze(const std::string& path) { return parse_maze(kv::parse_file(path), path); }

inline std::string format_maze(const MazeSpec& m)
{
    using kv::format_number;
    std::ostringstream out;
    out << "[maze]\n";
    out << "name = " << kv::quote(m.name) << "\n";
    out << "start = [" << format_number(m.start.position.x) << ", " << format_number(m.start.position.y) << "]\n";
    out << "heading = " << format_number(m.start.heading) << "\n";
    out << "target = [" << format_number(m.target_center.x) << ", " << format_number(m.target_center.y) << "]\n";
    out << "target_radius = " << format_number(m.target_radius) << "\n";
    out << "robot_radius = " << format_number(m.robot_radius) << "\n";
    out << "max_steps = " << m.max_steps << "\n";
    out << "distance_scale = " << format_number(m.distance_scale) << "\n";
    out << "deceptive = " << (m.deceptive ? "true" : "false") << "\n";
    for (const auto& w : m.walls) {
        out << "\n[[wall]]\n";
        out << "x1 = " << format_number(w.a.x) << "\ny1 = " << format_number(w.a.y) << "\n";
        out << "x2 = " << format_number(w.b.x) << "\ny2 = " << format_number(w.b.y) << "\n";
    }
    return out.str();
}

inline bool is_border_wall(const Segment& w)
{
    auto on = [](double a, double b, double v) { return a == v && b == v; };
    return on(w.a.x, w.b.x, 0.0) || on(w.a.x, w.b.x, 1.0) || on(w.a.y, w.b.y, 0.0) || on(w.a.y, w.b.y, 1.0);
}

/// Tiles four half-scale copies of `base` around the centre of the unit square,
/// mirrored so each copy's (0, 0) corner meets at the centre where the robot
/// starts. The copies' outer borders become the new border; their borders
/// through the corner become dividers that stay open within `opening`
/// (base units) of the centre. Only the (+x, +y) copy keeps the target.
inline MazeSpec make_quad_maze(const MazeSpec& base, double opening = 0.3)
{
    MazeSpec q = base;
    q.name = base.name + "-quad";
    q.walls.clear();
    q.walls.push_back({{0.0, 0.0}, {1.0, 0.0}});
    q.walls.push_back({{1.0, 0.0}, {1.0, 1.0}});
    q.walls.push_back({{1.0, 1.0}, {0.0, 1.0}});
    q.walls.push_back({{0.0, 1.0}, {0.0, 0.0}});
    for (int sx : {1, -1})
        for (int sy : {1, -1}) {
            auto map = [&](Vec2 p) { return Vec2{0.5 + 0.5 * sx * p.x, 0.5 + 0.5 * sy * p.y}; };
            for (const auto& w : base.walls) {
                if (!is_border_wall(w)) {
                    q.walls.push_back({map(w.a), map(w.b)});
                    continue;
                }
                // Dividers along the copy's x = 0 and y = 0 borders.
                if (w.a.x == 0.0 && w.b.x == 0.0) {
                    const double lo = std::max(std::min(w.a.y, w.b.y), opening), hi = std::max(w.a.y, w.b.y);
                    if (hi > lo)
                        q.walls.push_back({map({0.0, lo}), map({0.0, hi})});
                }
                else if (w.a.y == 0.0 && w.b.y == 0.0) {
                    const double lo = std::max(std::min(w.a.x, w.b.x), opening), hi = std::max(w.a.x, w.b.x);
                    if (hi > lo)
                        q.walls.push_back({map({lo, 0.0}), map({hi, 0.0})});
                }
            }
        }
    std::vector<Segment> unique;
    for (const auto& w : q.walls)
        if (std::none_of(unique.begin(), unique.end(), [&](const Segment& u) {
                return u == w || (u.a == w.b && u.b == w.a);
            }))
            unique.push_back(w);
    q.walls = std::move(unique);
    q.start = Pose{{0.5, 0.5}, base.start.heading};
    q.target_center = Vec2{0.5 + 0.5 * base.target_center.x, 0.5 + 0.5 * base.target_center.y};
    q.deceptive = line_of_sight_blocked(q);
    validate(q);
    return q;
}

} // namespace jedi::env
