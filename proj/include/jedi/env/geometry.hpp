#pragma once

#include <jedi/common.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace jedi::env {

struct Segment {
    Vec2 a;
    Vec2 b;

    friend bool operator==(const Segment&, const Segment&) = default;
};

inline Vec2 closest_point(Vec2 p, const Segment& s)
{
    const Vec2 e = s.b - s.a;
    const double len2 = e.squared_norm();
    if (len2 == 0.0)
        return s.a;
    const double t = std::clamp((p - s.a).dot(e) / len2, 0.0, 1.0);
    return s.a + t * e;
}

inline double point_segment_distance(Vec2 p, const Segment& s) { return distance(p, closest_point(p, s)); }

/// Distance along the ray origin + t*dir (dir unit length, t >= 0) to the
/// segment, or nullopt when the ray misses it. Parallel rays never hit.
inline std::optional<double> ray_segment_distance(Vec2 origin, Vec2 dir, const Segment& s)
{
    const Vec2 e = s.b - s.a;
    const double denom = dir.cross(e);
    if (std::abs(denom) < 1e-15)
        return std::nullopt;
    const Vec2 ao = s.a - origin;
    const double t = ao.cross(e) / denom;
    const double u = ao.cross(dir) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0)
        return std::nullopt;
    return t;
}

inline bool segments_intersect(const Segment& p, const Segment& q)
{
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
        const double v = (b - a).cross(c - a);
        return (v > 0.0) - (v < 0.0);
    };
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y
               && c.y <= std::max(a.y, b.y);
    };
    const int o1 = orient(p.a, p.b, q.a), o2 = orient(p.a, p.b, q.b);
    const int o3 = orient(q.a, q.b, p.a), o4 = orient(q.a, q.b, p.b);
    if (o1 != o2 && o3 != o4)
        return true;
    return (o1 == 0 && on_segment(p.a, p.b, q.a)) || (o2 == 0 && on_segment(p.a, p.b, q.b))
           || (o3 == 0 && on_segment(q.a, q.b, p.a)) || (o4 == 0 && on_segment(q.a, q.b, p.b));
}

/// First t in [0, 1] at which a disc of the given radius moving from p by
/// delta touches the segment, or nullopt if it never does. A disc that already
/// touches and keeps approaching gets t = 0; one moving away is free.
inline std::optional<double> disc_sweep_contact(Vec2 p, Vec2 delta, double radius, const Segment& s)
{
    std::optional<double> best;
    auto consider = [&](double t) {
        if (t >= 0.0 && t <= 1.0 && (!best || t < *best))
            best = t;
    };

    // Endpoint caps.
    const double a = delta.squared_norm();
    if (a == 0.0)
        return std::nullopt;
    for (Vec2 e : {s.a, s.b}) {
        const Vec2 d = p - e;
        const double b = 2.0 * delta.dot(d);
        const double c = d.squared_norm() - radius * radius;
        if (c <= 0.0) {
            if (b < 0.0)
                consider(0.0);
            continue;
        }
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0 || b >= 0.0)
            continue;
        consider((-b - std::sqrt(disc)) / (2.0 * a));
    }

    // Flat sides.
    const Vec2 e = s.b - s.a;
    const double len = e.norm();
    if (len > 0.0) {
        const Vec2 u = (1.0 / len) * e;
        const Vec2 n{-u.y, u.x};
        const double s0 = (p - s.a).dot(n);
        const double ds = delta.dot(n);
        auto along = [&](double t) { return (p + t * delta - s.a).dot(u); };
        if (std::abs(s0) <= radius) {
            const double w0 = along(0.0);
            if (w0 >= 0.0 && w0 <= len && s0 * ds < 0.0)
                consider(0.0);
        }
        else if (s0 * ds < 0.0) {
            const double t = (std::abs(s0) - radius) / std::abs(ds);
            const double w = along(t);
            if (w >= 0.0 && w <= len)
                consider(t);
        }
    }
    return best;
}

inline double wrap_angle(double a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (a >= -std::numbers::pi && a < std::numbers::pi)
        return a;
    a = std::fmod(a + std::numbers::pi, two_pi);
    if (a < 0.0)
        a += two_pi;
    return a - std::numbers::pi;
}

} // namespace jedi::env
