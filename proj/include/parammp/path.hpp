#pragma once
// Exact trajectory representation: per-robot lists of linear segments and
// circular arcs over global time [0, 1] with rational breakpoints.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <boost/rational.hpp>

#include "parammp/config_space.hpp"
#include "parammp/error.hpp"
#include "parammp/vec.hpp"

namespace parammp {

using Time = boost::rational<std::int64_t>;

inline double to_double(const Time& t) { return boost::rational_cast<double>(t); }

inline std::string to_string(const Time& t) {
    return std::to_string(t.numerator()) + "/" + std::to_string(t.denominator());
}

struct Linear {
    Point from;
    Point to;

    friend bool operator==(const Linear&, const Linear&) = default;
};

/// center + radius * (cos(theta) * basis_u + sin(theta) * basis_v), with theta
/// running uniformly from angle_start to angle_end.
struct Arc {
    Point center;
    double radius = 0.0;
    Point basis_u;
    Point basis_v;
    double angle_start = 0.0;
    double angle_end = 0.0;

    friend bool operator==(const Arc&, const Arc&) = default;
};

using Shape = std::variant<Linear, Arc>;

/// cos/sin that are exact at multiples of pi/2, so that half-turn arcs land
/// precisely on their closed-form endpoints.
inline std::pair<double, double> unit_circle(double theta) {
    const double quarter = theta / (std::numbers::pi / 2.0);
    const double nearest = std::round(quarter);
    if (std::abs(quarter - nearest) < 1e-14) {
        switch (((static_cast<long long>(nearest) % 4) + 4) % 4) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    return {std::cos(theta), std::sin(theta)};
}

inline Point arc_point(const Arc& arc, double theta) {
    const auto [c, s] = unit_circle(theta);
    Point p = axpy(arc.center, arc.radius * c, arc.basis_u);
    return axpy(p, arc.radius * s, arc.basis_v);
}

/// Position at local parameter u in [0, 1].
inline Point point_at(const Shape& shape, double u) {
    if (const auto* line = std::get_if<Linear>(&shape)) {
        if (u <= 0.0) return line->from;
        if (u >= 1.0) return line->to;
        return lerp(line->from, line->to, u);
    }
    const auto& arc = std::get<Arc>(shape);
    if (u <= 0.0) return arc_point(arc, arc.angle_start);
    if (u >= 1.0) return arc_point(arc, arc.angle_end);
    return arc_point(arc, arc.angle_start + u * (arc.angle_end - arc.angle_start));
}

inline Point start_point(const Shape& shape) { return point_at(shape, 0.0); }
inline Point end_point(const Shape& shape) { return point_at(shape, 1.0); }

/// Geometric length; a bound on distance travelled per unit local parameter.
inline double length(const Shape& shape) {
    if (const auto* line = std::get_if<Linear>(&shape)) return distance(line->from, line->to);
    const auto& arc = std::get<Arc>(shape);
    return arc.radius * std::abs(arc.angle_end - arc.angle_start);
}

/// Same trace traversed backwards.
inline Shape reversed(const Shape& shape) {
    if (const auto* line = std::get_if<Linear>(&shape)) return Linear{line->to, line->from};
    Arc arc = std::get<Arc>(shape);
    std::swap(arc.angle_start, arc.angle_end);
    return arc;
}

inline Shape stationary(const Point& p) { return Linear{p, p}; }

inline bool is_stationary(const Shape& shape) {
    const auto* line = std::get_if<Linear>(&shape);
    return line != nullptr && line->from == line->to;
}

struct PathSegment {
    Time t0;
    Time t1;
    Shape shape;

    friend bool operator==(const PathSegment&, const PathSegment&) = default;
};

/// Fibrewise path: robots follow their segment lists while the obstacles of
/// `query` stay where they are.
struct PiecewisePath {
    ConfigurationQuery query;
    std::vector<std::vector<PathSegment>> robots;

    [[nodiscard]] const std::vector<Point>& obstacles() const noexcept { return query.obstacles; }

    friend bool operator==(const PiecewisePath&, const PiecewisePath&) = default;
};

/// Robot positions at one instant plus the (unchanged) obstacles.
struct Configuration {
    std::vector<Point> robots;
    std::vector<Point> obstacles;

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

inline Point segment_position(const PathSegment& segment, double t) {
    const double t0 = to_double(segment.t0);
    const double t1 = to_double(segment.t1);
    return point_at(segment.shape, (t - t0) / (t1 - t0));
}

inline Point robot_position(const std::vector<PathSegment>& segments, double t) {
    // First segment whose right end reaches t; boundary instants use the left segment.
    auto it = std::lower_bound(segments.begin(), segments.end(), t,
                               [](const PathSegment& s, double value) { return to_double(s.t1) < value; });
    if (it == segments.end()) it = std::prev(segments.end());
    return segment_position(*it, t);
}

inline Configuration evaluate_path(const PiecewisePath& path, double t) {
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::OutOfRange, "path time must lie in [0, 1]");
    Configuration config;
    config.robots.reserve(path.robots.size());
    for (const auto& segments : path.robots) config.robots.push_back(robot_position(segments, t));
    config.obstacles = path.query.obstacles;
    return config;
}

inline constexpr double kJoinTolerance = 1e-9;

/// Throws a consistency error unless each robot's segments tile [0, 1], join
/// continuously and connect its start to its goal.
inline void check_path(const PiecewisePath& path) {
    if (path.robots.size() != path.query.robot_count())
        fail(ErrorKind::Consistency, "path has " + std::to_string(path.robots.size()) + " robot tracks for " +
                                         std::to_string(path.query.robot_count()) + " robots");
    for (std::size_t r = 0; r < path.robots.size(); ++r) {
        const auto& segments = path.robots[r];
        const std::string who = "robot " + std::to_string(r);
        if (segments.empty()) fail(ErrorKind::Consistency, who + " has no segments");
        if (segments.front().t0 != Time(0) || segments.back().t1 != Time(1))
            fail(ErrorKind::Consistency, who + " segments do not span [0, 1]");
        for (std::size_t k = 0; k < segments.size(); ++k) {
            if (!(segments[k].t0 < segments[k].t1)) fail(ErrorKind::Consistency, who + " has an empty segment");
            if (k > 0) {
                if (segments[k].t0 != segments[k - 1].t1)
                    fail(ErrorKind::Consistency, who + " segments leave a gap or overlap");
                if (distance(end_point(segments[k - 1].shape), start_point(segments[k].shape)) > kJoinTolerance)
                    fail(ErrorKind::Consistency, who + " jumps at t = " + to_string(segments[k].t0));
            }
        }
        if (distance(start_point(segments.front().shape), path.query.starts[r]) > kJoinTolerance)
            fail(ErrorKind::Consistency, who + " does not begin at its start");
        if (distance(end_point(segments.back().shape), path.query.goals[r]) > kJoinTolerance)
            fail(ErrorKind::Consistency, who + " does not end at its goal");
    }
}

/// Sorted, de-duplicated segment breakpoints over all robots.
inline std::vector<Time> breakpoints(const PiecewisePath& path) {
    std::vector<Time> times;
    for (const auto& segments : path.robots)
        for (const auto& s : segments) {
            times.push_back(s.t0);
            times.push_back(s.t1);
        }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

}  // namespace parammp
