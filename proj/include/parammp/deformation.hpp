#pragma once
// Elementary fibrewise motions (obstacles never move): the straight-line
// section, the two swapping deformations, desingularization and the
// three-thirds composition of a deformation with an inner section.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "parammp/config_space.hpp"
#include "parammp/error.hpp"
#include "parammp/path.hpp"
#include "parammp/vec.hpp"

namespace parammp {

struct Motion {
    std::size_t robot = 0;
    Shape shape;

    friend bool operator==(const Motion&, const Motion&) = default;
};

/// Over local time [t0, t1] each listed robot follows its shape; the others hold still.
struct Stage {
    Time t0;
    Time t1;
    std::vector<Motion> motions;

    friend bool operator==(const Stage&, const Stage&) = default;
};

/// A fibrewise deformation of a (start, goal) pair. `start_side` moves the
/// start configuration, `goal_side` the goal configuration; both run over
/// local time [0, 1] and an empty side is the identity.
struct Deformation {
    std::vector<Stage> start_side;
    std::vector<Stage> goal_side;

    [[nodiscard]] bool is_identity() const noexcept { return start_side.empty() && goal_side.empty(); }

    friend bool operator==(const Deformation&, const Deformation&) = default;
};

namespace detail {

inline std::vector<Point> evaluate_side(const std::vector<Stage>& stages, std::vector<Point> positions, double t) {
    for (const auto& stage : stages) {
        const double t0 = to_double(stage.t0);
        const double t1 = to_double(stage.t1);
        if (t >= t1) {
            for (const auto& m : stage.motions) positions.at(m.robot) = end_point(m.shape);
        } else {
            if (t > t0)
                for (const auto& m : stage.motions) positions.at(m.robot) = point_at(m.shape, (t - t0) / (t1 - t0));
            break;
        }
    }
    return positions;
}

/// Three stages at local thirds, used by both swapping deformations.
inline std::vector<Stage> thirds(std::vector<Motion> first, std::vector<Motion> second, std::vector<Motion> third) {
    return {{Time(0), Time(1, 3), std::move(first)},
            {Time(1, 3), Time(2, 3), std::move(second)},
            {Time(2, 3), Time(1), std::move(third)}};
}

}  // namespace detail

/// Configuration of the deformed pair at local time t; obstacles are copied unchanged.
inline ConfigurationQuery evaluate_deformation(const Deformation& h, const ConfigurationQuery& query, double t) {
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::OutOfRange, "deformation time must lie in [0, 1]");
    ConfigurationQuery out = query;
    out.starts = detail::evaluate_side(h.start_side, query.starts, t);
    out.goals = detail::evaluate_side(h.goal_side, query.goals, t);
    return out;
}

/// Runs the pieces one after another, each on an equal share of local time.
inline Deformation concatenate(const std::vector<Deformation>& pieces) {
    Deformation out;
    const auto count = static_cast<std::int64_t>(pieces.size());
    for (std::int64_t k = 0; k < count; ++k) {
        auto rescale = [&](const std::vector<Stage>& stages, std::vector<Stage>& into) {
            for (const auto& s : stages) into.push_back({(Time(k) + s.t0) / count, (Time(k) + s.t1) / count, s.motions});
        };
        rescale(pieces[static_cast<std::size_t>(k)].start_side, out.start_side);
        rescale(pieces[static_cast<std::size_t>(k)].goal_side, out.goal_side);
    }
    return out;
}

/// Straight-line motion from every start to its goal. Collision-free because
/// the start and goal orderings agree.
inline PiecewisePath affine_section(const ConfigurationQuery& query, const Frame& frame, double snap = 0.0) {
    const auto pair = orderings(query, frame, snap);
    if (!same_pattern(pair.sigma, pair.sigma_prime))
        fail(ErrorKind::NotApplicable, "start and goal orderings differ; the straight-line section does not apply");
    PiecewisePath path{query, {}};
    for (std::size_t i = 0; i < query.robot_count(); ++i)
        path.robots.push_back({PathSegment{Time(0), Time(1), Linear{query.starts[i], query.goals[i]}}});
    return path;
}

/// Exchanges two robots whose projections are adjacent (left < right): both
/// drop onto the frame line, turn half a circle about their midpoint in
/// opposite directions, then rise to each other's original positions.
inline Deformation swap_case_a(const ConfigurationQuery& query, const Frame& frame, std::size_t left,
                               std::size_t right, double snap = 0.0) {
    const std::size_t n = query.robot_count();
    if (left >= n || right >= n || left == right) fail(ErrorKind::Precondition, "case A needs two distinct robots");
    const auto p = detail::projections(query, frame);
    const double qa = p.starts[left];
    const double qb = p.starts[right];
    if (!(qa < qb - snap))
        fail(ErrorKind::Precondition, "case A needs robot " + std::to_string(left) + " strictly left of robot " +
                                          std::to_string(right));
    auto inside = [&](double v) { return v >= qa - snap && v <= qb + snap; };
    for (std::size_t k = 0; k < n; ++k)
        if (k != left && k != right && inside(p.starts[k]))
            fail(ErrorKind::Precondition, "robot " + std::to_string(k) + " projects between the swapped robots");
    for (std::size_t k = 0; k < query.obstacle_count(); ++k)
        if (inside(p.obstacles[k]))
            fail(ErrorKind::Precondition, "obstacle " + std::to_string(k) + " projects between the swapped robots");

    const Point a = scaled(frame.e, qa);
    const Point b = scaled(frame.e, qb);
    const Point mid = lerp(a, b, 0.5);
    const double r = (qb - qa) / 2.0;
    const double pi = std::numbers::pi;
    Arc left_arc{mid, r, frame.e, frame.e_perp, pi, 2.0 * pi};
    Arc right_arc{mid, r, frame.e, frame.e_perp, 0.0, pi};

    Deformation h;
    h.start_side = detail::thirds(
        {{left, Linear{query.starts[left], a}}, {right, Linear{query.starts[right], b}}},
        {{left, left_arc}, {right, right_arc}},
        {{left, Linear{b, query.starts[right]}}, {right, Linear{a, query.starts[left]}}});
    return h;
}

/// Moves robot `robot` across the obstacle block containing `obstacle`: it
/// drops onto the line through the obstacle parallel to e, slides to distance
/// eta/2, then half-circles the obstacle to the far side. `side` is the side of
/// the obstacle the robot starts on.
inline Deformation swap_case_b(const ConfigurationQuery& query, const Frame& frame, std::size_t robot,
                               std::size_t obstacle, Side side, double snap = 0.0) {
    const double eta = clearance_eta(query, frame, robot, obstacle, side, snap);
    if (!(eta > 0.0) || !std::isfinite(eta)) fail(ErrorKind::Precondition, "clearance is not positive");
    const Point& z = query.starts[robot];
    const Point& o = query.obstacles[obstacle];
    const double qz = project(z, frame);
    const double qo = project(o, frame);

    // Robot on the right travels towards -e; the left case is its reflection along e.
    const Point toward = side == Side::Right ? frame.e : scaled(frame.e, -1.0);
    const Point on_line = axpy(o, qz - qo, frame.e);
    const Point near = axpy(o, eta / 2.0, toward);
    Arc around{o, eta / 2.0, toward, frame.e_perp, 0.0, std::numbers::pi};

    Deformation h;
    h.start_side = detail::thirds({{robot, Linear{z, on_line}}}, {{robot, Linear{on_line, near}}}, {{robot, around}});
    return h;
}

/// Smallest positive projection gap used to split coincidences: the min_gap
/// families plus start/goal gaps, so that the shifted pair is fully generic.
inline double desingularization_gap(const ConfigurationQuery& query, const Frame& frame, double snap = 0.0) {
    double gap = min_gap(query, frame, snap);
    for (const auto& z : query.starts)
        for (const auto& g : query.goals) {
            const double d = std::abs(project(z, frame) - project(g, frame));
            if (d > snap) gap = std::min(gap, d);
        }
    return gap;
}

/// Shifts start i by i*M/(2n+1) and goal i by (n+i)*M/(2n+1) along e
/// (1-based i), which makes every robot projection distinct.
inline Deformation desingularize(const ConfigurationQuery& query, const Frame& frame, double snap = 0.0) {
    validate(query);
    const std::size_t n = query.robot_count();
    const double gap = desingularization_gap(query, frame, snap);
    const double unit = gap / static_cast<double>(2 * n + 1);
    Deformation h;
    Stage starts{Time(0), Time(1), {}};
    Stage goals{Time(0), Time(1), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const double start_shift = static_cast<double>(i + 1) * unit;
        const double goal_shift = static_cast<double>(n + i + 1) * unit;
        starts.motions.push_back({i, Linear{query.starts[i], axpy(query.starts[i], start_shift, frame.e)}});
        goals.motions.push_back({i, Linear{query.goals[i], axpy(query.goals[i], goal_shift, frame.e)}});
    }
    h.start_side.push_back(std::move(starts));
    h.goal_side.push_back(std::move(goals));
    return h;
}

namespace detail {

/// Segments over global [offset, offset + span] playing `stages` forward (or
/// backward), with stationary fillers so every robot is covered.
inline void append_side(std::vector<std::vector<PathSegment>>& tracks, const std::vector<Stage>& stages,
                        const std::vector<Point>& initial, const Time& offset, const Time& span, bool backward) {
    const std::size_t n = initial.size();
    struct Piece {
        Time t0, t1;
        Shape shape;
    };
    std::vector<std::vector<Piece>> local(n);
    std::vector<Point> current = initial;
    Time cursor(0);
    auto hold_until = [&](const Time& until) {
        if (cursor < until)
            for (std::size_t r = 0; r < n; ++r) local[r].push_back({cursor, until, stationary(current[r])});
        cursor = until;
    };
    for (const auto& stage : stages) {
        hold_until(stage.t0);
        std::vector<bool> moved(n, false);
        for (const auto& m : stage.motions) {
            if (m.robot >= n) fail(ErrorKind::Consistency, "deformation moves an unknown robot");
            if (distance(start_point(m.shape), current[m.robot]) > kJoinTolerance)
                fail(ErrorKind::Consistency, "deformation stages do not chain for robot " + std::to_string(m.robot));
            local[m.robot].push_back({stage.t0, stage.t1, m.shape});
            moved[m.robot] = true;
        }
        for (std::size_t r = 0; r < n; ++r)
            if (!moved[r]) local[r].push_back({stage.t0, stage.t1, stationary(current[r])});
        for (const auto& m : stage.motions) current[m.robot] = end_point(m.shape);
        cursor = stage.t1;
    }
    hold_until(Time(1));

    for (std::size_t r = 0; r < n; ++r) {
        if (backward) {
            for (auto it = local[r].rbegin(); it != local[r].rend(); ++it)
                tracks[r].push_back({offset + (Time(1) - it->t1) * span, offset + (Time(1) - it->t0) * span,
                                     reversed(it->shape)});
        } else {
            for (const auto& piece : local[r])
                tracks[r].push_back({offset + piece.t0 * span, offset + piece.t1 * span, piece.shape});
        }
    }
}

}  // namespace detail

/// Path for `query`: the start side of `h` over [0, 1/3], the inner section of
/// the deformed pair over [1/3, 2/3], and the goal side of `h` run backwards
/// over [2/3, 1].
template <class InnerSection>
PiecewisePath compose_with_section(const ConfigurationQuery& query, const Deformation& h, InnerSection&& inner) {
    const ConfigurationQuery deformed = evaluate_deformation(h, query, 1.0);
    const PiecewisePath inner_path = inner(deformed);
    const std::size_t n = query.robot_count();
    if (inner_path.robots.size() != n) fail(ErrorKind::Consistency, "inner section has the wrong number of robots");
    for (std::size_t r = 0; r < n; ++r) {
        if (distance(inner_path.query.starts[r], deformed.starts[r]) > kJoinTolerance ||
            distance(inner_path.query.goals[r], deformed.goals[r]) > kJoinTolerance)
            fail(ErrorKind::Consistency, "inner section was built for a different pair");
    }
    if (inner_path.query.obstacles != query.obstacles)
        fail(ErrorKind::Consistency, "inner section moved the obstacles");

    const Time third(1, 3);
    PiecewisePath out{query, std::vector<std::vector<PathSegment>>(n)};
    detail::append_side(out.robots, h.start_side, query.starts, Time(0), third, false);
    for (std::size_t r = 0; r < n; ++r)
        for (const auto& s : inner_path.robots[r]) out.robots[r].push_back({third + s.t0 * third, third + s.t1 * third, s.shape});
    detail::append_side(out.robots, h.goal_side, query.goals, Time(2, 3), third, true);
    check_path(out);
    return out;
}

}  // namespace parammp
