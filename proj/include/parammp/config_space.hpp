#pragma once
// Geometry of the robots-and-obstacles configuration space: projection frames,
// stratum classification, generalized orderings and the clearance functions
// that size the elementary motions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "parammp/error.hpp"
#include "parammp/vec.hpp"

namespace parammp {

/// Start and goal positions of n robots together with m stationary obstacles.
struct ConfigurationQuery {
    std::size_t dim = 0;
    std::vector<Point> starts;
    std::vector<Point> goals;
    std::vector<Point> obstacles;

    [[nodiscard]] std::size_t robot_count() const noexcept { return starts.size(); }
    [[nodiscard]] std::size_t obstacle_count() const noexcept { return obstacles.size(); }

    friend bool operator==(const ConfigurationQuery&, const ConfigurationQuery&) = default;
};

/// Every violated invariant of `query`, with the offending indices.
inline std::vector<std::string> validation_issues(const ConfigurationQuery& query) {
    std::vector<std::string> issues;
    if (query.dim < 2) issues.push_back("dim must be at least 2");
    if (query.starts.empty()) issues.push_back("at least one robot is required");
    if (query.obstacles.empty()) issues.push_back("at least one obstacle is required");
    if (query.starts.size() != query.goals.size()) {
        issues.push_back("starts and goals have different lengths (" + std::to_string(query.starts.size()) +
                         " vs " + std::to_string(query.goals.size()) + ")");
    }

    bool shapes_ok = true;
    auto check_shape = [&](const std::vector<Point>& points, const char* name) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].size() != query.dim) {
                issues.push_back(std::string(name) + " " + std::to_string(i) + " has " +
                                 std::to_string(points[i].size()) + " coordinates, expected " +
                                 std::to_string(query.dim));
                shapes_ok = false;
            }
            for (double x : points[i]) {
                if (!std::isfinite(x)) {
                    issues.push_back(std::string(name) + " " + std::to_string(i) + " has a non-finite coordinate");
                    shapes_ok = false;
                    break;
                }
            }
        }
    };
    check_shape(query.starts, "start");
    check_shape(query.goals, "goal");
    check_shape(query.obstacles, "obstacle");
    if (!shapes_ok) return issues;

    auto pairwise = [&](const std::vector<Point>& points, const char* name) {
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t k = i + 1; k < points.size(); ++k)
                if (points[i] == points[k])
                    issues.push_back(std::string(name) + "s " + std::to_string(i) + " and " + std::to_string(k) +
                                     " coincide");
    };
    pairwise(query.starts, "start");
    pairwise(query.goals, "goal");
    pairwise(query.obstacles, "obstacle");

    auto against_obstacles = [&](const std::vector<Point>& points, const char* name) {
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t k = 0; k < query.obstacles.size(); ++k)
                if (points[i] == query.obstacles[k])
                    issues.push_back(std::string(name) + " " + std::to_string(i) + " coincides with obstacle " +
                                     std::to_string(k));
    };
    against_obstacles(query.starts, "start");
    against_obstacles(query.goals, "goal");
    return issues;
}

inline void validate(const ConfigurationQuery& query) {
    auto issues = validation_issues(query);
    if (!issues.empty()) throw Error(ErrorKind::Validation, "invalid query: " + join_issues(issues), issues);
}

enum class FrameMode { Fixed, ObstaclePair };

inline const char* to_string(FrameMode mode) { return mode == FrameMode::Fixed ? "fixed" : "obstacle_pair"; }

/// Oriented projection line through the origin with direction `e`, plus the
/// orthogonal direction `e_perp` used for avoidance manoeuvres.
struct Frame {
    Point e;
    Point e_perp;
    FrameMode mode = FrameMode::Fixed;

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// tau(x_1, ..., x_d) = (-x_2, x_1, -x_4, x_3, ...): a unit tangent field on
/// the sphere for even d.
inline Point rotate_pairs(const Point& x) {
    Point r(x.size());
    for (std::size_t k = 0; k + 1 < x.size(); k += 2) {
        r[k] = -x[k + 1];
        r[k + 1] = x[k];
    }
    return r;
}

inline Frame make_frame(const ConfigurationQuery& query, FrameMode mode) {
    if (query.dim < 2) fail(ErrorKind::ModeUnsupported, "projection frames need dim >= 2");
    if (mode == FrameMode::Fixed) return {axis(query.dim, 0), axis(query.dim, 1), FrameMode::Fixed};

    if (query.dim % 2 != 0) fail(ErrorKind::ModeUnsupported, "obstacle_pair mode needs an even dimension");
    if (query.obstacles.size() < 2) fail(ErrorKind::ModeUnsupported, "obstacle_pair mode needs at least two obstacles");
    Point direction = sub(query.obstacles[1], query.obstacles[0]);
    const double length = norm(direction);
    if (length == 0.0) fail(ErrorKind::Validation, "obstacles 0 and 1 coincide");
    Point e = scaled(direction, 1.0 / length);
    Point e_perp = rotate_pairs(e);
    return {std::move(e), std::move(e_perp), FrameMode::ObstaclePair};
}

/// Coordinate of the orthogonal projection of `point` onto the frame line.
inline double project(const Point& point, const Frame& frame) {
    if (point.size() != frame.e.size()) fail(ErrorKind::DimensionMismatch, "point dimension does not match frame");
    return dot(frame.e, point);
}

struct RegionLabel {
    int j = 0;
    int t = 1;
    int c = 1;

    friend bool operator==(const RegionLabel&, const RegionLabel&) = default;
};

inline RegionLabel make_label(int j, int t) { return {j, t, j + t}; }

namespace detail {

/// Number of clusters after sorting, where neighbours closer than `snap` merge.
inline int count_distinct(std::vector<double> values, double snap) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    int count = 1;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] - values[k - 1] > snap) ++count;
    return count;
}

inline bool same_value(double a, double b, double snap) { return std::abs(a - b) <= snap; }

struct Projections {
    std::vector<double> starts;
    std::vector<double> goals;
    std::vector<double> obstacles;
};

inline Projections projections(const ConfigurationQuery& query, const Frame& frame) {
    Projections p;
    for (const auto& z : query.starts) p.starts.push_back(project(z, frame));
    for (const auto& z : query.goals) p.goals.push_back(project(z, frame));
    for (const auto& o : query.obstacles) p.obstacles.push_back(project(o, frame));
    return p;
}

}  // namespace detail

/// Stratum A_{j,t} of the query: t distinct obstacle projections and j + t
/// distinct projections overall.
inline RegionLabel classify(const ConfigurationQuery& query, const Frame& frame, double snap = 0.0) {
    validate(query);
    const auto p = detail::projections(query, frame);
    std::vector<double> all = p.starts;
    all.insert(all.end(), p.goals.begin(), p.goals.end());
    all.insert(all.end(), p.obstacles.begin(), p.obstacles.end());
    const int t = detail::count_distinct(p.obstacles, snap);
    const int total = detail::count_distinct(all, snap);
    return make_label(total - t, t);
}

/// One symbol of a generalized ordering.
struct Token {
    enum class Kind { Start, Goal, Block };
    Kind kind = Kind::Start;
    std::size_t robot = 0;               // Start / Goal
    std::vector<std::size_t> obstacles;  // Block, ascending indices

    [[nodiscard]] bool is_block() const noexcept { return kind == Kind::Block; }

    friend bool operator==(const Token&, const Token&) = default;
};

inline Token start_token(std::size_t robot) { return {Token::Kind::Start, robot, {}}; }
inline Token goal_token(std::size_t robot) { return {Token::Kind::Goal, robot, {}}; }
inline Token block_token(std::vector<std::size_t> obstacles) { return {Token::Kind::Block, 0, std::move(obstacles)}; }

inline std::string to_string(const Token& token) {
    switch (token.kind) {
        case Token::Kind::Start: return "R" + std::to_string(token.robot);
        case Token::Kind::Goal: return "G" + std::to_string(token.robot);
        case Token::Kind::Block: {
            std::string s = "O{";
            for (std::size_t k = 0; k < token.obstacles.size(); ++k) {
                if (k) s += ",";
                s += std::to_string(token.obstacles[k]);
            }
            return s + "}";
        }
    }
    return {};
}

/// Start-side ordering `sigma` and goal-side ordering `sigma_prime`.
struct OrderingPair {
    std::vector<Token> sigma;
    std::vector<Token> sigma_prime;

    friend bool operator==(const OrderingPair&, const OrderingPair&) = default;
};

/// True when both sequences list the same robots and blocks in the same order,
/// identifying Start(i) with Goal(i).
inline bool same_pattern(const std::vector<Token>& a, const std::vector<Token>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].is_block() != b[k].is_block()) return false;
        if (a[k].is_block() ? a[k].obstacles != b[k].obstacles : a[k].robot != b[k].robot) return false;
    }
    return true;
}

namespace detail {

/// Obstacle blocks sorted by projection; each block lists coincident indices.
inline std::vector<std::pair<double, std::vector<std::size_t>>> obstacle_blocks(const std::vector<double>& values,
                                                                                double snap) {
    std::vector<std::size_t> order(values.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::pair<double, std::vector<std::size_t>>> blocks;
    for (std::size_t idx : order) {
        if (!blocks.empty() && values[idx] - values[blocks.back().second.back()] <= snap)
            blocks.back().second.push_back(idx);
        else
            blocks.push_back({values[idx], {idx}});
    }
    for (auto& block : blocks) std::sort(block.second.begin(), block.second.end());
    return blocks;
}

inline std::vector<Token> sorted_tokens(const std::vector<double>& robots, Token::Kind kind,
                                        const std::vector<std::pair<double, std::vector<std::size_t>>>& blocks) {
    std::vector<std::pair<double, Token>> items;
    for (std::size_t i = 0; i < robots.size(); ++i) items.push_back({robots[i], Token{kind, i, {}}});
    for (const auto& [value, members] : blocks) items.push_back({value, block_token(members)});
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Token> tokens;
    tokens.reserve(items.size());
    for (auto& item : items) tokens.push_back(std::move(item.second));
    return tokens;
}

}  // namespace detail

/// Generalized orderings of a generic query (all robot projections distinct and
/// off the obstacle projections).
inline OrderingPair orderings(const ConfigurationQuery& query, const Frame& frame, double snap = 0.0) {
    const auto label = classify(query, frame, snap);
    if (label.j != 2 * static_cast<int>(query.robot_count()))
        fail(ErrorKind::NotGeneric, "query is not generic (j = " + std::to_string(label.j) + " < 2n)");
    const auto p = detail::projections(query, frame);
    const auto blocks = detail::obstacle_blocks(p.obstacles, snap);
    return {detail::sorted_tokens(p.starts, Token::Kind::Start, blocks),
            detail::sorted_tokens(p.goals, Token::Kind::Goal, blocks)};
}

/// Smallest strictly positive projection gap among start/start, goal/goal,
/// start/obstacle and goal/obstacle pairs; 1 when no such gap exists.
inline double min_gap(const ConfigurationQuery& query, const Frame& frame, double snap = 0.0) {
    const auto p = detail::projections(query, frame);
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](double a, double b) {
        const double gap = std::abs(a - b);
        if (gap > snap) best = std::min(best, gap);
    };
    for (std::size_t i = 0; i < p.starts.size(); ++i) {
        for (std::size_t k = i + 1; k < p.starts.size(); ++k) {
            consider(p.starts[i], p.starts[k]);
            consider(p.goals[i], p.goals[k]);
        }
        for (double o : p.obstacles) {
            consider(p.starts[i], o);
            consider(p.goals[i], o);
        }
    }
    return std::isfinite(best) ? best : 1.0;
}

/// Which side of the obstacle's projection the robot currently sits on.
enum class Side { Left, Right };

inline const char* to_string(Side side) { return side == Side::Left ? "left" : "right"; }

/// Clearance for circling obstacle `obstacle` with robot `robot`: bounded by the
/// nearest projection beyond the obstacle, the nearest obstacle sharing its
/// projection, and the robot's own projection distance.
inline double clearance_eta(const ConfigurationQuery& query, const Frame& frame, std::size_t robot,
                            std::size_t obstacle, Side side, double snap = 0.0) {
    if (robot >= query.robot_count() || obstacle >= query.obstacle_count())
        fail(ErrorKind::Precondition, "robot or obstacle index out of range");
    const auto p = detail::projections(query, frame);
    const double qz = p.starts[robot];
    const double qo = p.obstacles[obstacle];
    const bool robot_right = qz > qo + snap;
    const bool robot_left = qz < qo - snap;
    if ((side == Side::Right && !robot_right) || (side == Side::Left && !robot_left))
        fail(ErrorKind::Precondition, "robot " + std::to_string(robot) + " is not on the " + to_string(side) +
                                          " of obstacle " + std::to_string(obstacle));

    const double lo = std::min(qz, qo);
    const double hi = std::max(qz, qo);
    auto strictly_between = [&](double v) { return v > lo + snap && v < hi - snap; };
    for (std::size_t k = 0; k < p.starts.size(); ++k)
        if (k != robot && (strictly_between(p.starts[k]) || detail::same_value(p.starts[k], qz, snap)))
            fail(ErrorKind::Precondition, "robot " + std::to_string(robot) + " is not adjacent to obstacle " +
                                              std::to_string(obstacle));
    for (double v : p.obstacles)
        if (strictly_between(v) || detail::same_value(v, qz, snap))
            fail(ErrorKind::Precondition, "robot " + std::to_string(robot) + " is not adjacent to obstacle " +
                                              std::to_string(obstacle));

    double eta = std::abs(qz - qo);
    // Nearest projection strictly beyond the obstacle, on the side the robot heads to.
    auto beyond = [&](double v) { return side == Side::Right ? v < qo - snap : v > qo + snap; };
    auto visit = [&](double v) {
        if (beyond(v)) eta = std::min(eta, std::abs(qo - v));
    };
    for (double v : p.starts) visit(v);
    for (double v : p.goals) visit(v);
    for (double v : p.obstacles) visit(v);
    for (std::size_t k = 0; k < query.obstacle_count(); ++k)
        if (k != obstacle && detail::same_value(p.obstacles[k], qo, snap))
            eta = std::min(eta, distance(query.obstacles[k], query.obstacles[obstacle]));
    return eta;
}

/// Number of connected components of the generic stratum: ((n+m)!)^2 / m!.
inline boost::multiprecision::cpp_int component_count(unsigned n, unsigned m) {
    if (n < 1 || m < 1) fail(ErrorKind::Precondition, "component_count needs n >= 1 and m >= 1");
    using boost::multiprecision::cpp_int;
    cpp_int total = 1;
    for (unsigned k = 2; k <= n + m; ++k) total *= k;
    cpp_int obstacle_orders = 1;
    for (unsigned k = 2; k <= m; ++k) obstacle_orders *= k;
    return total * total / obstacle_orders;
}

}  // namespace parammp
