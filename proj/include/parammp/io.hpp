#pragma once
// JSON problem and plan documents, sampled CSV export and SVG rendering.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parammp/config_space.hpp"
#include "parammp/error.hpp"
#include "parammp/path.hpp"
#include "parammp/planner.hpp"

namespace parammp::io {

using nlohmann::json;

inline constexpr const char* kFormatVersion = "1";

struct ProblemOptions {
    double snap_tolerance = 0.0;
    int samples_per_segment = 64;
    std::optional<std::uint64_t> seed;

    friend bool operator==(const ProblemOptions&, const ProblemOptions&) = default;
};

struct ProblemDocument {
    std::string version = kFormatVersion;
    std::optional<FrameMode> mode;
    ConfigurationQuery query;
    ProblemOptions options;

    friend bool operator==(const ProblemDocument&, const ProblemDocument&) = default;
};

inline std::optional<FrameMode> parse_mode(const std::string& text) {
    if (text == "fixed") return FrameMode::Fixed;
    if (text == "obstacle_pair" || text == "obstacle-pair") return FrameMode::ObstaclePair;
    return std::nullopt;
}

namespace detail {

/// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

/// `dim` of 0 skips the length check.
inline std::vector<Point> read_points(const json& value, const std::string& path, std::size_t dim,
                                      std::vector<std::string>& issues) {
    std::vector<Point> points;
    if (!value.is_array()) {
        issues.push_back(path + ": expected an array of points");
        return points;
    }
    for (std::size_t i = 0; i < value.size(); ++i) {
        const auto& item = value[i];
        const std::string where = path + "[" + std::to_string(i) + "]";
        if (!item.is_array()) {
            issues.push_back(where + ": expected an array of numbers");
            continue;
        }
        Point p;
        for (std::size_t k = 0; k < item.size(); ++k) {
            if (!item[k].is_number()) {
                issues.push_back(where + "[" + std::to_string(k) + "]: expected a number");
                continue;
            }
            p.push_back(item[k].get<double>());
        }
        if (dim != 0 && item.size() != dim)
            issues.push_back(where + ": expected " + std::to_string(dim) + " coordinates, got " +
                             std::to_string(item.size()));
        points.push_back(std::move(p));
    }
    return points;
}

inline json write_point(const Point& p) { return json(p); }

inline json write_points(const std::vector<Point>& points) {
    json out = json::array();
    for (const auto& p : points) out.push_back(write_point(p));
    return out;
}

inline void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& path,
                           std::vector<std::string>& issues) {
    for (auto it = object.begin(); it != object.end(); ++it)
        if (!allowed.count(it.key())) issues.push_back(path + it.key() + ": unknown field");
}

}  // namespace detail

/// Parses and validates a problem document. All problems found are reported
/// together through Error::issues().
inline ProblemDocument parse_problem(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        const std::string message =
            "syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what();
        throw Error(ErrorKind::Parse, message, {message});
    }

    std::vector<std::string> issues;
    ProblemDocument doc;
    if (!root.is_object()) {
        issues.push_back("document: expected a JSON object");
        throw Error(ErrorKind::Parse, "invalid problem document", issues);
    }
    detail::reject_unknown(root, {"version", "dim", "mode", "starts", "goals", "obstacles", "options"}, "", issues);

    if (!root.contains("version") || !root["version"].is_string())
        issues.push_back("version: required string");
    else
        doc.version = root["version"].get<std::string>();

    if (!root.contains("dim") || !root["dim"].is_number_integer() || root["dim"].get<long long>() < 2)
        issues.push_back("dim: required integer >= 2");
    else
        doc.query.dim = root["dim"].get<std::size_t>();

    if (root.contains("mode")) {
        if (!root["mode"].is_string() || !parse_mode(root["mode"].get<std::string>()))
            issues.push_back("mode: expected \"fixed\" or \"obstacle_pair\"");
        else
            doc.mode = parse_mode(root["mode"].get<std::string>());
    }

    for (const char* key : {"starts", "goals", "obstacles"})
        if (!root.contains(key)) issues.push_back(std::string(key) + ": required");
    if (root.contains("starts")) doc.query.starts = detail::read_points(root["starts"], "starts", doc.query.dim, issues);
    if (root.contains("goals")) doc.query.goals = detail::read_points(root["goals"], "goals", doc.query.dim, issues);
    if (root.contains("obstacles")) doc.query.obstacles = detail::read_points(root["obstacles"], "obstacles", doc.query.dim, issues);

    if (root.contains("options")) {
        const auto& options = root["options"];
        if (!options.is_object()) {
            issues.push_back("options: expected an object");
        } else {
            detail::reject_unknown(options, {"snap_tolerance", "samples_per_segment", "seed"}, "options.", issues);
            if (options.contains("snap_tolerance")) {
                if (!options["snap_tolerance"].is_number() || options["snap_tolerance"].get<double>() < 0.0)
                    issues.push_back("options.snap_tolerance: expected a non-negative number");
                else
                    doc.options.snap_tolerance = options["snap_tolerance"].get<double>();
            }
            if (options.contains("samples_per_segment")) {
                if (!options["samples_per_segment"].is_number_integer() ||
                    options["samples_per_segment"].get<long long>() < 2)
                    issues.push_back("options.samples_per_segment: expected an integer >= 2");
                else
                    doc.options.samples_per_segment = options["samples_per_segment"].get<int>();
            }
            if (options.contains("seed")) {
                if (!options["seed"].is_number_unsigned())
                    issues.push_back("options.seed: expected a non-negative integer");
                else
                    doc.options.seed = options["seed"].get<std::uint64_t>();
            }
        }
    }

    if (issues.empty()) {
        for (auto& issue : validation_issues(doc.query)) issues.push_back("query: " + issue);
        if (issues.empty() && doc.mode == FrameMode::ObstaclePair &&
            (doc.query.dim % 2 != 0 || doc.query.obstacle_count() < 2))
            issues.push_back("mode: obstacle_pair needs an even dim and at least two obstacles");
    }
    if (!issues.empty()) throw Error(ErrorKind::Validation, "invalid problem: " + join_issues(issues), issues);
    return doc;
}

inline std::string serialize_problem(const ProblemDocument& doc) {
    json root;
    root["version"] = doc.version;
    root["dim"] = doc.query.dim;
    if (doc.mode) root["mode"] = to_string(*doc.mode);
    root["starts"] = detail::write_points(doc.query.starts);
    root["goals"] = detail::write_points(doc.query.goals);
    root["obstacles"] = detail::write_points(doc.query.obstacles);
    json options;
    options["snap_tolerance"] = doc.options.snap_tolerance;
    options["samples_per_segment"] = doc.options.samples_per_segment;
    if (doc.options.seed) options["seed"] = *doc.options.seed;
    root["options"] = options;
    return root.dump(2);
}

// ---------------------------------------------------------------------------
// Plan documents

namespace detail {

inline json write_token(const Token& token) {
    json out;
    switch (token.kind) {
        case Token::Kind::Start: out = {{"kind", "start"}, {"robot", token.robot}}; break;
        case Token::Kind::Goal: out = {{"kind", "goal"}, {"robot", token.robot}}; break;
        case Token::Kind::Block: out = {{"kind", "block"}, {"obstacles", token.obstacles}}; break;
    }
    return out;
}

inline Token read_token(const json& value) {
    const auto kind = value.at("kind").get<std::string>();
    if (kind == "start") return start_token(value.at("robot").get<std::size_t>());
    if (kind == "goal") return goal_token(value.at("robot").get<std::size_t>());
    if (kind == "block") return block_token(value.at("obstacles").get<std::vector<std::size_t>>());
    throw Error(ErrorKind::Parse, "unknown token kind '" + kind + "'");
}

inline Time read_time(const json& value) {
    const auto text = value.get<std::string>();
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw Error(ErrorKind::Parse, "time '" + text + "' is not num/den");
    return Time(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
}

inline json write_segment(const PathSegment& s) {
    json out;
    out["t0"] = to_string(s.t0);
    out["t1"] = to_string(s.t1);
    if (const auto* line = std::get_if<Linear>(&s.shape)) {
        out["kind"] = "linear";
        out["p_start"] = write_point(line->from);
        out["p_end"] = write_point(line->to);
    } else {
        const auto& arc = std::get<Arc>(s.shape);
        out["kind"] = "arc";
        out["center"] = write_point(arc.center);
        out["radius"] = arc.radius;
        out["basis_u"] = write_point(arc.basis_u);
        out["basis_v"] = write_point(arc.basis_v);
        out["angle_start"] = arc.angle_start;
        out["angle_end"] = arc.angle_end;
    }
    return out;
}

inline PathSegment read_segment(const json& value) {
    PathSegment s{read_time(value.at("t0")), read_time(value.at("t1")), Linear{}};
    const auto kind = value.at("kind").get<std::string>();
    if (kind == "linear") {
        s.shape = Linear{value.at("p_start").get<Point>(), value.at("p_end").get<Point>()};
    } else if (kind == "arc") {
        s.shape = Arc{value.at("center").get<Point>(),      value.at("radius").get<double>(),
                      value.at("basis_u").get<Point>(),     value.at("basis_v").get<Point>(),
                      value.at("angle_start").get<double>(), value.at("angle_end").get<double>()};
    } else {
        throw Error(ErrorKind::Parse, "unknown segment kind '" + kind + "'");
    }
    return s;
}

}  // namespace detail

inline json plan_to_json(const PlanResult& result) {
    json root;
    root["version"] = kFormatVersion;
    root["mode"] = to_string(result.mode);
    root["dim"] = result.path.query.dim;
    root["region"] = {{"j", result.region.j}, {"t", result.region.t}, {"c", result.region.c}};
    root["domain_index"] = result.domain_index;
    root["swap_count"] = result.swap_count;
    root["desingularized"] = result.desingularized;
    root["frame"] = {{"e", result.frame.e}, {"e_perp", result.frame.e_perp}};
    json sigma = json::array(), sigma_prime = json::array();
    for (const auto& tok : result.ordering_pair.sigma) sigma.push_back(detail::write_token(tok));
    for (const auto& tok : result.ordering_pair.sigma_prime) sigma_prime.push_back(detail::write_token(tok));
    root["ordering"] = {{"sigma", sigma}, {"sigma_prime", sigma_prime}};
    root["starts"] = detail::write_points(result.path.query.starts);
    root["goals"] = detail::write_points(result.path.query.goals);
    root["obstacles"] = detail::write_points(result.path.query.obstacles);
    json robots = json::array();
    for (std::size_t r = 0; r < result.path.robots.size(); ++r) {
        json segments = json::array();
        for (const auto& s : result.path.robots[r]) segments.push_back(detail::write_segment(s));
        robots.push_back({{"robot", r}, {"segments", segments}});
    }
    root["robots"] = robots;
    return root;
}

inline std::string serialize_plan(const PlanResult& result) { return plan_to_json(result).dump(2); }

/// Inverse of serialize_plan.
inline PlanResult parse_plan(const std::string& text) {
    try {
        const json root = json::parse(text);
        PlanResult result;
        const auto mode = parse_mode(root.at("mode").get<std::string>());
        if (!mode) throw Error(ErrorKind::Parse, "unknown mode");
        result.mode = *mode;
        result.region = {root.at("region").at("j").get<int>(), root.at("region").at("t").get<int>(),
                         root.at("region").at("c").get<int>()};
        result.domain_index = root.at("domain_index").get<int>();
        result.swap_count = root.at("swap_count").get<std::size_t>();
        result.desingularized = root.at("desingularized").get<bool>();
        result.frame = {root.at("frame").at("e").get<Point>(), root.at("frame").at("e_perp").get<Point>(), result.mode};
        for (const auto& tok : root.at("ordering").at("sigma")) result.ordering_pair.sigma.push_back(detail::read_token(tok));
        for (const auto& tok : root.at("ordering").at("sigma_prime"))
            result.ordering_pair.sigma_prime.push_back(detail::read_token(tok));
        auto& q = result.path.query;
        q.dim = root.at("dim").get<std::size_t>();
        q.starts = root.at("starts").get<std::vector<Point>>();
        q.goals = root.at("goals").get<std::vector<Point>>();
        q.obstacles = root.at("obstacles").get<std::vector<Point>>();
        for (const auto& robot : root.at("robots")) {
            std::vector<PathSegment> segments;
            for (const auto& s : robot.at("segments")) segments.push_back(detail::read_segment(s));
            result.path.robots.push_back(std::move(segments));
        }
        check_path(result.path);
        return result;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("malformed plan document: ") + e.what());
    }
}

/// Rows "t,robot,x_1,...,x_d" at `samples_per_unit` + 1 evenly spaced instants.
inline std::string plan_csv(const PlanResult& result, int samples_per_unit = 256) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "t,robot";
    for (std::size_t k = 1; k <= result.path.query.dim; ++k) out << ",x_" << k;
    out << "\n";
    for (int s = 0; s <= samples_per_unit; ++s) {
        const double t = static_cast<double>(s) / samples_per_unit;
        const auto config = evaluate_path(result.path, t);
        for (std::size_t r = 0; r < config.robots.size(); ++r) {
            out << t << "," << r;
            for (double x : config.robots[r]) out << "," << x;
            out << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// SVG

/// Plane coordinates of a point: raw (x, y) for d = 2, else (e, e_perp) coordinates.
inline std::pair<double, double> plane_coordinates(const Point& p, const Frame& frame) {
    if (p.size() == 2) return {p[0], p[1]};
    return {dot(frame.e, p), dot(frame.e_perp, p)};
}

/// Per-robot polylines with `samples_per_segment` chords on every segment.
inline std::vector<std::vector<std::pair<double, double>>> trajectory_polylines(const PlanResult& result,
                                                                                int samples_per_segment) {
    std::vector<std::vector<std::pair<double, double>>> lines;
    for (const auto& segments : result.path.robots) {
        std::vector<std::pair<double, double>> line;
        for (const auto& s : segments) {
            const int pieces = is_stationary(s.shape) ? 1 : std::max(1, samples_per_segment);
            for (int k = line.empty() ? 0 : 1; k <= pieces; ++k)
                line.push_back(plane_coordinates(point_at(s.shape, static_cast<double>(k) / pieces), result.frame));
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

inline std::string render_svg(const PlanResult& result, int samples_per_segment = 32) {
    const auto lines = trajectory_polylines(result, samples_per_segment);
    std::vector<std::pair<double, double>> obstacles;
    for (const auto& o : result.path.query.obstacles) obstacles.push_back(plane_coordinates(o, result.frame));

    double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
    double max_x = -min_x, max_y = -min_x;
    auto extend = [&](const std::pair<double, double>& p) {
        min_x = std::min(min_x, p.first);
        max_x = std::max(max_x, p.first);
        min_y = std::min(min_y, p.second);
        max_y = std::max(max_y, p.second);
    };
    for (const auto& line : lines)
        for (const auto& p : line) extend(p);
    for (const auto& p : obstacles) extend(p);
    const double span = std::max({max_x - min_x, max_y - min_y, 1e-9});
    const double pad = 0.05 * span;
    const double marker = 0.015 * span;

    static constexpr const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    std::ostringstream out;
    out << std::setprecision(9);
    // y is flipped so the picture uses the usual mathematical orientation.
    auto X = [&](double x) { return x; };
    auto Y = [&](double y) { return -y; };
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << (min_x - pad) << " " << (-max_y - pad) << " "
        << (max_x - min_x + 2 * pad) << " " << (max_y - min_y + 2 * pad) << "\">\n";
    out << "  <title>domain c=" << result.domain_index << " (j=" << result.region.j << ", t=" << result.region.t
        << "), " << result.swap_count << " swaps</title>\n";
    for (std::size_t k = 0; k < obstacles.size(); ++k)
        out << "  <circle class=\"obstacle\" data-index=\"" << k << "\" cx=\"" << X(obstacles[k].first) << "\" cy=\""
            << Y(obstacles[k].second) << "\" r=\"" << marker << "\" fill=\"black\"/>\n";
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const char* colour = palette[r % 8];
        out << "  <polyline class=\"robot\" data-index=\"" << r << "\" fill=\"none\" stroke=\"" << colour
            << "\" stroke-width=\"" << marker / 2 << "\" points=\"";
        for (std::size_t k = 0; k < lines[r].size(); ++k)
            out << (k ? " " : "") << X(lines[r][k].first) << "," << Y(lines[r][k].second);
        out << "\"/>\n";
        const auto& s = lines[r].front();
        const auto& g = lines[r].back();
        out << "  <rect class=\"start\" data-index=\"" << r << "\" x=\"" << X(s.first) - marker << "\" y=\""
            << Y(s.second) - marker << "\" width=\"" << 2 * marker << "\" height=\"" << 2 * marker << "\" fill=\""
            << colour << "\"/>\n";
        out << "  <polygon class=\"goal\" data-index=\"" << r << "\" points=\"" << X(g.first) << ","
            << Y(g.second) - marker << " " << X(g.first) - marker << "," << Y(g.second) + marker << " "
            << X(g.first) + marker << "," << Y(g.second) + marker << "\" fill=\"" << colour << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace parammp::io
