#pragma once
// Independent checks of planner output: Lipschitz-bounded separation
// certificates, stratum partition sweeps, continuity probes, query generators
// and an exact rational re-implementation of the classifier.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "parammp/config_space.hpp"
#include "parammp/error.hpp"
#include "parammp/path.hpp"
#include "parammp/planner.hpp"
#include "parammp/vec.hpp"

namespace parammp {

// ---------------------------------------------------------------------------
// Separation certificates

struct PairBound {
    enum class Kind { RobotRobot, RobotObstacle };
    Kind kind = Kind::RobotRobot;
    std::size_t first = 0;   // robot
    std::size_t second = 0;  // robot or obstacle
    double sampled_min = std::numeric_limits<double>::infinity();
    double certified_lower_bound = std::numeric_limits<double>::infinity();
};

struct SeparationCertificate {
    std::vector<PairBound> pairs;
    int samples_per_segment = 0;
    bool pass = false;

    [[nodiscard]] double min_certified() const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pairs) best = std::min(best, p.certified_lower_bound);
        return best;
    }
    [[nodiscard]] double min_sampled() const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pairs) best = std::min(best, p.sampled_min);
        return best;
    }
};

namespace detail {

struct Window {
    double t0, t1;
    const PathSegment* a;
    const PathSegment* b;  // nullptr for an obstacle
};

inline double speed(const PathSegment& s) { return length(s.shape) / to_double(s.t1 - s.t0); }

/// Lipschitz constant of the distance on a window. Two linear pieces move
/// affinely relative to each other, so their relative speed is exact.
inline double relative_speed(const PathSegment& a, const PathSegment* b) {
    const auto* la = std::get_if<Linear>(&a.shape);
    const auto* lb = b ? std::get_if<Linear>(&b->shape) : nullptr;
    if (la && (b == nullptr || lb)) {
        Point w = scaled(sub(la->to, la->from), 1.0 / to_double(a.t1 - a.t0));
        if (lb) w = sub(w, scaled(sub(lb->to, lb->from), 1.0 / to_double(b->t1 - b->t0)));
        return norm(w);
    }
    return speed(a) + (b ? speed(*b) : 0.0);
}

/// Intervals on which both tracks stay inside a single segment.
inline std::vector<Window> windows(const std::vector<PathSegment>& a, const std::vector<PathSegment>* b) {
    std::vector<Window> out;
    std::size_t i = 0, k = 0;
    Time cursor(0);
    while (i < a.size() && (b == nullptr || k < b->size())) {
        Time end = a[i].t1;
        if (b != nullptr) end = std::min(end, (*b)[k].t1);
        out.push_back({to_double(cursor), to_double(end), &a[i], b ? &(*b)[k] : nullptr});
        cursor = end;
        if (a[i].t1 == end) ++i;
        if (b != nullptr && (*b)[k].t1 == end) ++k;
    }
    return out;
}

inline void bound_pair(PairBound& bound, const std::vector<Window>& ws, const Point* fixed, int samples) {
    for (const auto& w : ws) {
        const double v = relative_speed(*w.a, w.b);
        const double h = (w.t1 - w.t0) / samples;
        double previous = 0.0;
        for (int s = 0; s <= samples; ++s) {
            const double t = s == samples ? w.t1 : w.t0 + s * h;
            const Point pa = segment_position(*w.a, t);
            const Point pb = w.b ? segment_position(*w.b, t) : *fixed;
            const double d = distance(pa, pb);
            bound.sampled_min = std::min(bound.sampled_min, d);
            if (s > 0) {
                // The distance is v-Lipschitz, so between two samples it stays above
                // (d_prev + d - v h) / 2, which never exceeds either sample.
                const double lower = std::min({(previous + d - v * h) / 2.0, previous, d});
                bound.certified_lower_bound = std::min(bound.certified_lower_bound, lower);
            }
            previous = d;
        }
    }
}

}  // namespace detail

/// Samples every segment window uniformly and certifies a lower bound on each
/// robot/robot and robot/obstacle distance. An unsafe path yields pass = false.
inline SeparationCertificate certify_separation(const PiecewisePath& path, int samples_per_segment = 64) {
    if (samples_per_segment < 2) fail(ErrorKind::Precondition, "samples_per_segment must be at least 2");
    SeparationCertificate cert;
    cert.samples_per_segment = samples_per_segment;
    const std::size_t n = path.robots.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            PairBound bound{PairBound::Kind::RobotRobot, i, k};
            detail::bound_pair(bound, detail::windows(path.robots[i], &path.robots[k]), nullptr, samples_per_segment);
            cert.pairs.push_back(bound);
        }
        const auto ws = detail::windows(path.robots[i], nullptr);
        for (std::size_t o = 0; o < path.query.obstacle_count(); ++o) {
            PairBound bound{PairBound::Kind::RobotObstacle, i, o};
            detail::bound_pair(bound, ws, &path.query.obstacles[o], samples_per_segment);
            cert.pairs.push_back(bound);
        }
    }
    cert.pass = std::all_of(cert.pairs.begin(), cert.pairs.end(),
                            [](const PairBound& p) { return p.certified_lower_bound > 0.0; });
    return cert;
}

/// Largest endpoint error of a path against its query's starts and goals.
inline double endpoint_error(const PiecewisePath& path) {
    const auto begin = evaluate_path(path, 0.0);
    const auto end = evaluate_path(path, 1.0);
    double worst = 0.0;
    for (std::size_t r = 0; r < path.robots.size(); ++r) {
        worst = std::max(worst, distance(begin.robots[r], path.query.starts[r]));
        worst = std::max(worst, distance(end.robots[r], path.query.goals[r]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Query generators

/// Uniform coordinates in [lo, hi]; resamples until the query is valid.
template <class Rng>
ConfigurationQuery random_query(std::size_t n, std::size_t m, std::size_t dim, Rng& rng, double lo = -10.0,
                                double hi = 10.0) {
    std::uniform_real_distribution<double> coord(lo, hi);
    auto point = [&] {
        Point p(dim);
        for (auto& x : p) x = coord(rng);
        return p;
    };
    for (;;) {
        ConfigurationQuery q{dim, {}, {}, {}};
        for (std::size_t i = 0; i < n; ++i) q.starts.push_back(point());
        for (std::size_t i = 0; i < n; ++i) q.goals.push_back(point());
        for (std::size_t i = 0; i < m; ++i) q.obstacles.push_back(point());
        if (validation_issues(q).empty()) return q;
    }
}

/// Integer coordinates in [-radius, radius]: lots of coincident projections.
template <class Rng>
ConfigurationQuery lattice_query(std::size_t n, std::size_t m, std::size_t dim, Rng& rng, int radius = 2) {
    std::uniform_int_distribution<int> coord(-radius, radius);
    auto point = [&] {
        Point p(dim);
        for (auto& x : p) x = coord(rng);
        return p;
    };
    for (;;) {
        ConfigurationQuery q{dim, {}, {}, {}};
        for (std::size_t i = 0; i < n; ++i) q.starts.push_back(point());
        for (std::size_t i = 0; i < n; ++i) q.goals.push_back(point());
        for (std::size_t i = 0; i < m; ++i) q.obstacles.push_back(point());
        if (validation_issues(q).empty()) return q;
    }
}

/// A query lying in stratum A_{j,t} for the frame of `mode`. Projections are
/// laid out on integers along the first axis; perpendicular coordinates keep
/// points distinct. ObstaclePair mode puts obstacles 0 and 1 on a line parallel
/// to the first axis, so the frame is axis-aligned and classification is exact.
template <class Rng>
ConfigurationQuery stratum_query(std::size_t n, std::size_t m, std::size_t dim, int j, int t, FrameMode mode,
                                 Rng& rng) {
    const int robots = static_cast<int>(2 * n);
    if (j < 0 || j > robots || t < 1 || t > static_cast<int>(m) || dim < 2)
        fail(ErrorKind::Precondition, "no such stratum");
    if (mode == FrameMode::ObstaclePair && t < 2) fail(ErrorKind::Precondition, "obstacle_pair strata need t >= 2");

    // t obstacle values and j robot-only values, interleaved at random.
    std::vector<int> kinds(static_cast<std::size_t>(t), 0);
    kinds.insert(kinds.end(), static_cast<std::size_t>(j), 1);
    std::shuffle(kinds.begin(), kinds.end(), rng);
    std::vector<double> obstacle_values, robot_values;
    for (std::size_t k = 0; k < kinds.size(); ++k)
        (kinds[k] == 0 ? obstacle_values : robot_values).push_back(static_cast<double>(2 * k) - 4.0);

    // Obstacle projections: each of the t values at least once.
    std::vector<double> obs(m);
    std::uniform_int_distribution<std::size_t> pick_obs(0, obstacle_values.size() - 1);
    for (std::size_t k = 0; k < m; ++k) obs[k] = k < obstacle_values.size() ? obstacle_values[k] : obstacle_values[pick_obs(rng)];
    if (mode == FrameMode::ObstaclePair) {
        // Obstacles 0 and 1 must differ with o_1 to the right of o_0.
        std::sort(obs.begin(), obs.begin() + std::min<std::ptrdiff_t>(2, static_cast<std::ptrdiff_t>(m)));
        std::shuffle(obs.begin() + 2, obs.end(), rng);
    } else {
        std::shuffle(obs.begin(), obs.end(), rng);
    }

    // Robot projections: each robot-only value at least once, the rest reuse obstacle values.
    std::vector<double> rob(static_cast<std::size_t>(robots));
    std::uniform_int_distribution<std::size_t> pick_any(0, obstacle_values.size() - 1);
    for (int k = 0; k < robots; ++k)
        rob[static_cast<std::size_t>(k)] = k < j ? robot_values[static_cast<std::size_t>(k)] : obstacle_values[pick_any(rng)];
    std::shuffle(rob.begin(), rob.end(), rng);

    std::uniform_real_distribution<double> offset(-0.25, 0.25);
    std::size_t serial = 0;
    auto make = [&](double along, double perp) {
        Point p(dim, 0.0);
        p[0] = along;
        p[1] = perp;
        for (std::size_t k = 2; k < dim; ++k) p[k] = offset(rng);
        return p;
    };
    // Distinct perpendicular coordinates for every point keep all points distinct.
    auto next_perp = [&] { return 1.0 + static_cast<double>(serial++) + offset(rng); };

    ConfigurationQuery q{dim, {}, {}, {}};
    for (std::size_t i = 0; i < n; ++i) q.starts.push_back(make(rob[i], next_perp()));
    for (std::size_t i = 0; i < n; ++i) q.goals.push_back(make(rob[n + i], next_perp()));
    const double shared = -1.0 - offset(rng);
    for (std::size_t k = 0; k < m; ++k) {
        const bool pair_member = mode == FrameMode::ObstaclePair && k < 2;
        Point o = make(obs[k], pair_member ? shared : next_perp());
        if (pair_member)
            for (std::size_t c = 2; c < dim; ++c) o[c] = 0.0;
        q.obstacles.push_back(std::move(o));
    }
    validate(q);
    return q;
}

/// Every (j, t) stratum reachable in `mode`, one constructed query each.
template <class Rng>
std::vector<ConfigurationQuery> stratum_suite(std::size_t n, std::size_t m, std::size_t dim, FrameMode mode, Rng& rng) {
    std::vector<ConfigurationQuery> suite;
    const int t_min = mode == FrameMode::ObstaclePair ? 2 : 1;
    for (int t = t_min; t <= static_cast<int>(m); ++t)
        for (int j = 0; j <= static_cast<int>(2 * n); ++j) suite.push_back(stratum_query(n, m, dim, j, t, mode, rng));
    return suite;
}

// ---------------------------------------------------------------------------
// Partition sweep

enum class Sampling { Continuous, Lattice };

struct PartitionReport {
    std::size_t trials = 0;
    std::size_t violations = 0;  // labels outside the admissible bounds
    std::map<int, std::size_t> histogram;  // domain index c -> count
};

inline PartitionReport check_partition(std::size_t n, std::size_t m, std::size_t dim, FrameMode mode,
                                       std::size_t trials, std::uint64_t seed,
                                       Sampling sampling = Sampling::Continuous) {
    std::mt19937_64 rng(seed);
    PartitionReport report;
    report.trials = trials;
    const int two_n = static_cast<int>(2 * n);
    const int mm = static_cast<int>(m);
    const int t_min = mode == FrameMode::ObstaclePair ? 2 : 1;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto q = sampling == Sampling::Continuous ? random_query(n, m, dim, rng) : lattice_query(n, m, dim, rng);
        if (mode == FrameMode::ObstaclePair && q.obstacles[0] == q.obstacles[1]) continue;
        const auto label = classify(q, make_frame(q, mode));
        const bool ok = label.j >= 0 && label.j <= two_n && label.t >= t_min && label.t <= mm &&
                        label.c == label.j + label.t && label.c >= t_min && label.c <= two_n + mm;
        if (!ok) ++report.violations;
        ++report.histogram[label.c];
    }
    return report;
}

// ---------------------------------------------------------------------------
// Continuity probe

/// query + eps * direction, point by point.
inline ConfigurationQuery perturbed(const ConfigurationQuery& query, const ConfigurationQuery& direction, double eps) {
    auto shift = [&](const std::vector<Point>& base, const std::vector<Point>& dir) {
        if (base.size() != dir.size()) fail(ErrorKind::DimensionMismatch, "direction does not match the query");
        std::vector<Point> out;
        for (std::size_t k = 0; k < base.size(); ++k) out.push_back(axpy(base[k], eps, dir[k]));
        return out;
    };
    return {query.dim, shift(query.starts, direction.starts), shift(query.goals, direction.goals),
            shift(query.obstacles, direction.obstacles)};
}

/// Sup over sampled times and robots of the displacement between two paths.
inline double sup_distance(const PiecewisePath& a, const PiecewisePath& b, int samples = 1024) {
    std::vector<double> times;
    for (int s = 0; s <= samples; ++s) times.push_back(static_cast<double>(s) / samples);
    for (const auto& t : breakpoints(a)) times.push_back(to_double(t));
    for (const auto& t : breakpoints(b)) times.push_back(to_double(t));
    double worst = 0.0;
    for (double t : times) {
        const auto ca = evaluate_path(a, t);
        const auto cb = evaluate_path(b, t);
        for (std::size_t r = 0; r < ca.robots.size(); ++r) worst = std::max(worst, distance(ca.robots[r], cb.robots[r]));
    }
    return worst;
}

/// Region identity used by the probe: the stratum label plus the orderings of
/// the generic pair the planner actually sorts.
struct RegionSignature {
    RegionLabel label;
    OrderingPair orderings;
    friend bool operator==(const RegionSignature&, const RegionSignature&) = default;
};

/// D(eps) for each eps: sup-distance between the plan of the query and the
/// plan of its perturbation. Throws Inconclusive if a perturbation leaves the
/// region of the unperturbed query.
inline std::vector<double> continuity_probe(const ConfigurationQuery& query, FrameMode mode,
                                            const ConfigurationQuery& direction, const std::vector<double>& epsilons,
                                            int samples = 1024) {
    const auto base = plan(query, mode);
    const RegionSignature reference{base.region, base.ordering_pair};
    std::vector<double> sup;
    for (double eps : epsilons) {
        const auto moved = perturbed(query, direction, eps);
        if (!validation_issues(moved).empty())
            throw Error(ErrorKind::Inconclusive, "perturbation produced an invalid query");
        const auto other = plan(moved, mode);
        if (!(RegionSignature{other.region, other.ordering_pair} == reference))
            throw Error(ErrorKind::Inconclusive, "perturbation by " + std::to_string(eps) + " crosses a region wall");
        sup.push_back(sup_distance(base.path, other.path, samples));
    }
    return sup;
}

// ---------------------------------------------------------------------------
// Exact rational classifier

using Rational = boost::multiprecision::cpp_rational;

struct RationalQuery {
    std::size_t dim = 0;
    std::vector<std::vector<Rational>> starts;
    std::vector<std::vector<Rational>> goals;
    std::vector<std::vector<Rational>> obstacles;
};

/// Exact value of "p/q", an integer, or a finite decimal such as "-1.25e-3".
inline Rational parse_rational(const std::string& text) {
    auto unsupported = [&] { return Error(ErrorKind::Unsupported, "not an exact rational: '" + text + "'"); };
    if (text.empty()) throw unsupported();
    const auto slash = text.find('/');
    auto parse_integer = [&](const std::string& s) {
        if (s.empty() || s == "-" || s == "+") throw unsupported();
        for (std::size_t k = 0; k < s.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(s[k])) && !(k == 0 && (s[k] == '-' || s[k] == '+')))
                throw unsupported();
        // cpp_int reads a leading 0 as octal, so strip zeros before converting.
        const bool negative = s[0] == '-';
        std::string digits = (s[0] == '-' || s[0] == '+') ? s.substr(1) : s;
        digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
        boost::multiprecision::cpp_int value(digits);
        return negative ? boost::multiprecision::cpp_int(-value) : value;
    };
    if (slash != std::string::npos) {
        const auto den = parse_integer(text.substr(slash + 1));
        if (den == 0) throw unsupported();
        return Rational(parse_integer(text.substr(0, slash)), den);
    }
    std::string mantissa = text;
    long exponent = 0;
    if (const auto e = text.find_first_of("eE"); e != std::string::npos) {
        mantissa = text.substr(0, e);
        const std::string exp_text = text.substr(e + 1);
        parse_integer(exp_text);
        exponent = std::stol(exp_text);
    }
    if (const auto dot = mantissa.find('.'); dot != std::string::npos) {
        exponent -= static_cast<long>(mantissa.size() - dot - 1);
        mantissa.erase(dot, 1);
    }
    Rational value(parse_integer(mantissa));
    boost::multiprecision::cpp_int ten_power = 1;
    for (long k = 0; k < std::labs(exponent); ++k) ten_power *= 10;
    return exponent >= 0 ? Rational(value * ten_power) : Rational(value / ten_power);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline ConfigurationQuery to_double_query(const RationalQuery& q) {
    auto convert = [](const std::vector<std::vector<Rational>>& points) {
        std::vector<Point> out;
        for (const auto& p : points) {
            Point x;
            for (const auto& c : p) x.push_back(to_double(c));
            out.push_back(std::move(x));
        }
        return out;
    };
    return {q.dim, convert(q.starts), convert(q.goals), convert(q.obstacles)};
}

/// Classification by exact rational dot products. ObstaclePair mode projects on
/// the unnormalised direction o_1 - o_0, which orders points the same way.
inline RegionLabel classify_oracle(const RationalQuery& query, FrameMode mode) {
    validate(to_double_query(query));
    std::vector<Rational> direction(query.dim, Rational(0));
    if (mode == FrameMode::Fixed) {
        direction[0] = 1;
    } else {
        if (query.dim % 2 != 0 || query.obstacles.size() < 2)
            fail(ErrorKind::ModeUnsupported, "obstacle_pair mode needs even dim and two obstacles");
        for (std::size_t k = 0; k < query.dim; ++k) direction[k] = query.obstacles[1][k] - query.obstacles[0][k];
    }
    auto proj = [&](const std::vector<Rational>& p) {
        Rational s = 0;
        for (std::size_t k = 0; k < query.dim; ++k) s += direction[k] * p[k];
        return s;
    };
    std::vector<Rational> obstacle_values, all_values;
    for (const auto& p : query.obstacles) obstacle_values.push_back(proj(p));
    all_values = obstacle_values;
    for (const auto& p : query.starts) all_values.push_back(proj(p));
    for (const auto& p : query.goals) all_values.push_back(proj(p));
    auto distinct = [](std::vector<Rational> v) {
        std::sort(v.begin(), v.end());
        return static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
    };
    const int t = distinct(obstacle_values);
    return make_label(distinct(all_values) - t, t);
}

}  // namespace parammp
