#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "parammp/deformation.hpp"
#include "parammp/planner.hpp"
#include "parammp/verification.hpp"

using namespace parammp;

namespace {

Frame fixed2() { return {{1.0, 0.0}, {0.0, 1.0}, FrameMode::Fixed}; }

void expect_point_near(const Point& a, const Point& b, double tol) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], tol) << "coordinate " << k;
}

double min_separation(const ConfigurationQuery& c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.starts.size(); ++i) {
        for (std::size_t k = i + 1; k < c.starts.size(); ++k) best = std::min(best, distance(c.starts[i], c.starts[k]));
        for (const auto& o : c.obstacles) best = std::min(best, distance(c.starts[i], o));
    }
    return best;
}

// First pair of robots adjacent in the start ordering, if any.
std::optional<std::pair<std::size_t, std::size_t>> adjacent_robots(const ConfigurationQuery& q, const Frame& f) {
    const auto sigma = orderings(q, f).sigma;
    for (std::size_t k = 0; k + 1 < sigma.size(); ++k)
        if (!sigma[k].is_block() && !sigma[k + 1].is_block()) return std::make_pair(sigma[k].robot, sigma[k + 1].robot);
    return std::nullopt;
}

}  // namespace

TEST(AffineSection, IdentityQueryIsNotGeneric) {
    ConfigurationQuery q{2, {{0, 0}, {1, 3}}, {{0, 0}, {1, 3}}, {{5, 0}}};
    try {
        affine_section(q, fixed2());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotGeneric);
    }
}

TEST(AffineSection, EndpointsAreExact) {
    ConfigurationQuery q{2, {{0, 0}, {1, 3}}, {{0.5, 1}, {1.5, -3}}, {{5, 0}}};
    const auto path = affine_section(q, fixed2());
    EXPECT_EQ(evaluate_path(path, 0.0).robots, q.starts);
    EXPECT_EQ(evaluate_path(path, 1.0).robots, q.goals);
}

TEST(AffineSection, Midpoint) {
    ConfigurationQuery q{2, {{0, 0}}, {{2, 2}}, {{5, 0}}};
    const auto path = affine_section(q, fixed2());
    expect_point_near(evaluate_path(path, 0.5).robots[0], {1, 1}, 1e-15);
}

TEST(AffineSection, PreservesProjectionOrder) {
    ConfigurationQuery q{2, {{0, 0}, {1, 5}}, {{3, 2}, {7, -1}}, {{9, 0}}};
    const auto path = affine_section(q, fixed2());
    for (int s = 0; s <= 100; ++s) {
        const auto c = evaluate_path(path, s / 100.0);
        EXPECT_LT(c.robots[0][0], c.robots[1][0]);
    }
}

TEST(AffineSection, NotApplicableWhenOrderingsDiffer) {
    ConfigurationQuery q{2, {{0, 0}}, {{2, 0}}, {{1, 1}}};
    try {
        affine_section(q, fixed2());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotApplicable);
    }
}

TEST(SwapCaseA, WorkedExample) {
    ConfigurationQuery q{2, {{0, 5}, {2, 7}}, {{10, 0}, {11, 0}}, {{-5, 0}}};
    const auto h = swap_case_a(q, fixed2(), 0, 1);
    const auto mid = evaluate_deformation(h, q, 0.5);
    expect_point_near(mid.starts[0], {1, -1}, 1e-12);
    expect_point_near(mid.starts[1], {1, 1}, 1e-12);
    const auto end = evaluate_deformation(h, q, 1.0);
    EXPECT_EQ(end.starts[0], q.starts[1]);
    EXPECT_EQ(end.starts[1], q.starts[0]);
    EXPECT_EQ(end.goals, q.goals);
    EXPECT_EQ(end.obstacles, q.obstacles);
}

TEST(SwapCaseA, StageValuesMatchClosedForm) {
    ConfigurationQuery q{3, {{-1, 2, 3}, {4, -1, 1}}, {{10, 0, 0}, {11, 0, 0}}, {{-5, 0, 0}}};
    Frame f{{1, 0, 0}, {0, 1, 0}, FrameMode::Fixed};
    const auto h = swap_case_a(q, f, 0, 1);
    const Point a{-1, 0, 0}, b{4, 0, 0}, mid{1.5, 0, 0};
    const double r = 2.5;
    for (double t : {0.1, 0.2, 0.3}) {
        const auto c = evaluate_deformation(h, q, t);
        expect_point_near(c.starts[0], lerp(q.starts[0], a, 3 * t), 1e-12);
        expect_point_near(c.starts[1], lerp(q.starts[1], b, 3 * t), 1e-12);
    }
    for (double t : {0.4, 0.5, 0.6}) {
        const double theta = (3 * t - 1) * std::numbers::pi;
        const Point offset{r * std::cos(theta), r * std::sin(theta), 0};
        const auto c = evaluate_deformation(h, q, t);
        expect_point_near(c.starts[0], sub(mid, offset), 1e-12);
        expect_point_near(c.starts[1], add(mid, offset), 1e-12);
    }
    for (double t : {0.7, 0.8, 0.9}) {
        const auto c = evaluate_deformation(h, q, t);
        expect_point_near(c.starts[0], lerp(b, q.starts[1], 3 * t - 2), 1e-12);
        expect_point_near(c.starts[1], lerp(a, q.starts[0], 3 * t - 2), 1e-12);
    }
}

TEST(SwapCaseA, RandomAdmissibleInputsStaySeparated) {
    std::mt19937_64 rng(101);
    int checked = 0;
    while (checked < 1000) {
        const auto q = random_query(3, 2, 3, rng);
        const auto f = make_frame(q, FrameMode::Fixed);
        const auto pair = adjacent_robots(q, f);
        if (!pair) continue;
        ++checked;
        const auto h = swap_case_a(q, f, pair->first, pair->second);
        const double qa = project(q.starts[pair->first], f);
        const double qb = project(q.starts[pair->second], f);
        const double r = (qb - qa) / 2;
        for (int s = 0; s <= 1000; ++s) {
            const double t = s / 1000.0;
            const auto c = evaluate_deformation(h, q, t);
            ASSERT_GT(min_separation(c), 0.0);
            ASSERT_EQ(c.obstacles, q.obstacles);
            if (t >= 1.0 / 3 && t <= 2.0 / 3) {
                EXPECT_NEAR(distance(c.starts[pair->first], c.starts[pair->second]), 2 * r, 1e-9);
                for (auto robot : {pair->first, pair->second}) {
                    EXPECT_GE(project(c.starts[robot], f), qa - 1e-12);
                    EXPECT_LE(project(c.starts[robot], f), qb + 1e-12);
                }
            }
        }
        const auto end = evaluate_deformation(h, q, 1.0);
        auto sigma = orderings(q, f).sigma;
        const auto after = orderings(end, f).sigma;
        for (std::size_t k = 0; k + 1 < sigma.size(); ++k)
            if (!sigma[k].is_block() && sigma[k].robot == pair->first) {
                std::swap(sigma[k], sigma[k + 1]);
                break;
            }
        EXPECT_EQ(after, sigma);
    }
}

TEST(SwapCaseA, SwappingTwiceRestoresOrdering) {
    ConfigurationQuery q{2, {{0, 5}, {2, 7}}, {{10, 0}, {11, 0}}, {{-5, 0}}};
    const auto once = evaluate_deformation(swap_case_a(q, fixed2(), 0, 1), q, 1.0);
    const auto twice = evaluate_deformation(swap_case_a(once, fixed2(), 1, 0), once, 1.0);
    EXPECT_EQ(orderings(twice, fixed2()).sigma, orderings(q, fixed2()).sigma);
}

TEST(SwapCaseA, PreconditionErrors) {
    ConfigurationQuery q{2, {{0, 5}, {2, 7}}, {{10, 0}, {11, 0}}, {{1, 0}}};
    EXPECT_THROW(swap_case_a(q, fixed2(), 0, 1), Error);  // obstacle in between
    q.obstacles = {{-5, 0}};
    EXPECT_THROW(swap_case_a(q, fixed2(), 1, 0), Error);  // wrong order
    EXPECT_THROW(swap_case_a(q, fixed2(), 0, 0), Error);
}

TEST(SwapCaseB, WorkedExample) {
    ConfigurationQuery q{2, {{2, 3}}, {{-5, 4}}, {{0, 0}}};
    ASSERT_DOUBLE_EQ(clearance_eta(q, fixed2(), 0, 0, Side::Right), 2.0);
    const auto h = swap_case_b(q, fixed2(), 0, 0, Side::Right);
    expect_point_near(evaluate_deformation(h, q, 1.0 / 3).starts[0], {2, 0}, 1e-15);
    expect_point_near(evaluate_deformation(h, q, 2.0 / 3).starts[0], {1, 0}, 1e-15);
    expect_point_near(evaluate_deformation(h, q, 5.0 / 6).starts[0], {0, 1}, 1e-12);
    EXPECT_EQ(evaluate_deformation(h, q, 1.0).starts[0], (Point{-1, 0}));
}

TEST(SwapCaseB, MirroredSide) {
    ConfigurationQuery q{2, {{-2, 3}}, {{5, 4}}, {{0, 0}}};
    const auto h = swap_case_b(q, fixed2(), 0, 0, Side::Left);
    expect_point_near(evaluate_deformation(h, q, 2.0 / 3).starts[0], {-1, 0}, 1e-15);
    expect_point_near(evaluate_deformation(h, q, 5.0 / 6).starts[0], {0, 1}, 1e-12);
    EXPECT_EQ(evaluate_deformation(h, q, 1.0).starts[0], (Point{1, 0}));
    EXPECT_THROW(swap_case_b(q, fixed2(), 0, 0, Side::Right), Error);
}

TEST(SwapCaseB, RandomAdmissibleInputs) {
    std::mt19937_64 rng(202);
    int checked = 0;
    while (checked < 1000) {
        // Small coordinate range in one perpendicular axis makes coincident-projection blocks likely.
        auto q = random_query(2, 3, 3, rng);
        if (checked % 2 == 0) q.obstacles[1][0] = q.obstacles[0][0];
        if (!validation_issues(q).empty()) continue;
        const auto f = make_frame(q, FrameMode::Fixed);
        const auto sigma = orderings(q, f).sigma;
        std::optional<Swap> swap;
        for (std::size_t k = 0; k + 1 < sigma.size() && !swap; ++k) {
            if (!sigma[k].is_block() && sigma[k + 1].is_block())
                swap = Swap{Swap::Kind::CaseB, sigma[k].robot, 0, sigma[k + 1].obstacles, Side::Left};
            else if (sigma[k].is_block() && !sigma[k + 1].is_block())
                swap = Swap{Swap::Kind::CaseB, sigma[k + 1].robot, 0, sigma[k].obstacles, Side::Right};
        }
        if (!swap) continue;
        ++checked;
        const std::size_t j = block_representative(q.obstacles, swap->block);
        const double eta = clearance_eta(q, f, swap->robot, j, swap->side);
        const auto h = swap_case_b(q, f, swap->robot, j, swap->side);
        const double qz = project(q.starts[swap->robot], f);
        const double qo = project(q.obstacles[j], f);
        const double toward = swap->side == Side::Right ? 1.0 : -1.0;
        for (int s = 0; s <= 1000; ++s) {
            const double t = s / 1000.0;
            const auto c = evaluate_deformation(h, q, t);
            ASSERT_GT(min_separation(c), 0.0);
            ASSERT_EQ(c.obstacles, q.obstacles);
            const double qr = project(c.starts[swap->robot], f);
            EXPECT_GE(toward * (qr - qo), -eta / 2 - 1e-12);
            EXPECT_LE(toward * (qr - qo), toward * (qz - qo) + 1e-12);
            if (t >= 2.0 / 3) {
                EXPECT_NEAR(distance(c.starts[swap->robot], q.obstacles[j]), eta / 2, 1e-9);
                for (std::size_t k : swap->block)
                    EXPECT_GE(distance(c.starts[swap->robot], q.obstacles[k]), eta / 2 - 1e-9);
            }
        }
        const auto end = evaluate_deformation(h, q, 1.0);
        expect_point_near(end.starts[swap->robot], axpy(q.obstacles[j], -toward * eta / 2, f.e), 1e-12);
        EXPECT_EQ(classify(end, f).j, 4);
    }
}

TEST(Desingularize, SplitsCoincidences) {
    // n = 1: start and goal share the obstacle's projection.
    ConfigurationQuery q{2, {{0, 1}}, {{0, 2}}, {{0, -1}, {3, 0}}};
    const auto f = fixed2();
    const double m = min_gap(q, f);
    ASSERT_DOUBLE_EQ(m, 3.0);
    const auto h = desingularize(q, f);
    const auto end = evaluate_deformation(h, q, 1.0);
    expect_point_near(end.starts[0], {m / 3, 1}, 1e-15);
    expect_point_near(end.goals[0], {2 * m / 3, 2}, 1e-15);
    const auto before = classify(q, f);
    const auto after = classify(end, f);
    EXPECT_EQ(after.j, 2);
    EXPECT_EQ(after.t, before.t);
}

TEST(Desingularize, RandomDegenerateQueries) {
    std::mt19937_64 rng(303);
    int checked = 0;
    while (checked < 1000) {
        const std::size_t n = 1 + checked % 3;
        const auto q = lattice_query(n, 1 + checked % 3, 3, rng);
        const auto f = make_frame(q, FrameMode::Fixed);
        const auto before = classify(q, f);
        if (before.j == static_cast<int>(2 * n)) continue;
        ++checked;
        const auto h = desingularize(q, f);
        for (int s = 0; s <= 200; ++s) {
            const auto c = evaluate_deformation(h, q, s / 200.0);
            ASSERT_GT(min_separation(c), 0.0);
            ASSERT_EQ(c.obstacles, q.obstacles);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 1; k < 3; ++k) {
                    EXPECT_EQ(c.starts[i][k], q.starts[i][k]);
                    EXPECT_EQ(c.goals[i][k], q.goals[i][k]);
                }
        }
        const auto after = classify(evaluate_deformation(h, q, 1.0), f);
        EXPECT_EQ(after.j, static_cast<int>(2 * n));
        EXPECT_EQ(after.t, before.t);
    }
}

TEST(EvaluateDeformation, EndpointsAndRange) {
    ConfigurationQuery q{2, {{0, 5}, {2, 7}}, {{10, 0}, {11, 0}}, {{-5, 0}}};
    const auto h = swap_case_a(q, fixed2(), 0, 1);
    EXPECT_EQ(evaluate_deformation(h, q, 0.0), q);
    EXPECT_THROW(evaluate_deformation(h, q, 1.5), Error);
    EXPECT_THROW(evaluate_deformation(h, q, -0.1), Error);
}

TEST(Compose, IdentityDeformationRescalesInnerPath) {
    ConfigurationQuery q{2, {{0, 0}}, {{2, 2}}, {{5, 0}}};
    const auto inner = affine_section(q, fixed2());
    const auto path = compose_with_section(q, Deformation{}, [&](const ConfigurationQuery&) { return inner; });
    for (double t : {0.0, 0.1, 1.0 / 3}) EXPECT_EQ(evaluate_path(path, t).robots[0], q.starts[0]);
    for (double t : {2.0 / 3, 0.8, 1.0}) EXPECT_EQ(evaluate_path(path, t).robots[0], q.goals[0]);
    for (double u : {0.0, 0.25, 0.5, 0.75, 1.0})
        expect_point_near(evaluate_path(path, (1 + u) / 3).robots[0], evaluate_path(inner, u).robots[0], 1e-12);
}

TEST(Compose, BoundaryValueIsDeformedStart) {
    ConfigurationQuery q{2, {{0, 5}, {2, 7}}, {{11, 0}, {10, 0}}, {{-5, 0}}};
    const auto h = swap_case_a(q, fixed2(), 0, 1);
    const auto path = compose_with_section(q, h, [](const ConfigurationQuery& d) { return affine_section(d, fixed2()); });
    const auto deformed = evaluate_deformation(h, q, 1.0);
    EXPECT_EQ(evaluate_path(path, 1.0 / 3).robots, deformed.starts);
    EXPECT_EQ(evaluate_path(path, 0.0).robots, q.starts);
    EXPECT_EQ(evaluate_path(path, 1.0).robots, q.goals);
}

TEST(Compose, NestedThirdsBoundaries) {
    // Start side swaps robots 0/1, goal side swaps goals 0/1; inner is a straight move.
    ConfigurationQuery q{2, {{0, 5}, {2, 7}}, {{10, 1}, {12, 3}}, {{-5, 0}}};
    Deformation h = swap_case_a(q, fixed2(), 0, 1);
    ConfigurationQuery goals_as_starts{2, q.goals, q.goals, q.obstacles};
    h.goal_side = swap_case_a(goals_as_starts, fixed2(), 0, 1).start_side;
    const auto path = compose_with_section(q, h, [](const ConfigurationQuery& d) { return affine_section(d, fixed2()); });
    const std::vector<Time> expected{Time(0),    Time(1, 9), Time(2, 9), Time(1, 3),
                                     Time(2, 3), Time(7, 9), Time(8, 9), Time(1)};
    EXPECT_EQ(breakpoints(path), expected);
    check_path(path);
}

TEST(Compose, DetectsChainBreak) {
    ConfigurationQuery q{2, {{0, 5}, {2, 7}}, {{11, 0}, {10, 0}}, {{-5, 0}}};
    Deformation h = swap_case_a(q, fixed2(), 0, 1);
    std::get<Linear>(h.start_side[2].motions[0].shape).from = {100, 100};
    try {
        compose_with_section(q, h, [](const ConfigurationQuery& d) { return affine_section(d, fixed2()); });
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Consistency);
    }
}
