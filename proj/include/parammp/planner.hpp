#pragma once
// The parametrized motion planner: classify the query into its domain,
// desingularize if necessary, sort the start ordering into the goal ordering
// by elementary swaps, and finish with the straight-line section.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "parammp/config_space.hpp"
#include "parammp/deformation.hpp"
#include "parammp/error.hpp"
#include "parammp/path.hpp"

namespace parammp {

/// One adjacent transposition of the start ordering.
struct Swap {
    enum class Kind { CaseA, CaseB };
    Kind kind = Kind::CaseA;
    std::size_t robot = 0;               // CaseA: left robot; CaseB: the moving robot
    std::size_t other_robot = 0;         // CaseA: right robot
    std::vector<std::size_t> block;      // CaseB: obstacles of the crossed block
    Side side = Side::Left;              // CaseB: side of the block the robot starts on

    friend bool operator==(const Swap&, const Swap&) = default;
};

/// Leftmost-inversion bubble sort of sigma's pattern into sigma_prime's.
inline std::vector<Swap> transposition_sequence(const OrderingPair& pair) {
    const auto& sigma = pair.sigma;
    const auto& target = pair.sigma_prime;
    if (sigma.size() != target.size()) fail(ErrorKind::Precondition, "orderings have different lengths");

    std::vector<std::vector<std::size_t>> blocks, target_blocks;
    for (const auto& tok : sigma)
        if (tok.is_block()) blocks.push_back(tok.obstacles);
    for (const auto& tok : target)
        if (tok.is_block()) target_blocks.push_back(tok.obstacles);
    if (blocks != target_blocks) fail(ErrorKind::Precondition, "orderings disagree on the obstacle blocks");

    // Rank of every token in the target sequence.
    auto rank_of = [&](const Token& tok) -> std::size_t {
        for (std::size_t k = 0; k < target.size(); ++k) {
            if (tok.is_block() ? (target[k].is_block() && target[k].obstacles == tok.obstacles)
                               : (!target[k].is_block() && target[k].robot == tok.robot))
                return k;
        }
        fail(ErrorKind::Precondition, "token " + to_string(tok) + " is missing from the goal ordering");
    };
    std::vector<std::size_t> ranks;
    std::vector<Token> current = sigma;
    for (const auto& tok : current) ranks.push_back(rank_of(tok));

    std::vector<Swap> swaps;
    for (;;) {
        std::size_t k = 0;
        while (k + 1 < ranks.size() && ranks[k] < ranks[k + 1]) ++k;
        if (k + 1 >= ranks.size()) break;
        const Token& left = current[k];
        const Token& right = current[k + 1];
        if (left.is_block() && right.is_block()) fail(ErrorKind::Consistency, "obstacle blocks out of order");
        if (!left.is_block() && !right.is_block())
            swaps.push_back({Swap::Kind::CaseA, left.robot, right.robot, {}, Side::Left});
        else if (!left.is_block())
            swaps.push_back({Swap::Kind::CaseB, left.robot, 0, right.obstacles, Side::Left});
        else
            swaps.push_back({Swap::Kind::CaseB, right.robot, 0, left.obstacles, Side::Right});
        std::swap(current[k], current[k + 1]);
        std::swap(ranks[k], ranks[k + 1]);
    }
    return swaps;
}

/// Obstacle of a block that a crossing robot circles: the lexicographically
/// smallest position, so the choice ignores how the block's members are labelled.
inline std::size_t block_representative(const std::vector<Point>& obstacles, const std::vector<std::size_t>& block) {
    if (block.empty()) fail(ErrorKind::Precondition, "empty obstacle block");
    return *std::min_element(block.begin(), block.end(),
                             [&](std::size_t a, std::size_t b) { return obstacles.at(a) < obstacles.at(b); });
}

/// Deformation realising `swap` on the current start configuration.
inline Deformation swap_deformation(const ConfigurationQuery& query, const Frame& frame, const Swap& swap,
                                    double snap = 0.0) {
    if (swap.kind == Swap::Kind::CaseA) return swap_case_a(query, frame, swap.robot, swap.other_robot, snap);
    return swap_case_b(query, frame, swap.robot, block_representative(query.obstacles, swap.block), swap.side, snap);
}

/// Section over the generic stratum: chain the swaps that sort the start
/// ordering into the goal ordering, then move straight to the goals. The goal
/// side never moves.
inline PiecewisePath generic_section(const ConfigurationQuery& query, const Frame& frame, double snap = 0.0) {
    const auto pair = orderings(query, frame, snap);
    if (same_pattern(pair.sigma, pair.sigma_prime)) return affine_section(query, frame, snap);

    const auto swaps = transposition_sequence(pair);
    std::vector<Deformation> pieces;
    pieces.reserve(swaps.size());
    ConfigurationQuery current = query;
    for (const auto& swap : swaps) {
        pieces.push_back(swap_deformation(current, frame, swap, snap));
        current = evaluate_deformation(pieces.back(), current, 1.0);
    }
    const auto sorted = orderings(current, frame, snap);
    if (!same_pattern(sorted.sigma, sorted.sigma_prime))
        fail(ErrorKind::Consistency, "swap sequence did not reach the goal ordering");

    return compose_with_section(query, concatenate(pieces),
                                [&](const ConfigurationQuery& q) { return affine_section(q, frame, snap); });
}

struct PlanOptions {
    double snap_tolerance = 0.0;
};

struct PlanResult {
    PiecewisePath path;
    RegionLabel region;
    OrderingPair ordering_pair;  // of the generic (possibly desingularized) pair
    int domain_index = 0;
    std::size_t swap_count = 0;
    FrameMode mode = FrameMode::Fixed;
    Frame frame;
    bool desingularized = false;

    friend bool operator==(const PlanResult&, const PlanResult&) = default;
};

/// ObstaclePair for even dimensions with at least two obstacles, otherwise Fixed.
inline FrameMode default_mode(const ConfigurationQuery& query) {
    return (query.dim % 2 == 0 && query.obstacle_count() >= 2) ? FrameMode::ObstaclePair : FrameMode::Fixed;
}

inline PlanResult plan(const ConfigurationQuery& query, FrameMode mode, const PlanOptions& options = {}) {
    validate(query);
    const double snap = options.snap_tolerance;
    PlanResult result;
    result.mode = mode;
    result.frame = make_frame(query, mode);
    result.region = classify(query, result.frame, snap);
    result.domain_index = result.region.c;

    const int n = static_cast<int>(query.robot_count());
    ConfigurationQuery generic = query;
    if (result.region.j == 2 * n) {
        result.path = generic_section(query, result.frame, snap);
    } else {
        const Deformation h = desingularize(query, result.frame, snap);
        generic = evaluate_deformation(h, query, 1.0);
        const auto label = classify(generic, result.frame, snap);
        if (label.j != 2 * n || label.t != result.region.t)
            fail(ErrorKind::Consistency, "desingularization did not reach the generic stratum");
        result.path = compose_with_section(
            query, h, [&](const ConfigurationQuery& q) { return generic_section(q, result.frame, snap); });
        result.desingularized = true;
    }
    result.ordering_pair = orderings(generic, result.frame, snap);
    result.swap_count = transposition_sequence(result.ordering_pair).size();
    check_path(result.path);
    return result;
}

inline PlanResult plan(const ConfigurationQuery& query, const PlanOptions& options = {}) {
    return plan(query, default_mode(query), options);
}

}  // namespace parammp
