#pragma once

#include "fsl/ranking.hpp"

namespace fixtures {

// Three scores ranked against anchors (0, 0.5, 1) with the squared cost, eps = 0.5.
inline fsl::RankingProblem three_point_problem(double eps = 0.5) {
    fsl::Vector x(3), y(3);
    x << 0.3, 1.2, -0.25;
    y << 0.0, 0.5, 1.0;
    return {x, y, fsl::DiscreteMeasure::uniform(3), fsl::DiscreteMeasure::uniform(3),
            fsl::CostKind::Squared, 0.0, eps};
}

// Plan and soft ranks of three_point_problem(), as published to 3 decimals.
inline fsl::Matrix three_point_plan() {
    fsl::Matrix p(3, 3);
    p << 0.108, 0.151, 0.074,
         0.010, 0.081, 0.242,
         0.216, 0.101, 0.017;
    return p;
}

inline fsl::Vector three_point_ranks() {
    fsl::Vector r(3);
    r << 1.900, 2.698, 1.402;
    return r;
}

}  // namespace fixtures
