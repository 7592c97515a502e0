#pragma once

#include <vector>

#include "ballflow/curvature.hpp"
#include "ballflow/tet_geometry.hpp"
#include "ballflow/triangulation.hpp"
#include "oracles.hpp"

namespace fixture {

// A real start on the 5-cell whose prescribed flow must leave the real region.
struct Collapse {
    ballflow::PackingVector r0;
    std::vector<double> target;
};

inline Collapse engineered_collapse() {
    const auto t = ballflow::generate_boundary_4simplex();
    ballflow::PackingVector r0({ballflow::critical_radius(1, 1, 1) * 1.01, 1, 1, 1, 1});
    std::vector<double> target = ballflow::curvature(t, r0).k;
    // K_0 > -4*pi on every real packing, so demanding less drives r_0 down
    // until its tetrahedra flatten.
    target[0] = -4 * oracle::kPi - 1;
    return {r0, target};
}

}  // namespace fixture
