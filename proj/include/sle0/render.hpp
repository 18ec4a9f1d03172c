#pragma once

#include <span>
#include <string>

#include "sle0/loewner.hpp"
#include "sle0/quad_diff.hpp"
#include "sle0/trajectory.hpp"

namespace sle0 {

struct SvgOptions {
    int grid = 41;
    double width = 600.0;
};

/// Direction-field glyphs, domain boundary, trajectories and the divisor's
/// points. Element classes: "field", "boundary", "trajectory", "growth",
/// "marked". Coordinates are printed with four decimals.
std::string render_svg(const QuadDifferential& qd, const SymmetricDivisor& divisor,
                       std::span<const Trajectory> trajectories, const SvgOptions& options = {});

/// Header index,arc_length,re,im.
std::string trajectory_csv(const Trajectory& trajectory);
/// Header t,curve,re,im.
std::string hull_csv(const HullResult& hull);

}  // namespace sle0
