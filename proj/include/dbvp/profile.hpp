#pragma once

#include "dbvp/regulated.hpp"

#include <cstddef>
#include <vector>

namespace dbvp {

/// Samples of a function on a sorted grid inside [0,1], with one-sided value
/// overrides at registered jump points. Every jump t must be a grid point.
/// Between grid points the profile reads as piecewise linear, joining the
/// right limit of the left node to the left limit of the right node.
struct GridProfile {
    std::vector<double> grid;
    std::vector<double> values;     // value taken at grid[i]
    std::vector<Breakpoint> jumps;  // sparse one-sided overrides, sorted by t

    /// Interpolating evaluation honoring one-sided data. t must lie within
    /// [grid.front(), grid.back()].
    double value_at(double t) const;

    double at(std::size_t i) const { return values[i]; }
    double left_of(std::size_t i) const;   // limit from below at grid[i]
    double right_of(std::size_t i) const;  // limit from above at grid[i]

    /// Max |value| over nodes and one-sided values (exact for the interpolant).
    double sup() const;

    const Breakpoint* jump_at(double t) const;

    /// Profile of zeros on the given grid.
    static GridProfile zeros_on(std::vector<double> grid);
};

}  // namespace dbvp
