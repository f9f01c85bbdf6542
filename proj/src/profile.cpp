#include "dbvp/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dbvp {

const Breakpoint* GridProfile::jump_at(double t) const {
    auto it = std::lower_bound(jumps.begin(), jumps.end(), t,
                               [](const Breakpoint& b, double v) { return b.t < v; });
    if (it != jumps.end() && it->t == t) return &*it;
    return nullptr;
}

double GridProfile::left_of(std::size_t i) const {
    if (const Breakpoint* b = jump_at(grid[i])) return b->left;
    return values[i];
}

double GridProfile::right_of(std::size_t i) const {
    if (const Breakpoint* b = jump_at(grid[i])) return b->right;
    return values[i];
}

double GridProfile::value_at(double t) const {
    if (grid.empty()) throw std::logic_error("GridProfile: empty");
    if (!(t >= grid.front() && t <= grid.back())) {
        throw std::domain_error("GridProfile: point outside the sampled range");
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    if (it == grid.begin()) return values.front();
    std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    std::size_t lo = hi - 1;
    if (grid[lo] == t) {
        if (const Breakpoint* b = jump_at(t)) return b->at;
        return values[lo];
    }
    if (hi == grid.size()) return values.back();
    double v_lo = right_of(lo);
    double v_hi = left_of(hi);
    double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
    return v_lo + w * (v_hi - v_lo);
}

double GridProfile::sup() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    for (const Breakpoint& b : jumps) {
        m = std::max({m, std::abs(b.left), std::abs(b.right), std::abs(b.at)});
    }
    return m;
}

GridProfile GridProfile::zeros_on(std::vector<double> grid) {
    GridProfile p;
    p.values.assign(grid.size(), 0.0);
    p.grid = std::move(grid);
    return p;
}

}  // namespace dbvp
