#pragma once

// Internal helper shared by the analytic allocation and the numeric solver.
//
// Solves   sum_m clip(sqrt(scale * w_m / delta), lo, hi) = budget   for delta
// by bisection on log(delta), then snaps delta to the closed form implied by
// the final active set.

#include <cstddef>
#include <span>
#include <vector>

namespace mobicache::detail {

struct WaterFillResult {
    std::vector<double> values;
    double delta = 0.0;      // 0 when the budget is not binding
    std::size_t iterations = 0;
    bool converged = false;  // relative budget residual within tol
    bool all_at_hi = false;  // budget exceeds M * hi
};

/// w: per-content weights (the popularity pmf); lo <= hi.
/// The caller guarantees budget >= M * lo.
WaterFillResult water_fill(std::span<const double> w, double scale, double lo, double hi, double budget,
                           double delta_lo, double delta_hi, double tol, std::size_t max_iter);

}  // namespace mobicache::detail
