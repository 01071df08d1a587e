#pragma once

#include <cstddef>

#include "mobicache/allocation.hpp"
#include "mobicache/network.hpp"
#include "mobicache/popularity.hpp"

namespace mobicache {

enum class SolverStatus { Converged, IterationLimit, Infeasible };

struct SolverReport {
    Allocation allocation;
    double objective = 0.0;   // order-form delay of the returned allocation
    double dual_delta = 0.0;  // budget multiplier
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
    SolverStatus status = SolverStatus::Converged;
};

/// Water-filling on the uncoded replication problem:
/// X_m = clip(sqrt(p_m / (a * delta)), 1, 1/a) with K * sum X = S * n.
/// Returns status Infeasible (empty allocation) when S * n < K * M.
SolverReport solve_uncoded(const PopularityModel& pop, const NetworkConfig& cfg, double tol = 1e-9);

/// Exhaustive search over regime boundary pairs (m1, m2) of the three-regime
/// coded profile; the piecewise objective is minimized, ties go to the
/// smallest m1 then the smallest m2. The reported objective is the order-form
/// coded delay of the returned allocation.
SolverReport solve_mds(const PopularityModel& pop, const NetworkConfig& cfg, double tol = 1e-9);

/// Exact minimizer of the order-form coded delay
/// sum_m p_m sum_{j<K} 1 / min(1, (r_m - j) a) over K <= r_m <= min(1/a + K, n),
/// sum r_m <= S * n. Used as the continuous relaxation of the integer problem.
SolverReport solve_mds_convex(const PopularityModel& pop, const NetworkConfig& cfg, double tol = 1e-9);

enum class ObjectiveKind { Order, Exact };

/// Enumerates every integer allocation inside the box and budget and returns
/// the global optimum of the chosen objective. The box is
/// [1, min(floor(1/a), n)] uncoded and [K, min(floor(1/a) + K, n)] coded.
/// Throws SearchSpaceError when M > 4, an integer cap exceeds 12, or the box
/// holds more than 1e7 points. Throws InfeasibleError when S * n < K * M.
SolverReport brute_force(const PopularityModel& pop, const NetworkConfig& cfg, Strategy strategy,
                         ObjectiveKind kind = ObjectiveKind::Order);

}  // namespace mobicache
