#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mobicache/network.hpp"
#include "mobicache/popularity.hpp"

namespace mobicache {

enum class AllocationKind { Uncoded, Mds };

/// Per-content cache allocation.
///
/// values[m] is the number of replicas X_m of every subpacket of content m
/// (Uncoded) or the number r_m of distinct coded subpackets (Mds). Boundary
/// indices m1 and m2 are 1-based: m1 is the first content of Regime II, m2
/// the first content of Regime III. A value of M + 1 means the regime is empty.
struct Allocation {
    AllocationKind kind = AllocationKind::Uncoded;
    std::vector<double> values;
    std::size_t m1 = 1;
    std::optional<std::size_t> m2;
    double budget_used = 0.0;  // total cache slots consumed (K * sum X or sum r)
};

/// Result of mds_boundaries. The closed-form pair is always reported; the
/// fixed-point refinement of m2 is reported alongside with its convergence flag.
struct MdsBoundaries {
    std::size_t m1 = 1;
    std::size_t m2 = 1;
    std::size_t m2_fixed_point = 1;
    bool fixed_point_converged = true;
    std::size_t fixed_point_iterations = 0;
};

struct ScalingRecord {
    std::string dominant_term;   // "K" or the name of the competing term
    std::string symbolic_class;  // e.g. "K*M^0.5/(n*a)"
    double value = 0.0;          // numeric max{...} with exact harmonic sums
    double throughput = 0.0;     // 1 / (n * a * value)
    std::string throughput_class;
};

std::size_t uncoded_boundary(const NetworkConfig& cfg, const PopularityModel& pop);

/// Replication profile: 1/a for the most popular contents, a sqrt(pmf) share
/// of the residual budget for the rest, lifted to at least one copy.
/// Throws InfeasibleError when S * n < K * M.
Allocation uncoded_allocation(const NetworkConfig& cfg, const PopularityModel& pop);

/// Closed-form regime boundaries of the coded allocation.
/// Throws InfeasibleError when M >= n.
MdsBoundaries mds_boundaries(const NetworkConfig& cfg, const PopularityModel& pop);

/// Coded allocation in the box [K, 1/a + K] with sum r = S * n.
/// Throws InfeasibleError when S * n < K * M.
Allocation mds_allocation(const NetworkConfig& cfg, const PopularityModel& pop);

ScalingRecord delay_scaling(const NetworkConfig& cfg, const PopularityModel& pop, Strategy strategy);

/// Lists every violated Allocation invariant (box, monotonicity, budget,
/// boundary ordering). Empty when the allocation is well formed.
std::vector<std::string> check_allocation(const Allocation& alloc, const NetworkConfig& cfg,
                                          double slack = 1e-6);

/// Half-up rounding of a nonnegative value to an index, clamped to [lo, hi].
std::size_t round_clamp(double x, std::size_t lo, std::size_t hi);

}  // namespace mobicache
