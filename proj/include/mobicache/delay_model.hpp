#pragma once

#include <optional>
#include <span>
#include <utility>

#include "mobicache/network.hpp"
#include "mobicache/popularity.hpp"

namespace mobicache {

/// Per-slot probability that at least one of `copies` uniformly placed
/// holders lies in the receiver's communication area: 1 - (1 - area)^copies.
double contact_prob(double area, double copies);

/// Order form of contact_prob: min(1, area * copies).
double contact_prob_order(double area, double copies);

struct DelayEstimate {
    double exact_slots = 0.0;  // geometric means with exact contact probabilities
    double order_slots = 0.0;  // min(1, .) denominators
    std::optional<std::pair<double, double>> bounds;  // random walk (lower, upper)
};

/// Sequential reception of uncoded content, X[m] replicas of every subpacket.
DelayEstimate expected_delay_uncoded(const NetworkConfig& cfg, std::span<const double> pmf,
                                     std::span<const double> X);
DelayEstimate expected_delay_uncoded(const NetworkConfig& cfg, const PopularityModel& pop,
                                     std::span<const double> X);

/// Random reception of MDS-coded content, r[m] coded subpackets cached.
DelayEstimate expected_delay_mds(const NetworkConfig& cfg, std::span<const double> pmf,
                                 std::span<const double> r);
DelayEstimate expected_delay_mds(const NetworkConfig& cfg, const PopularityModel& pop,
                                 std::span<const double> r);

/// Expected slots to collect one MDS-coded content from r cached pieces,
/// order form: sum_{j<K} 1 / min(1, (r - j) * area).
double mds_content_delay_order(double area, std::size_t K, double r);

/// 1 / (n * area * d_avg), the throughput-delay trade-off with unit constant.
double per_node_throughput(const NetworkConfig& cfg, double d_avg);

/// Random-walk delay bracket: lower is the reshuffling order form, upper
/// replaces area with area / log(n) in every min(.) denominator. The log
/// factor defaults to ln(n) and is floored at 1.
DelayEstimate expected_delay_random_walk(const NetworkConfig& cfg, std::span<const double> pmf,
                                         std::span<const double> alloc, Strategy strategy,
                                         std::optional<double> log_factor = std::nullopt);
DelayEstimate expected_delay_random_walk(const NetworkConfig& cfg, const PopularityModel& pop,
                                         std::span<const double> alloc, Strategy strategy,
                                         std::optional<double> log_factor = std::nullopt);

}  // namespace mobicache
