#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mobicache/network.hpp"
#include "mobicache/placement.hpp"
#include "mobicache/popularity.hpp"

namespace mobicache {

enum class SimMode {
    DelayOnly,  // every requester with an in-range source receives a subpacket
    Scheduled,  // cell-colored TDMA, at most one link per active cell
};

struct SimOptions {
    SimMode mode = SimMode::DelayOnly;
    Strategy strategy = Strategy::UncodedSeq;
    std::size_t slots = 1000;  // requests starting in [warmup, slots) are tracked
    std::size_t warmup = 0;
    std::uint64_t seed = 1;
    double requester_fraction = 1.0;
    /// Extra slots allowed after `slots` for tracked requests to finish;
    /// 0 selects 50 * slots.
    std::size_t max_drain = 0;
};

struct ContactCounter {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
};

struct TrialMetrics {
    double d_avg_empirical = 0.0;       // mean delay of tracked requests, slots
    double d_avg_stderr = 0.0;
    double throughput_empirical = 0.0;  // completions per node per slot inside the window
    std::vector<std::vector<std::uint32_t>> per_content_delays;
    /// Keyed by the number of network copies of the needed piece.
    std::map<std::size_t, ContactCounter> contact_counters;
    std::size_t completed = 0;  // tracked requests that finished
    std::size_t censored = 0;   // tracked requests still open at the drain limit
    std::size_t protocol_violations = 0;
    std::size_t slots_run = 0;
    std::uint64_t seed = 0;
};

/// One seeded delivery-phase trial on the unit torus. A holder is in range of
/// a requester when both torus coordinate offsets are at most R/2, R = sqrt(area),
/// so a uniform holder is in range with probability exactly `area`.
/// Throws std::invalid_argument when caches do not match cfg or pop, or when
/// slots <= warmup.
TrialMetrics run_trial(const NetworkConfig& cfg, const PopularityModel& pop, const CacheAssignment& caches,
                       const SimOptions& opts);

/// Independent trials on up to `threads` workers; trial i uses the seed
/// derive_seed(opts.seed, i). Results are in trial order.
std::vector<TrialMetrics> run_trials(const NetworkConfig& cfg, const PopularityModel& pop,
                                     const CacheAssignment& caches, const SimOptions& opts, std::size_t trials,
                                     std::size_t threads = 1);

/// Pools tracked delays of several trials into a mean with standard error.
std::pair<double, double> pooled_delay(const std::vector<TrialMetrics>& trials);

/// splitmix64 mix of (root, index).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

struct HittingTimeEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    double censored_fraction = 0.0;
    std::size_t pairs = 0;
};

/// Two nodes start uniformly on the unit torus and each takes a flight of
/// length L in a uniform direction every slot; returns the mean first slot at
/// which their Euclidean torus distance is at most R. Censored pairs count as
/// max_slots. Requires 0.5 <= L/R <= 2.
HittingTimeEstimate estimate_hitting_time(double R, double L, std::size_t n_pairs, std::size_t max_slots,
                                          std::uint64_t seed, std::size_t threads = 1);

struct ContactFrequency {
    std::size_t content = 0;
    std::size_t copies = 0;
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
    double frequency = 0.0;
    double stderr_ = 0.0;  // binomial standard error sqrt(f (1 - f) / trials)
};

/// Every slot all nodes are reshuffled and a probe point is drawn uniformly;
/// for each content the slot is a hit when a node holding piece 0 of it is in
/// range of the probe.
std::vector<ContactFrequency> empirical_contact_check(const NetworkConfig& cfg, const CacheAssignment& caches,
                                                      std::size_t M, std::size_t slots, std::uint64_t seed);

}  // namespace mobicache
