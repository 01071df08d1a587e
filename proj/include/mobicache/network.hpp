#pragma once

#include <cstddef>
#include <optional>

namespace mobicache {

enum class Mobility { Reshuffle, RandomWalk };

/// Reception strategy: uncoded sequential or MDS-coded random reception.
enum class Strategy { UncodedSeq, MdsRandom };

/// Network parameters shared by every module.
///
/// `area` is a(n) = R^2, the per-slot communication area of one node. The
/// simulator realizes it as the axis-aligned square of side R centered on the
/// receiver, so a uniformly placed holder is in range with probability `area`.
struct NetworkConfig {
    std::size_t n = 2;
    double area = 1.0;
    std::size_t K = 1;
    std::size_t S = 1;
    double delta = 1.0;
    Mobility mobility = Mobility::Reshuffle;
    double flight_length = 0.0;  // L, random-walk mobility only
    // Scaling exponents (M = n^beta, K = n^gamma), carried for sweep generation.
    std::optional<double> beta;
    std::optional<double> gamma;

    /// Convenience constructor with the default cache size S = K.
    static NetworkConfig make(std::size_t n, double area, std::size_t K);

    /// Throws std::invalid_argument unless n >= 2, 0 < area <= 1, K >= 1,
    /// S >= 1, delta >= 0 and (for random walk) flight_length > 0.
    void validate() const;

    /// True when area >= ln(n)/n, i.e. a cell of area a(n) holds a node whp.
    bool connected_regime() const;

    /// Side of the communication square, R = sqrt(area).
    double range() const;
    /// Natural log of n.
    double log_n() const;
    /// Total cache slots S * n.
    double cache_slots() const { return static_cast<double>(S) * static_cast<double>(n); }
};

}  // namespace mobicache
