#include "mobicache/network.hpp"

#include <cmath>
#include <stdexcept>

namespace mobicache {

NetworkConfig NetworkConfig::make(std::size_t n, double area, std::size_t K) {
    NetworkConfig cfg;
    cfg.n = n;
    cfg.area = area;
    cfg.K = K;
    cfg.S = K;
    return cfg;
}

void NetworkConfig::validate() const {
    if (n < 2) throw std::invalid_argument("NetworkConfig: n must be >= 2");
    if (!(area > 0.0 && area <= 1.0)) throw std::invalid_argument("NetworkConfig: area must lie in (0, 1]");
    if (K < 1) throw std::invalid_argument("NetworkConfig: K must be >= 1");
    if (S < 1) throw std::invalid_argument("NetworkConfig: S must be >= 1");
    if (!(delta >= 0.0)) throw std::invalid_argument("NetworkConfig: delta must be >= 0");
    if (mobility == Mobility::RandomWalk && !(flight_length > 0.0))
        throw std::invalid_argument("NetworkConfig: random walk needs flight_length > 0");
}

bool NetworkConfig::connected_regime() const {
    const double threshold = std::log(static_cast<double>(n)) / static_cast<double>(n);
    return area >= threshold * (1.0 - 1e-12);
}

double NetworkConfig::range() const { return std::sqrt(area); }

double NetworkConfig::log_n() const { return std::log(static_cast<double>(n)); }

}  // namespace mobicache
