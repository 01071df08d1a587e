#include "mobicache/delay_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mobicache {

namespace {

void check_area(double area) {
    if (!(area > 0.0 && area <= 1.0)) throw std::invalid_argument("area must lie in (0, 1]");
}

void check_lengths(std::span<const double> pmf, std::span<const double> alloc) {
    if (pmf.size() != alloc.size())
        throw std::invalid_argument("allocation length " + std::to_string(alloc.size()) +
                                    " does not match library size " + std::to_string(pmf.size()));
}

double uncoded_order(double area, double K, std::span<const double> pmf, std::span<const double> X) {
    double total = 0.0;
    for (std::size_t m = 0; m < pmf.size(); ++m) total += pmf[m] * K / contact_prob_order(area, X[m]);
    return total;
}

double mds_order(double area, std::size_t K, std::span<const double> pmf, std::span<const double> r) {
    double total = 0.0;
    for (std::size_t m = 0; m < pmf.size(); ++m) total += pmf[m] * mds_content_delay_order(area, K, r[m]);
    return total;
}

}  // namespace

double contact_prob(double area, double copies) {
    check_area(area);
    if (!(copies >= 0.0)) throw std::invalid_argument("contact_prob: copies must be >= 0");
    if (area == 1.0) return copies > 0.0 ? 1.0 : 0.0;
    // -expm1(c * log1p(-a)) keeps precision when area * copies is tiny
    return -std::expm1(copies * std::log1p(-area));
}

double contact_prob_order(double area, double copies) {
    check_area(area);
    if (!(copies >= 0.0)) throw std::invalid_argument("contact_prob_order: copies must be >= 0");
    return std::min(1.0, area * copies);
}

double mds_content_delay_order(double area, std::size_t K, double r) {
    double total = 0.0;
    for (std::size_t j = 0; j < K; ++j) total += 1.0 / contact_prob_order(area, r - static_cast<double>(j));
    return total;
}

DelayEstimate expected_delay_uncoded(const NetworkConfig& cfg, std::span<const double> pmf,
                                     std::span<const double> X) {
    check_area(cfg.area);
    check_lengths(pmf, X);
    const double K = static_cast<double>(cfg.K);
    DelayEstimate est;
    for (std::size_t m = 0; m < X.size(); ++m) {
        if (!(X[m] >= 1.0))
            throw std::invalid_argument("expected_delay_uncoded: X[" + std::to_string(m) + "] < 1");
        est.exact_slots += pmf[m] * K / contact_prob(cfg.area, X[m]);
    }
    est.order_slots = uncoded_order(cfg.area, K, pmf, X);
    return est;
}

DelayEstimate expected_delay_uncoded(const NetworkConfig& cfg, const PopularityModel& pop,
                                     std::span<const double> X) {
    return expected_delay_uncoded(cfg, pop.pmf(), X);
}

DelayEstimate expected_delay_mds(const NetworkConfig& cfg, std::span<const double> pmf,
                                 std::span<const double> r) {
    check_area(cfg.area);
    check_lengths(pmf, r);
    const double K = static_cast<double>(cfg.K);
    DelayEstimate est;
    for (std::size_t m = 0; m < r.size(); ++m) {
        if (!(r[m] >= K))
            throw std::invalid_argument("expected_delay_mds: r[" + std::to_string(m) + "] < K");
        double content = 0.0;
        for (std::size_t j = 0; j < cfg.K; ++j)
            content += 1.0 / contact_prob(cfg.area, r[m] - static_cast<double>(j));
        est.exact_slots += pmf[m] * content;
    }
    est.order_slots = mds_order(cfg.area, cfg.K, pmf, r);
    return est;
}

DelayEstimate expected_delay_mds(const NetworkConfig& cfg, const PopularityModel& pop,
                                 std::span<const double> r) {
    return expected_delay_mds(cfg, pop.pmf(), r);
}

double per_node_throughput(const NetworkConfig& cfg, double d_avg) {
    if (!(d_avg > 0.0)) throw std::invalid_argument("per_node_throughput: d_avg must be > 0");
    return 1.0 / (static_cast<double>(cfg.n) * cfg.area * d_avg);
}

DelayEstimate expected_delay_random_walk(const NetworkConfig& cfg, std::span<const double> pmf,
                                         std::span<const double> alloc, Strategy strategy,
                                         std::optional<double> log_factor) {
    DelayEstimate est = strategy == Strategy::UncodedSeq ? expected_delay_uncoded(cfg, pmf, alloc)
                                                         : expected_delay_mds(cfg, pmf, alloc);
    const double lf = std::max(1.0, log_factor.value_or(cfg.log_n()));
    const double slow_area = cfg.area / lf;
    const double upper = strategy == Strategy::UncodedSeq
                             ? uncoded_order(slow_area, static_cast<double>(cfg.K), pmf, alloc)
                             : mds_order(slow_area, cfg.K, pmf, alloc);
    est.bounds = std::make_pair(est.order_slots, upper);
    return est;
}

DelayEstimate expected_delay_random_walk(const NetworkConfig& cfg, const PopularityModel& pop,
                                         std::span<const double> alloc, Strategy strategy,
                                         std::optional<double> log_factor) {
    return expected_delay_random_walk(cfg, pop.pmf(), alloc, strategy, log_factor);
}

}  // namespace mobicache
