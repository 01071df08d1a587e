#include "mobicache/popularity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mobicache {

namespace {

// Neumaier variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            c_ += (sum_ - t) + x;
        } else {
            c_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

}  // namespace

double harmonic_sum(std::size_t M, double s) {
    if (M == 0) throw std::invalid_argument("harmonic_sum: M must be >= 1");
    if (!(s > 0.0)) throw std::invalid_argument("harmonic_sum: s must be > 0");
    CompensatedSum acc;
    for (std::size_t i = 1; i <= M; ++i) acc.add(std::pow(static_cast<double>(i), -s));
    return acc.value();
}

HarmonicScaling harmonic_class(double alpha, bool of_half) {
    const double s = of_half ? alpha / 2.0 : alpha;
    if (s > 1.0) return {HarmonicClass::Constant, s, 0.0};
    if (s == 1.0) return {HarmonicClass::Log, s, 0.0};
    return {HarmonicClass::Power, s, 1.0 - s};
}

PopularityModel::PopularityModel(std::size_t M, double alpha) : alpha_(alpha) {
    if (M == 0) throw std::invalid_argument("zipf_pmf: library size M must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("zipf_pmf: alpha must be > 0");
    h_alpha_ = harmonic_sum(M, alpha);
    h_half_alpha_ = harmonic_sum(M, alpha / 2.0);

    pmf_.resize(M);
    cdf_.resize(M);
    CompensatedSum running;
    for (std::size_t m = 0; m < M; ++m) {
        pmf_[m] = std::pow(static_cast<double>(m + 1), -alpha) / h_alpha_;
        running.add(pmf_[m]);
        cdf_[m] = running.value();
    }
    // sampling relies on the last bucket closing at exactly 1
    cdf_.back() = 1.0;
}

std::size_t PopularityModel::sample(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return cdf_.size() - 1;
    return static_cast<std::size_t>(it - cdf_.begin());
}

}  // namespace mobicache
