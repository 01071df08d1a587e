#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace mobicache {

/// Sum_{i=1}^{M} i^{-s}, accumulated in ascending index order with
/// Neumaier compensation. Throws std::invalid_argument for M == 0 or s <= 0.
double harmonic_sum(std::size_t M, double s);

/// Asymptotic growth class of H_s(M) as M grows.
enum class HarmonicClass {
    Constant,  // s > 1
    Log,       // s == 1
    Power,     // s < 1, grows as M^{1-s}
};

struct HarmonicScaling {
    HarmonicClass cls;
    double s;         // exponent the class was computed for
    double exponent;  // 1 - s for Power, 0 otherwise
};

/// Class of H_alpha(M) (of_half == false) or H_{alpha/2}(M) (of_half == true).
HarmonicScaling harmonic_class(double alpha, bool of_half);

/// Zipf request popularity over a library of M contents.
///
/// Content indices are 0-based in every container (pmf()[0] is the most
/// popular content). Immutable after construction, so one instance may be
/// shared by concurrent trial workers.
class PopularityModel {
public:
    PopularityModel(std::size_t M, double alpha);

    std::size_t size() const { return pmf_.size(); }
    double alpha() const { return alpha_; }
    std::span<const double> pmf() const { return pmf_; }
    std::span<const double> cdf() const { return cdf_; }
    double pmf(std::size_t m) const { return pmf_[m]; }
    /// H_alpha(M)
    double h_alpha() const { return h_alpha_; }
    /// H_{alpha/2}(M)
    double h_half_alpha() const { return h_half_alpha_; }

    /// Inverse-CDF lookup for u in [0, 1).
    std::size_t sample(double u) const;

    template <class URBG>
    std::size_t sample(URBG& rng) const {
        return sample(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    }

private:
    double alpha_;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
    double h_alpha_;
    double h_half_alpha_;
};

inline PopularityModel zipf_pmf(std::size_t M, double alpha) { return PopularityModel(M, alpha); }

}  // namespace mobicache
