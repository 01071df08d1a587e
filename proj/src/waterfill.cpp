#include "waterfill.hpp"

#include <algorithm>
#include <cmath>

namespace mobicache::detail {

namespace {

struct Profile {
    std::span<const double> w;
    double scale, lo, hi;

    double value(std::size_t m, double delta) const {
        return std::clamp(std::sqrt(scale * w[m] / delta), lo, hi);
    }
    double total(double delta) const {
        double s = 0.0;
        for (std::size_t m = 0; m < w.size(); ++m) s += value(m, delta);
        return s;
    }
    // Free entries are those whose unclipped value lies strictly inside (lo, hi).
    std::vector<char> free_set(double delta) const {
        std::vector<char> f(w.size());
        for (std::size_t m = 0; m < w.size(); ++m) {
            const double u = std::sqrt(scale * w[m] / delta);
            f[m] = (u > lo && u < hi) ? 1 : 0;
        }
        return f;
    }
};

}  // namespace

WaterFillResult water_fill(std::span<const double> w, double scale, double lo, double hi, double budget,
                           double delta_lo, double delta_hi, double tol, std::size_t max_iter) {
    const Profile prof{w, scale, lo, hi};
    const std::size_t M = w.size();
    WaterFillResult res;

    if (static_cast<double>(M) * hi <= budget) {
        res.values.assign(M, hi);
        res.all_at_hi = true;
        res.converged = true;
        return res;
    }
    const double w_max = *std::max_element(w.begin(), w.end());
    if (static_cast<double>(M) * lo >= budget) {
        res.values.assign(M, lo);
        res.delta = scale * w_max / (lo * lo);
        res.converged = true;
        return res;
    }

    // A small delta pushes every entry up; a large one pushes every entry down.
    for (int guard = 0; prof.total(delta_lo) < budget && guard < 400; ++guard) delta_lo /= 4.0;
    for (int guard = 0; prof.total(delta_hi) > budget && guard < 400; ++guard) delta_hi *= 4.0;

    double delta = std::sqrt(delta_lo * delta_hi);
    double residual = std::abs(prof.total(delta) - budget);
    while (residual > tol * budget && res.iterations < max_iter) {
        ++res.iterations;
        if (prof.total(delta) > budget)
            delta_lo = delta;
        else
            delta_hi = delta;
        delta = std::sqrt(delta_lo * delta_hi);
        residual = std::abs(prof.total(delta) - budget);
    }
    res.converged = residual <= tol * budget;

    // Closed-form snap on the final active set: free entries are c * sqrt(w).
    double best_delta = delta;
    double best_residual = residual;
    auto active = prof.free_set(delta);
    for (int pass = 0; pass < 100; ++pass) {
        double fixed = 0.0, root_sum = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            if (active[m])
                root_sum += std::sqrt(w[m]);
            else
                fixed += prof.value(m, delta);
        }
        if (root_sum <= 0.0 || budget - fixed <= 0.0) break;
        const double c = (budget - fixed) / root_sum;
        const double next = scale / (c * c);
        const double next_residual = std::abs(prof.total(next) - budget);
        if (next_residual <= best_residual) {
            best_delta = next;
            best_residual = next_residual;
        }
        auto next_active = prof.free_set(next);
        delta = next;
        if (next_active == active) break;
        active = std::move(next_active);
    }

    res.delta = best_delta;
    res.values.resize(M);
    for (std::size_t m = 0; m < M; ++m) res.values[m] = prof.value(m, best_delta);
    res.converged = res.converged || best_residual <= tol * budget;
    return res;
}

}  // namespace mobicache::detail
