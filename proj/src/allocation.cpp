#include "mobicache/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mobicache/errors.hpp"
#include "waterfill.hpp"

namespace mobicache {

namespace {

constexpr double kRelEps = 1e-12;

double uncoded_cap(const NetworkConfig& cfg) {
    return std::min(1.0 / cfg.area, static_cast<double>(cfg.n));
}

// Upper end of the middle band for coded allocations, never below K.
double mds_band_cap(const NetworkConfig& cfg) {
    return std::max(static_cast<double>(cfg.K), uncoded_cap(cfg));
}

double mds_cap(const NetworkConfig& cfg) {
    return std::min(1.0 / cfg.area + static_cast<double>(cfg.K), static_cast<double>(cfg.n));
}

void require_budget(const NetworkConfig& cfg, std::size_t M) {
    const double need = static_cast<double>(cfg.K) * static_cast<double>(M);
    if (cfg.cache_slots() < need) {
        std::ostringstream os;
        os << "infeasible budget: S*n = " << cfg.cache_slots() << " < K*M = " << need;
        throw InfeasibleError(os.str());
    }
}

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::size_t leading_at_cap(const std::vector<double>& v, double cap) {
    std::size_t c = 0;
    while (c < v.size() && v[c] >= cap * (1.0 - 1e-9)) ++c;
    return c;
}

// sqrt(pmf) share of `budget` over [first, M), written into out.
void sqrt_share(std::span<const double> pmf, std::size_t first, double budget, std::vector<double>& out) {
    double w = 0.0;
    for (std::size_t m = first; m < pmf.size(); ++m) w += std::sqrt(pmf[m]);
    for (std::size_t m = first; m < pmf.size(); ++m) out[m] = std::sqrt(pmf[m]) / w * budget;
}

}  // namespace

std::size_t round_clamp(double x, std::size_t lo, std::size_t hi) {
    if (!(x >= static_cast<double>(lo))) return lo;
    if (x >= static_cast<double>(hi)) return hi;
    return std::clamp(static_cast<std::size_t>(std::floor(x + 0.5)), lo, hi);
}

std::size_t uncoded_boundary(const NetworkConfig& cfg, const PopularityModel& pop) {
    const std::size_t M = pop.size();
    const double na = static_cast<double>(cfg.n) * cfg.area;
    if (pop.alpha() <= 2.0 && na >= static_cast<double>(M)) return M;
    return round_clamp(std::pow(na / pop.h_half_alpha(), 2.0 / pop.alpha()), 1, M);
}

Allocation uncoded_allocation(const NetworkConfig& cfg, const PopularityModel& pop) {
    const std::size_t M = pop.size();
    require_budget(cfg, M);
    const auto pmf = pop.pmf();
    const double cap = uncoded_cap(cfg);
    const double budget = cfg.cache_slots() / static_cast<double>(cfg.K);  // replicas per subpacket

    Allocation out;
    out.kind = AllocationKind::Uncoded;
    out.values.assign(M, cap);

    if (static_cast<double>(M) * cap <= budget) {
        out.m1 = M + 1;
        out.budget_used = static_cast<double>(cfg.K) * cap * static_cast<double>(M);
        return out;
    }

    // Regime I must leave at least one copy for every remaining content.
    std::size_t m1 = uncoded_boundary(cfg, pop);
    auto head_fits = [&](std::size_t b) {
        return static_cast<double>(b - 1) * cap + static_cast<double>(M - b + 1) <= budget;
    };
    while (m1 > 1 && !head_fits(m1)) --m1;

    // Promote tail entries that exceed the cap into Regime I.
    for (;;) {
        const double tail_budget = budget - static_cast<double>(m1 - 1) * cap;
        sqrt_share(pmf, m1 - 1, tail_budget, out.values);
        if (m1 <= M && out.values[m1 - 1] > cap * (1.0 + kRelEps) && m1 < M && head_fits(m1 + 1)) {
            out.values[m1 - 1] = cap;
            ++m1;
            continue;
        }
        break;
    }

    // Lift entries below one copy and renormalize the rest of the tail; a
    // renormalization can push further entries under one, so repeat.
    std::vector<char> is_lifted(M, 0);
    std::size_t lifted = 0;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t m = m1 - 1; m < M; ++m) {
            if (!is_lifted[m] && out.values[m] < 1.0) {
                out.values[m] = 1.0;
                is_lifted[m] = 1;
                ++lifted;
                changed = true;
            }
        }
        double free_roots = 0.0;
        for (std::size_t m = m1 - 1; m < M; ++m)
            if (!is_lifted[m]) free_roots += std::sqrt(pmf[m]);
        if (!changed || free_roots <= 0.0) break;
        const double residual = budget - static_cast<double>(m1 - 1) * cap - static_cast<double>(lifted);
        for (std::size_t m = m1 - 1; m < M; ++m)
            if (!is_lifted[m]) out.values[m] = std::sqrt(pmf[m]) / free_roots * residual;
    }
    for (double& v : out.values) v = std::clamp(v, 1.0, cap);

    out.m1 = leading_at_cap(out.values, cap) + 1;
    out.budget_used = static_cast<double>(cfg.K) * std::accumulate(out.values.begin(), out.values.end(), 0.0);
    return out;
}

MdsBoundaries mds_boundaries(const NetworkConfig& cfg, const PopularityModel& pop) {
    const std::size_t M = pop.size();
    if (M >= cfg.n)
        throw InfeasibleError("mds_boundaries: library size M must be below n");
    const double alpha = pop.alpha();
    const double K = static_cast<double>(cfg.K);
    const double a = cfg.area;
    const double residual = cfg.cache_slots() / K - static_cast<double>(M);
    if (!(residual > 0.0)) throw InfeasibleError("mds_boundaries: nonpositive residual budget");

    MdsBoundaries b;
    double m2_raw, m1_raw;
    if (alpha > 2.0) {
        m2_raw = std::pow(residual, 2.0 / alpha);
        m1_raw = std::pow(K * residual * a, 2.0 / alpha);
    } else {
        m2_raw = residual * std::pow(1.0 / (a * K), 2.0 / alpha - 1.0);
        m1_raw = residual * K * a;
    }
    b.m2 = round_clamp(m2_raw, 1, M);
    b.m1 = std::min(round_clamp(m1_raw, 1, M), b.m2);

    // Coupled equation for m2 once m1 is eliminated through the ratio law.
    std::vector<double> h_half(M + 1, 0.0);
    for (std::size_t i = 1; i <= M; ++i)
        h_half[i] = h_half[i - 1] + std::pow(static_cast<double>(i), -alpha / 2.0);
    const double coupling = std::pow(K * a, 2.0 / alpha - 1.0);
    auto g = [&](std::size_t x) {
        const double xd = static_cast<double>(x);
        const double num = residual + static_cast<double>(M) - xd * coupling - (static_cast<double>(M) - xd + 1.0);
        if (num <= 0.0) return 0.0;
        return std::pow(num / h_half[x], 2.0 / alpha);
    };

    std::size_t x = b.m2;
    b.fixed_point_converged = false;
    for (std::size_t it = 1; it <= 1000; ++it) {
        const std::size_t next = round_clamp(g(x), 1, M);
        b.fixed_point_iterations = it;
        if (next == x) {
            b.fixed_point_converged = true;
            break;
        }
        x = next;
    }
    if (!b.fixed_point_converged) {
        // Integer bisection on g(x) - x as a fallback; result stays flagged.
        std::size_t lo = 1, hi = M;
        if (g(lo) <= static_cast<double>(lo)) {
            x = lo;
        } else if (g(hi) >= static_cast<double>(hi)) {
            x = hi;
        } else {
            while (hi - lo > 1) {
                const std::size_t mid = lo + (hi - lo) / 2;
                (g(mid) > static_cast<double>(mid) ? lo : hi) = mid;
            }
            x = hi;
        }
    }
    b.m2_fixed_point = x;
    return b;
}

Allocation mds_allocation(const NetworkConfig& cfg, const PopularityModel& pop) {
    const std::size_t M = pop.size();
    require_budget(cfg, M);
    const double K = static_cast<double>(cfg.K);
    const double band_cap = mds_band_cap(cfg);
    const double cap = std::max(mds_cap(cfg), K);
    const double budget = cfg.cache_slots();
    const auto pmf = pop.pmf();
    const double p_min = pmf[M - 1];
    const double p_max = pmf[0];
    const double n = static_cast<double>(cfg.n);

    auto wf = detail::water_fill(pmf, K / cfg.area, K, band_cap, budget, p_min * cfg.area / (n * n),
                                 p_max / cfg.area, 1e-12, 400);

    Allocation out;
    out.kind = AllocationKind::Mds;
    out.values = std::move(wf.values);
    if (wf.all_at_hi) {
        const double spare = budget - static_cast<double>(M) * band_cap;
        const double lift = std::min(cap, band_cap + spare / static_cast<double>(M));
        for (double& v : out.values) v = std::max(v, lift);
    }

    const std::size_t head = leading_at_cap(out.values, uncoded_cap(cfg));
    out.m1 = head + 1;
    std::size_t m2 = out.m1;
    while (m2 <= M && out.values[m2 - 1] > K * (1.0 + kRelEps)) ++m2;
    out.m2 = m2;
    out.budget_used = std::accumulate(out.values.begin(), out.values.end(), 0.0);
    return out;
}

ScalingRecord delay_scaling(const NetworkConfig& cfg, const PopularityModel& pop, Strategy strategy) {
    const double K = static_cast<double>(cfg.K);
    const double n = static_cast<double>(cfg.n);
    const double a = cfg.area;
    const double alpha = pop.alpha();
    const double M = static_cast<double>(pop.size());
    const double h = pop.h_alpha();
    const double hh = pop.h_half_alpha();

    // Growth class of H_{alpha/2}(M)^2 / H_alpha(M).
    std::string ratio_class;
    if (alpha > 2.0)
        ratio_class = "";
    else if (alpha == 2.0)
        ratio_class = "log(M)^2";
    else if (alpha > 1.0)
        ratio_class = "M^" + fmt(2.0 - alpha);
    else if (alpha == 1.0)
        ratio_class = "M/log(M)";
    else
        ratio_class = "M";
    auto over_na = [&](const std::string& prefix) {
        std::string num = prefix;
        if (!ratio_class.empty()) num += (num.empty() ? "" : "*") + ratio_class;
        if (num.empty()) num = "1";
        return num + "/(n*a)";
    };

    ScalingRecord rec;
    if (strategy == Strategy::UncodedSeq) {
        const double t = K * hh * hh / (n * a * h);
        rec.value = std::max(K, t);
        if (K >= t) {
            rec.dominant_term = "K";
            rec.symbolic_class = "K";
        } else {
            rec.dominant_term = "K*H_half^2/(n*a*H)";
            rec.symbolic_class = over_na("K");
        }
    } else {
        std::size_t m1 = 1, m2 = 1;
        bool have_bounds = true;
        try {
            const auto b = mds_boundaries(cfg, pop);
            m1 = b.m1;
            m2 = b.m2;
        } catch (const InfeasibleError&) {
            have_bounds = false;
        }
        const double half = M / 2.0;
        if (have_bounds && static_cast<double>(m1) > half) {
            rec.value = K;
            rec.dominant_term = "K";
            rec.symbolic_class = "K";
        } else if (!have_bounds || static_cast<double>(m2) > half) {
            const double t = hh * hh / (n * a * h);
            rec.value = std::max(K, t);
            rec.dominant_term = K >= t ? "K" : "H_half^2/(n*a*H)";
            rec.symbolic_class = K >= t ? "K" : over_na("");
        } else {
            const double hm2 = harmonic_sum(m2, alpha / 2.0);
            const double t2 = hm2 * hm2 / (a * h * (n - M));
            const double t3 = std::log(K) / a;
            rec.value = std::max({K, t2, t3});
            if (rec.value == K) {
                rec.dominant_term = rec.symbolic_class = "K";
            } else if (rec.value == t2) {
                rec.dominant_term = "H_half(m2)^2/(a*H*(n-M))";
                rec.symbolic_class = "H_half(m2)^2/(a*(n-M))";
            } else {
                rec.dominant_term = "log(K)/a";
                rec.symbolic_class = "log(K)/a";
            }
        }
    }
    rec.throughput = 1.0 / (n * a * rec.value);
    rec.throughput_class = "1/(n*a*(" + rec.symbolic_class + "))";
    return rec;
}

std::vector<std::string> check_allocation(const Allocation& alloc, const NetworkConfig& cfg, double slack) {
    std::vector<std::string> errs;
    const auto& v = alloc.values;
    const std::size_t M = v.size();
    if (M == 0) {
        errs.emplace_back("empty allocation");
        return errs;
    }
    const double K = static_cast<double>(cfg.K);
    const bool coded = alloc.kind == AllocationKind::Mds;
    const double lo = coded ? K : 1.0;
    const double hi = coded ? std::max(mds_cap(cfg), K) : uncoded_cap(cfg);
    for (std::size_t m = 0; m < M; ++m) {
        if (!std::isfinite(v[m]) || v[m] < lo * (1.0 - slack) || v[m] > hi * (1.0 + slack))
            errs.push_back("value " + fmt(v[m]) + " at m=" + std::to_string(m + 1) + " outside [" + fmt(lo) +
                           ", " + fmt(hi) + "]");
        if (m + 1 < M && v[m + 1] > v[m] * (1.0 + slack))
            errs.push_back("values increase at m=" + std::to_string(m + 1));
    }
    const double used = std::accumulate(v.begin(), v.end(), 0.0) * (coded ? 1.0 : K);
    if (used > cfg.cache_slots() * (1.0 + slack))
        errs.push_back("budget " + fmt(used) + " exceeds S*n = " + fmt(cfg.cache_slots()));
    if (alloc.m1 < 1 || alloc.m1 > M + 1) errs.push_back("m1 out of range");
    if (alloc.m2 && (*alloc.m2 < alloc.m1 || *alloc.m2 > M + 1)) errs.push_back("m2 out of range");
    return errs;
}

}  // namespace mobicache
