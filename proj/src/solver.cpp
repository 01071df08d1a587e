#include "mobicache/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mobicache/delay_model.hpp"
#include "mobicache/errors.hpp"
#include "waterfill.hpp"

namespace mobicache {

namespace {

constexpr std::size_t kMaxBisection = 200;

bool budget_feasible(const NetworkConfig& cfg, std::size_t M) {
    return cfg.cache_slots() >= static_cast<double>(cfg.K) * static_cast<double>(M);
}

SolverReport infeasible_report(AllocationKind kind) {
    SolverReport rep;
    rep.allocation.kind = kind;
    rep.status = SolverStatus::Infeasible;
    rep.objective = std::numeric_limits<double>::infinity();
    return rep;
}

double uncoded_hi(const NetworkConfig& cfg) { return std::min(1.0 / cfg.area, static_cast<double>(cfg.n)); }

double coded_hi(const NetworkConfig& cfg) {
    return std::max(static_cast<double>(cfg.K),
                    std::min(1.0 / cfg.area + static_cast<double>(cfg.K), static_cast<double>(cfg.n)));
}

double coded_band_hi(const NetworkConfig& cfg) { return std::max(static_cast<double>(cfg.K), uncoded_hi(cfg)); }

std::size_t first_below(const std::vector<double>& v, double cap) {
    std::size_t c = 0;
    while (c < v.size() && v[c] >= cap * (1.0 - 1e-9)) ++c;
    return c + 1;
}

void fill_mds_boundaries(Allocation& alloc, const NetworkConfig& cfg) {
    const double K = static_cast<double>(cfg.K);
    alloc.m1 = first_below(alloc.values, coded_band_hi(cfg));
    std::size_t m2 = alloc.m1;
    while (m2 <= alloc.values.size() && alloc.values[m2 - 1] > K * (1.0 + 1e-12)) ++m2;
    alloc.m2 = m2;
    alloc.budget_used = std::accumulate(alloc.values.begin(), alloc.values.end(), 0.0);
}

// Sum over the j = 0..K-1 terms of 1 / (a (r - j)^2), the magnitude of the
// derivative of the coded order-form delay. `strict` drops terms sitting
// exactly on their saturation point (right derivative), otherwise they are
// kept (left derivative). Terms within `kink_tol` of saturation count as on it.
double coded_slope(double r, std::size_t K, double a, bool strict, double kink_tol = 0.0) {
    double s = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
        const double x = r - static_cast<double>(j);
        const double ax = a * x;
        const bool on_kink = std::abs(ax - 1.0) <= kink_tol;
        const bool active = on_kink ? !strict : (strict ? ax < 1.0 : ax <= 1.0);
        if (active) s += 1.0 / (a * x * x);
    }
    return s;
}

}  // namespace

SolverReport solve_uncoded(const PopularityModel& pop, const NetworkConfig& cfg, double tol) {
    const std::size_t M = pop.size();
    if (!budget_feasible(cfg, M)) return infeasible_report(AllocationKind::Uncoded);

    const auto pmf = pop.pmf();
    const double a = cfg.area;
    const double n = static_cast<double>(cfg.n);
    const double K = static_cast<double>(cfg.K);
    const double hi = std::max(1.0, uncoded_hi(cfg));
    const double budget = cfg.cache_slots() / K;

    auto wf = detail::water_fill(pmf, 1.0 / a, 1.0, hi, budget, pmf[M - 1] * a / (n * n), pmf[0] / a, tol,
                                 kMaxBisection);

    SolverReport rep;
    rep.allocation.kind = AllocationKind::Uncoded;
    rep.allocation.values = std::move(wf.values);
    rep.dual_delta = wf.delta;
    rep.iterations = wf.iterations;
    const auto& X = rep.allocation.values;
    rep.allocation.m1 = first_below(X, hi);
    const double total = std::accumulate(X.begin(), X.end(), 0.0);
    rep.allocation.budget_used = K * total;

    // Stationarity of p / (a X^2) = delta on free entries, sign conditions on
    // clipped ones, and budget complementary slackness.
    double res = 0.0;
    const double delta = wf.delta;
    if (delta > 0.0) {
        for (std::size_t m = 0; m < M; ++m) {
            const double g = pmf[m] / (a * X[m] * X[m]);
            if (X[m] >= hi * (1.0 - 1e-12))
                res = std::max(res, (delta - g) / delta);
            else if (X[m] <= 1.0 + 1e-12)
                res = std::max(res, (g - delta) / delta);
            else
                res = std::max(res, std::abs(g - delta) / delta);
        }
        res = std::max(res, std::abs(total - budget) / budget);
    } else {
        for (std::size_t m = 0; m < M; ++m)
            if (X[m] < hi * (1.0 - 1e-12)) res = std::max(res, 1.0);
        res = std::max(res, std::max(0.0, total - budget) / budget);
    }
    rep.kkt_residual = std::max(res, 0.0);
    rep.objective = expected_delay_uncoded(cfg, pmf, X).order_slots;
    rep.status = wf.converged ? SolverStatus::Converged : SolverStatus::IterationLimit;
    return rep;
}

SolverReport solve_mds(const PopularityModel& pop, const NetworkConfig& cfg, double /*tol*/) {
    const std::size_t M = pop.size();
    if (!budget_feasible(cfg, M)) return infeasible_report(AllocationKind::Mds);

    const auto pmf = pop.pmf();
    const double a = cfg.area;
    const double K = static_cast<double>(cfg.K);
    const double U = coded_band_hi(cfg);
    const double cap = coded_hi(cfg);
    const double budget = cfg.cache_slots();

    // Regime III delay of one content cached at exactly K pieces.
    const double tail_delay = mds_content_delay_order(a, cfg.K, K);

    // 1-based prefix sums: P[i] = sum_{m<=i} p_m, Q[i] = sum_{m<=i} sqrt(p_m).
    std::vector<double> P(M + 1, 0.0), Q(M + 1, 0.0);
    for (std::size_t i = 1; i <= M; ++i) {
        P[i] = P[i - 1] + pmf[i - 1];
        Q[i] = Q[i - 1] + std::sqrt(pmf[i - 1]);
    }

    const double slack = 1e-12;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_m1 = 0, best_m2 = 0;
    double best_sc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t m1 = 1; m1 <= M + 1; ++m1) {
        const double head = static_cast<double>(m1 - 1);
        for (std::size_t m2 = m1; m2 <= M + 1; ++m2) {
            ++pairs;
            const double tail = static_cast<double>(M + 1 - m2);
            const double sc = budget - head * U - tail * K;
            double obj = K * P[m1 - 1] + tail_delay * (P[M] - P[m2 - 1]);
            if (m2 > m1) {
                if (!(sc > 0.0)) continue;
                const double W = Q[m2 - 1] - Q[m1 - 1];
                const double r_first = std::sqrt(pmf[m1 - 1]) / W * sc;
                const double r_last = std::sqrt(pmf[m2 - 2]) / W * sc;
                if (r_first > U * (1.0 + slack) || r_last < K * (1.0 - slack)) continue;
                obj += K * W * W / (a * sc);
            } else if (sc < -slack * budget) {
                continue;
            }
            if (obj < best * (1.0 - 1e-12)) {
                best = obj;
                best_m1 = m1;
                best_m2 = m2;
                best_sc = sc;
            }
        }
    }

    SolverReport rep;
    rep.allocation.kind = AllocationKind::Mds;
    rep.iterations = pairs;
    if (best_m1 == 0) {
        rep.status = SolverStatus::Infeasible;
        rep.objective = std::numeric_limits<double>::infinity();
        return rep;
    }

    auto& r = rep.allocation.values;
    r.assign(M, K);
    for (std::size_t m = 0; m + 1 < best_m1; ++m) r[m] = U;
    if (best_m2 > best_m1) {
        const double W = Q[best_m2 - 1] - Q[best_m1 - 1];
        for (std::size_t m = best_m1 - 1; m + 1 < best_m2; ++m) r[m] = std::sqrt(pmf[m]) / W * best_sc;
        rep.dual_delta = K * W * W / (a * best_sc * best_sc);
    } else if (best_m1 > 1 && best_sc > 0.0) {
        const double lift = std::min(cap - U, best_sc / static_cast<double>(best_m1 - 1));
        for (std::size_t m = 0; m + 1 < best_m1; ++m) r[m] = U + lift;
    }
    fill_mds_boundaries(rep.allocation, cfg);

    // Middle-band proportionality check doubles as the stationarity residual.
    double res = 0.0;
    if (best_m2 > best_m1 + 1) {
        const double ref = r[best_m1 - 1] / std::sqrt(pmf[best_m1 - 1]);
        for (std::size_t m = best_m1; m + 1 < best_m2; ++m)
            res = std::max(res, std::abs(r[m] / std::sqrt(pmf[m]) - ref) / ref);
    }
    rep.kkt_residual = res;
    rep.objective = expected_delay_mds(cfg, pmf, r).order_slots;
    rep.status = SolverStatus::Converged;
    return rep;
}

SolverReport solve_mds_convex(const PopularityModel& pop, const NetworkConfig& cfg, double tol) {
    const std::size_t M = pop.size();
    if (!budget_feasible(cfg, M)) return infeasible_report(AllocationKind::Mds);

    const auto pmf = pop.pmf();
    const double a = cfg.area;
    const std::size_t Ki = cfg.K;
    const double K = static_cast<double>(Ki);
    // Every term saturates once r - (K - 1) >= 1/a; more pieces do not help.
    const double hi = std::min(coded_hi(cfg), std::max(K, 1.0 / a + K - 1.0));
    const double budget = cfg.cache_slots();

    auto piece = [&](double p, double delta) {
        if (p * coded_slope(K, Ki, a, true) <= delta) return K;
        if (p * coded_slope(hi, Ki, a, false) >= delta) return hi;
        double lo_r = K, hi_r = hi;
        for (int it = 0; it < 200 && hi_r - lo_r > 1e-15 * hi_r; ++it) {
            const double mid = 0.5 * (lo_r + hi_r);
            (p * coded_slope(mid, Ki, a, true) > delta ? lo_r : hi_r) = mid;
        }
        double r = 0.5 * (lo_r + hi_r);
        // Snap onto a saturation kink when bisection has closed in on one.
        for (std::size_t j = 0; j < Ki; ++j) {
            const double kink = static_cast<double>(j) + 1.0 / a;
            if (std::abs(r - kink) <= 1e-12 * kink) r = kink;
        }
        return std::clamp(r, K, hi);
    };
    auto profile = [&](double delta, std::vector<double>& out) {
        double s = 0.0;
        for (std::size_t m = 0; m < M; ++m) s += (out[m] = piece(pmf[m], delta));
        return s;
    };

    SolverReport rep;
    rep.allocation.kind = AllocationKind::Mds;
    auto& r = rep.allocation.values;
    r.assign(M, hi);
    double delta = 0.0;
    bool converged = true;

    if (static_cast<double>(M) * hi > budget) {
        const double n = static_cast<double>(cfg.n);
        double d_lo = pmf[M - 1] * a / (n * n), d_hi = pmf[0] * coded_slope(K, Ki, a, false) * 4.0 + 1.0;
        std::vector<double> tmp(M);
        for (int g = 0; profile(d_lo, tmp) < budget && g < 400; ++g) d_lo /= 4.0;
        converged = false;
        for (std::size_t it = 0; it < kMaxBisection; ++it) {
            rep.iterations = it + 1;
            const double mid = std::sqrt(d_lo * d_hi);
            const double s = profile(mid, tmp);
            (s > budget ? d_lo : d_hi) = mid;
            if (std::abs(s - budget) <= tol * budget * 1e-2 || d_hi / d_lo - 1.0 < 1e-15) {
                converged = true;
                break;
            }
        }
        delta = std::sqrt(d_lo * d_hi);
        profile(delta, r);
        // Remove any residual overshoot from the feasible side of the bracket.
        if (std::accumulate(r.begin(), r.end(), 0.0) > budget) {
            delta = d_hi;
            profile(delta, r);
        }
    }

    fill_mds_boundaries(rep.allocation, cfg);
    rep.dual_delta = delta;

    double res = 0.0;
    const double total = std::accumulate(r.begin(), r.end(), 0.0);
    if (delta > 0.0) {
        const double kink_tol = 1e-9;
        for (std::size_t m = 0; m < M; ++m) {
            const double g_right = pmf[m] * coded_slope(r[m], Ki, a, true, kink_tol);
            const double g_left = pmf[m] * coded_slope(r[m], Ki, a, false, kink_tol);
            double v;
            if (r[m] <= K * (1.0 + 1e-12))
                v = (g_right - delta) / delta;
            else if (r[m] >= hi * (1.0 - 1e-12))
                v = (delta - g_left) / delta;
            else
                v = std::max(g_right - delta, delta - g_left) / delta;
            res = std::max(res, v);
        }
        res = std::max(res, std::abs(total - budget) / budget);
    }
    rep.kkt_residual = std::max(0.0, res);
    rep.objective = expected_delay_mds(cfg, pmf, r).order_slots;
    rep.status = converged ? SolverStatus::Converged : SolverStatus::IterationLimit;
    return rep;
}

SolverReport brute_force(const PopularityModel& pop, const NetworkConfig& cfg, Strategy strategy,
                         ObjectiveKind kind) {
    const std::size_t M = pop.size();
    if (!budget_feasible(cfg, M)) throw InfeasibleError("brute_force: S*n < K*M");
    if (M > 4) throw SearchSpaceError("brute_force: M must be <= 4");

    const bool coded = strategy == Strategy::MdsRandom;
    const long K = static_cast<long>(cfg.K);
    const long inv_a = static_cast<long>(std::floor(1.0 / cfg.area + 1e-9));
    const long n = static_cast<long>(cfg.n);
    const long lo = coded ? K : 1;
    const long hi = std::max(lo, std::min(coded ? inv_a + K : inv_a, n));
    if (hi > 12) throw SearchSpaceError("brute_force: integer cap exceeds 12");
    const double points = std::pow(static_cast<double>(hi - lo + 1), static_cast<double>(M));
    if (points > 1e7) throw SearchSpaceError("brute_force: more than 1e7 points");

    const auto pmf = pop.pmf();
    const double limit = coded ? cfg.cache_slots() : cfg.cache_slots() / static_cast<double>(K);

    // Per-content delay for every admissible integer value.
    std::vector<std::vector<double>> table(M, std::vector<double>(static_cast<std::size_t>(hi - lo + 1)));
    for (std::size_t m = 0; m < M; ++m) {
        for (long v = lo; v <= hi; ++v) {
            const std::vector<double> one{1.0};
            const std::vector<double> val{static_cast<double>(v)};
            const DelayEstimate d = coded ? expected_delay_mds(cfg, one, val) : expected_delay_uncoded(cfg, one, val);
            table[m][static_cast<std::size_t>(v - lo)] =
                pmf[m] * (kind == ObjectiveKind::Order ? d.order_slots : d.exact_slots);
        }
    }

    std::vector<long> cur(M, lo), best_x;
    double best = std::numeric_limits<double>::infinity();
    std::size_t visited = 0;
    for (;;) {
        ++visited;
        const double used = static_cast<double>(std::accumulate(cur.begin(), cur.end(), 0L));
        if (used <= limit + 1e-9) {
            double obj = 0.0;
            for (std::size_t m = 0; m < M; ++m) obj += table[m][static_cast<std::size_t>(cur[m] - lo)];
            if (obj < best) {
                best = obj;
                best_x = cur;
            }
        }
        std::size_t d = M;
        while (d > 0 && cur[d - 1] == hi) cur[--d] = lo;
        if (d == 0) break;
        ++cur[d - 1];
    }

    SolverReport rep;
    rep.allocation.kind = coded ? AllocationKind::Mds : AllocationKind::Uncoded;
    rep.allocation.values.assign(best_x.begin(), best_x.end());
    if (coded) {
        fill_mds_boundaries(rep.allocation, cfg);
    } else {
        rep.allocation.m1 = first_below(rep.allocation.values, uncoded_hi(cfg));
        rep.allocation.budget_used =
            static_cast<double>(K) * std::accumulate(rep.allocation.values.begin(), rep.allocation.values.end(), 0.0);
    }
    rep.objective = best;
    rep.iterations = visited;
    rep.status = SolverStatus::Converged;
    return rep;
}

}  // namespace mobicache
