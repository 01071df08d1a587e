#include "mobicache/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace mobicache {

namespace {

using Rng = std::mt19937_64;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double wrap(double x) {
    x -= std::floor(x);
    return x >= 1.0 ? 0.0 : x;
}

double torus_gap(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

double torus_dist(double x1, double y1, double x2, double y2) {
    return std::hypot(torus_gap(x1, x2), torus_gap(y1, y2));
}

// Uniform grid over the torus used for range queries. Cells are at least
// `min_side` wide so every in-range node sits in the 3x3 block around the query.
class Grid {
public:
    Grid(double min_side, std::size_t n) {
        g_ = static_cast<std::size_t>(std::floor(1.0 / min_side));
        brute_ = g_ < 3;
        if (brute_) g_ = 1;
        start_.assign(g_ * g_ + 1, 0);
        items_.resize(n);
        cell_.resize(n);
    }

    void rebuild(const std::vector<double>& xs, const std::vector<double>& ys) {
        std::fill(start_.begin(), start_.end(), 0);
        for (std::size_t v = 0; v < xs.size(); ++v) {
            cell_[v] = cell_index(xs[v], ys[v]);
            ++start_[cell_[v] + 1];
        }
        for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t v = 0; v < xs.size(); ++v) items_[fill[cell_[v]]++] = v;
    }

    template <class F>
    void for_each_near(double x, double y, F&& f) const {
        if (brute_) {
            for (std::size_t v : items_) f(v);
            return;
        }
        const std::size_t cx = axis(x), cy = axis(y);
        for (std::size_t dx = 0; dx < 3; ++dx) {
            const std::size_t ix = (cx + g_ - 1 + dx) % g_;
            for (std::size_t dy = 0; dy < 3; ++dy) {
                const std::size_t iy = (cy + g_ - 1 + dy) % g_;
                const std::size_t c = ix * g_ + iy;
                for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) f(items_[k]);
            }
        }
    }

private:
    std::size_t axis(double x) const { return std::min(g_ - 1, static_cast<std::size_t>(x * static_cast<double>(g_))); }
    std::size_t cell_index(double x, double y) const { return axis(x) * g_ + axis(y); }

    std::size_t g_ = 1;
    bool brute_ = true;
    std::vector<std::size_t> start_, items_, cell_;
};

struct Request {
    std::size_t content = 0;
    std::size_t next = 0;      // next subpacket (uncoded) or pieces received (coded)
    std::vector<char> got;     // coded pieces already received
    std::size_t start = 0;
    bool tracked = false;
    bool active = false;
};

struct Link {
    std::size_t rx, tx;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

TrialMetrics run_trial(const NetworkConfig& cfg, const PopularityModel& pop, const CacheAssignment& caches,
                       const SimOptions& opts) {
    cfg.validate();
    const std::size_t n = cfg.n;
    const std::size_t M = pop.size();
    const std::size_t K = cfg.K;
    const bool coded = opts.strategy == Strategy::MdsRandom;
    if (caches.nodes() != n)
        throw std::invalid_argument("run_trial: cache assignment has " + std::to_string(caches.nodes()) +
                                    " nodes, config has " + std::to_string(n));
    if (opts.slots <= opts.warmup) throw std::invalid_argument("run_trial: slots must exceed warmup");

    // Sorted per-node caches and per-piece holder counts.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> cache(n);
    std::vector<std::vector<std::size_t>> holders(M);
    for (std::size_t v = 0; v < n; ++v) {
        cache[v] = caches.per_node[v];
        std::sort(cache[v].begin(), cache[v].end());
        for (auto [m, k] : cache[v]) {
            if (m >= M) throw std::invalid_argument("run_trial: cached content id out of range");
            if (!coded && k >= K) throw std::invalid_argument("run_trial: subpacket id exceeds K");
            if (holders[m].size() <= k) holders[m].resize(k + 1, 0);
            ++holders[m][k];
        }
    }
    auto holds = [&](std::size_t v, std::size_t m, std::size_t k) {
        return std::binary_search(cache[v].begin(), cache[v].end(), std::make_pair(m, k));
    };
    // Coded piece of content m held by v, or npos.
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    auto coded_piece = [&](std::size_t v, std::size_t m) {
        auto it = std::lower_bound(cache[v].begin(), cache[v].end(), std::make_pair(m, std::size_t{0}));
        return (it != cache[v].end() && it->first == m) ? it->second : npos;
    };

    Rng rng(opts.seed);
    const double R = cfg.range();
    const double half = R / 2.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t v = 0; v < n; ++v) {
        xs[v] = uniform01(rng);
        ys[v] = uniform01(rng);
    }
    Grid grid(half, n);

    // Scheduling grid: cells at least (2 + delta) R wide, an even count per axis
    // so the 2x2 coloring stays proper across the wrap-around.
    std::size_t sched_g = static_cast<std::size_t>(std::floor(1.0 / ((2.0 + cfg.delta) * R)));
    if (sched_g >= 2 && sched_g % 2 == 1) --sched_g;
    if (sched_g < 2) sched_g = 1;
    const std::size_t phases = sched_g == 1 ? 1 : 4;

    std::vector<char> requester(n, 1);
    if (opts.requester_fraction < 1.0)
        for (auto& r : requester) r = uniform01(rng) < opts.requester_fraction ? 1 : 0;

    TrialMetrics out;
    out.seed = opts.seed;
    out.per_content_delays.resize(M);
    std::vector<Request> req(n);
    auto start_request = [&](std::size_t u, std::size_t slot) {
        Request& r = req[u];
        r.content = pop.sample(rng);
        r.next = 0;
        r.start = slot;
        r.active = true;
        r.tracked = slot >= opts.warmup && slot < opts.slots;
        if (coded) r.got.assign(holders[r.content].size(), 0);
    };
    std::size_t open_tracked = 0;
    for (std::size_t u = 0; u < n; ++u)
        if (requester[u]) {
            start_request(u, 0);
            open_tracked += req[u].tracked;
        }

    const std::size_t drain = opts.max_drain ? opts.max_drain : 50 * opts.slots;
    double sum = 0.0, sum_sq = 0.0;
    std::size_t window_completions = 0;
    std::vector<std::size_t> eligible;
    std::vector<Link> links;
    std::vector<std::pair<std::size_t, Link>> cell_pick;  // (count, chosen) per scheduling cell
    std::vector<std::size_t> finished;

    std::size_t t = 0;
    for (; t < opts.slots + drain; ++t) {
        if (t >= opts.slots && open_tracked == 0) break;

        if (cfg.mobility == Mobility::Reshuffle) {
            for (std::size_t v = 0; v < n; ++v) {
                xs[v] = uniform01(rng);
                ys[v] = uniform01(rng);
            }
        } else {
            for (std::size_t v = 0; v < n; ++v) {
                const double th = 2.0 * std::numbers::pi * uniform01(rng);
                xs[v] = wrap(xs[v] + cfg.flight_length * std::cos(th));
                ys[v] = wrap(ys[v] + cfg.flight_length * std::sin(th));
            }
        }
        grid.rebuild(xs, ys);

        const bool in_window = t >= opts.warmup && t < opts.slots;
        const std::size_t phase = t % phases;
        links.clear();
        if (opts.mode == SimMode::Scheduled) cell_pick.assign(sched_g * sched_g, {0, Link{0, 0}});

        for (std::size_t u = 0; u < n; ++u) {
            Request& r = req[u];
            if (!r.active) continue;
            const std::size_t m = r.content;
            eligible.clear();
            grid.for_each_near(xs[u], ys[u], [&](std::size_t v) {
                if (torus_gap(xs[u], xs[v]) > half || torus_gap(ys[u], ys[v]) > half) return;
                if (coded) {
                    const std::size_t piece = coded_piece(v, m);
                    if (piece != npos && !r.got[piece]) eligible.push_back(v);
                } else if (holds(v, m, r.next)) {
                    eligible.push_back(v);
                }
            });
            if (in_window) {
                std::size_t copies;
                if (coded) {
                    copies = 0;
                    for (std::size_t i = 0; i < holders[m].size(); ++i) copies += r.got[i] ? 0 : holders[m][i];
                } else {
                    copies = r.next < holders[m].size() ? holders[m][r.next] : 0;
                }
                auto& c = out.contact_counters[copies];
                (eligible.empty() ? c.misses : c.hits) += 1;
            }
            if (eligible.empty()) continue;
            const std::size_t tx =
                eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
            if (opts.mode == SimMode::DelayOnly) {
                links.push_back({u, tx});
            } else {
                const std::size_t cx = std::min(sched_g - 1, static_cast<std::size_t>(xs[u] * static_cast<double>(sched_g)));
                const std::size_t cy = std::min(sched_g - 1, static_cast<std::size_t>(ys[u] * static_cast<double>(sched_g)));
                if (phases > 1 && ((cx % 2) * 2 + (cy % 2)) != phase) continue;
                auto& slot = cell_pick[cx * sched_g + cy];
                // Reservoir choice of one link per active cell.
                ++slot.first;
                if (std::uniform_int_distribution<std::size_t>(1, slot.first)(rng) == 1) slot.second = {u, tx};
            }
        }
        if (opts.mode == SimMode::Scheduled) {
            for (const auto& [count, link] : cell_pick)
                if (count > 0) links.push_back(link);
            const double guard = (1.0 + cfg.delta) * R;
            for (std::size_t i = 0; i < links.size(); ++i)
                for (std::size_t j = 0; j < links.size(); ++j)
                    if (i != j && links[i].tx != links[j].tx &&
                        torus_dist(xs[links[i].rx], ys[links[i].rx], xs[links[j].tx], ys[links[j].tx]) < guard)
                        ++out.protocol_violations;
        }

        finished.clear();
        for (const Link& l : links) {
            Request& r = req[l.rx];
            if (coded) {
                r.got[coded_piece(l.tx, r.content)] = 1;
                ++r.next;
            } else {
                ++r.next;
            }
            if (r.next == K) finished.push_back(l.rx);
        }
        for (std::size_t u : finished) {
            Request& r = req[u];
            const std::size_t delay = t - r.start + 1;
            if (in_window) ++window_completions;
            if (r.tracked) {
                out.per_content_delays[r.content].push_back(static_cast<std::uint32_t>(delay));
                sum += static_cast<double>(delay);
                sum_sq += static_cast<double>(delay) * static_cast<double>(delay);
                ++out.completed;
                --open_tracked;
            }
            r.active = false;
            start_request(u, t + 1);
            open_tracked += req[u].tracked;
        }
    }

    out.slots_run = t;
    out.censored = open_tracked;
    if (out.completed > 0) {
        const double c = static_cast<double>(out.completed);
        out.d_avg_empirical = sum / c;
        const double var = c > 1 ? std::max(0.0, (sum_sq - c * out.d_avg_empirical * out.d_avg_empirical) / (c - 1)) : 0.0;
        out.d_avg_stderr = std::sqrt(var / c);
    }
    out.throughput_empirical =
        static_cast<double>(window_completions) / (static_cast<double>(n) * static_cast<double>(opts.slots - opts.warmup));
    return out;
}

std::vector<TrialMetrics> run_trials(const NetworkConfig& cfg, const PopularityModel& pop,
                                     const CacheAssignment& caches, const SimOptions& opts, std::size_t trials,
                                     std::size_t threads) {
    std::vector<TrialMetrics> results(trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < trials; i = next++) {
            SimOptions o = opts;
            o.seed = derive_seed(opts.seed, i);
            results[i] = run_trial(cfg, pop, caches, o);
        }
    };
    const std::size_t k = std::max<std::size_t>(1, std::min(threads, trials));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < k; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return results;
}

std::pair<double, double> pooled_delay(const std::vector<TrialMetrics>& trials) {
    double sum = 0.0, sum_sq = 0.0, count = 0.0;
    for (const auto& t : trials)
        for (const auto& per : t.per_content_delays)
            for (std::uint32_t d : per) {
                sum += d;
                sum_sq += static_cast<double>(d) * d;
                count += 1.0;
            }
    if (count == 0.0) return {0.0, 0.0};
    const double mean = sum / count;
    const double var = count > 1 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1)) : 0.0;
    return {mean, std::sqrt(var / count)};
}

HittingTimeEstimate estimate_hitting_time(double R, double L, std::size_t n_pairs, std::size_t max_slots,
                                          std::uint64_t seed, std::size_t threads) {
    if (!(R > 0.0) || !(L > 0.0)) throw std::invalid_argument("estimate_hitting_time: R and L must be positive");
    const double ratio = L / R;
    if (ratio < 0.5 || ratio > 2.0)
        throw std::invalid_argument("estimate_hitting_time: L/R must lie in [0.5, 2]");
    if (n_pairs == 0 || max_slots == 0) throw std::invalid_argument("estimate_hitting_time: empty experiment");

    std::vector<std::size_t> times(n_pairs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n_pairs; i = next++) {
            Rng rng(derive_seed(seed, i));
            double x1 = uniform01(rng), y1 = uniform01(rng), x2 = uniform01(rng), y2 = uniform01(rng);
            std::size_t hit = max_slots;
            for (std::size_t s = 1; s <= max_slots; ++s) {
                const double t1 = 2.0 * std::numbers::pi * uniform01(rng);
                const double t2 = 2.0 * std::numbers::pi * uniform01(rng);
                x1 = wrap(x1 + L * std::cos(t1));
                y1 = wrap(y1 + L * std::sin(t1));
                x2 = wrap(x2 + L * std::cos(t2));
                y2 = wrap(y2 + L * std::sin(t2));
                if (torus_dist(x1, y1, x2, y2) <= R) {
                    hit = s;
                    break;
                }
            }
            times[i] = hit;
        }
    };
    const std::size_t k = std::max<std::size_t>(1, std::min(threads, n_pairs));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < k; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    HittingTimeEstimate est;
    est.pairs = n_pairs;
    double sum = 0.0, sum_sq = 0.0;
    std::size_t censored = 0;
    for (std::size_t v : times) {
        sum += static_cast<double>(v);
        sum_sq += static_cast<double>(v) * static_cast<double>(v);
        censored += v == max_slots ? 1 : 0;
    }
    const double c = static_cast<double>(n_pairs);
    est.mean = sum / c;
    const double var = n_pairs > 1 ? std::max(0.0, (sum_sq - c * est.mean * est.mean) / (c - 1)) : 0.0;
    est.stderr_ = std::sqrt(var / c);
    est.censored_fraction = static_cast<double>(censored) / c;
    return est;
}

std::vector<ContactFrequency> empirical_contact_check(const NetworkConfig& cfg, const CacheAssignment& caches,
                                                      std::size_t M, std::size_t slots, std::uint64_t seed) {
    const std::size_t n = caches.nodes();
    std::vector<std::vector<std::size_t>> holder_nodes(M);
    for (std::size_t v = 0; v < n; ++v)
        for (auto [m, k] : caches.per_node[v])
            if (m < M && k == 0) holder_nodes[m].push_back(v);

    const double half = cfg.range() / 2.0;
    Rng rng(seed);
    std::vector<double> xs(n), ys(n);
    std::vector<ContactFrequency> out(M);
    for (std::size_t m = 0; m < M; ++m) {
        out[m].content = m;
        out[m].copies = holder_nodes[m].size();
        out[m].trials = slots;
    }
    for (std::size_t s = 0; s < slots; ++s) {
        for (std::size_t v = 0; v < n; ++v) {
            xs[v] = uniform01(rng);
            ys[v] = uniform01(rng);
        }
        const double px = uniform01(rng), py = uniform01(rng);
        for (std::size_t m = 0; m < M; ++m) {
            for (std::size_t v : holder_nodes[m]) {
                if (torus_gap(px, xs[v]) <= half && torus_gap(py, ys[v]) <= half) {
                    ++out[m].hits;
                    break;
                }
            }
        }
    }
    for (auto& f : out) {
        if (f.trials == 0) continue;
        f.frequency = static_cast<double>(f.hits) / static_cast<double>(f.trials);
        f.stderr_ = std::sqrt(f.frequency * (1.0 - f.frequency) / static_cast<double>(f.trials));
    }
    return out;
}

}  // namespace mobicache
