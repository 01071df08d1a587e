#include "mobicache/placement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "mobicache/errors.hpp"

namespace mobicache {

namespace {

// Nodes grouped by current load. Selecting the c least-loaded nodes walks
// buckets upward and samples uniformly inside the boundary bucket.
class LoadBuckets {
public:
    explicit LoadBuckets(std::size_t n) : buckets_(1) {
        buckets_[0].resize(n);
        for (std::size_t i = 0; i < n; ++i) buckets_[0][i] = i;
    }

    std::vector<std::size_t> take_least_loaded(std::size_t c, std::mt19937_64& rng) {
        std::vector<std::size_t> chosen;
        chosen.reserve(c);
        std::vector<std::pair<std::size_t, std::size_t>> moved;  // (node, new load)
        std::size_t level = min_level_;
        while (chosen.size() < c) {
            auto& b = buckets_[level];
            const std::size_t need = c - chosen.size();
            if (b.size() <= need) {
                for (std::size_t v : b) moved.emplace_back(v, level + 1);
                chosen.insert(chosen.end(), b.begin(), b.end());
                b.clear();
            } else {
                for (std::size_t i = 0; i < need; ++i) {
                    const std::size_t last = b.size() - 1;
                    std::uniform_int_distribution<std::size_t> pick(0, last);
                    std::swap(b[pick(rng)], b[last]);
                    chosen.push_back(b[last]);
                    moved.emplace_back(b[last], level + 1);
                    b.pop_back();
                }
            }
            ++level;
        }
        for (auto [v, l] : moved) {
            if (l >= buckets_.size()) buckets_.resize(l + 1);
            buckets_[l].push_back(v);
        }
        while (buckets_[min_level_].empty()) ++min_level_;
        return chosen;
    }

private:
    std::vector<std::vector<std::size_t>> buckets_;
    std::size_t min_level_ = 0;
};

}  // namespace

std::size_t ceil_copies(double value) {
    return static_cast<std::size_t>(std::max(0.0, std::ceil(value - 1e-9)));
}

CacheAssignment place(const Allocation& alloc, const NetworkConfig& cfg, std::uint64_t seed) {
    const std::size_t n = cfg.n;
    const bool coded = alloc.kind == AllocationKind::Mds;
    const std::size_t steps_per_content = coded ? 1 : cfg.K;

    double total = 0.0;
    for (std::size_t m = 0; m < alloc.values.size(); ++m) {
        const std::size_t c = ceil_copies(alloc.values[m]);
        if (c > n)
            throw InfeasibleError("place: content " + std::to_string(m + 1) + " needs " + std::to_string(c) +
                                  " distinct nodes but n = " + std::to_string(n));
        total += static_cast<double>(c * steps_per_content);
    }
    if (total > 2.0 * cfg.cache_slots())
        throw InfeasibleError("place: ceiled copies exceed 2*S*n");

    CacheAssignment out;
    out.per_node.resize(n);
    out.load.assign(n, 0);
    std::mt19937_64 rng(seed);
    LoadBuckets buckets(n);
    for (std::size_t m = 0; m < alloc.values.size(); ++m) {
        const std::size_t c = ceil_copies(alloc.values[m]);
        for (std::size_t k = 0; k < steps_per_content; ++k) {
            const auto nodes = buckets.take_least_loaded(c, rng);
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                out.per_node[nodes[i]].emplace_back(m, coded ? i : k);
                ++out.load[nodes[i]];
            }
        }
    }
    return out;
}

PlacementReport verify(const CacheAssignment& assignment, const Allocation& alloc, const NetworkConfig& cfg) {
    PlacementReport rep;
    const std::size_t M = alloc.values.size();
    const bool coded = alloc.kind == AllocationKind::Mds;

    // Flat holder counts: content m owns ids [offset[m], offset[m + 1]).
    std::vector<std::size_t> offset(M + 1, 0);
    for (std::size_t m = 0; m < M; ++m) offset[m + 1] = offset[m] + (coded ? ceil_copies(alloc.values[m]) : cfg.K);
    std::vector<std::size_t> holders(offset[M], 0);
    std::vector<std::size_t> content_nodes(M, 0);

    std::vector<std::pair<std::size_t, std::size_t>> sorted;
    bool first = true;
    for (std::size_t v = 0; v < assignment.per_node.size(); ++v) {
        const auto& items = assignment.per_node[v];
        const std::size_t load = items.size();
        rep.max_load = first ? load : std::max(rep.max_load, load);
        rep.min_load = first ? load : std::min(rep.min_load, load);
        first = false;

        sorted.assign(items.begin(), items.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const auto& item = sorted[i];
            if (item.first >= M) {
                rep.copy_count_errors.push_back("node " + std::to_string(v) + " holds unknown content " +
                                                std::to_string(item.first));
                continue;
            }
            if (i > 0 && sorted[i - 1] == item) {
                rep.copy_count_errors.push_back("node " + std::to_string(v) + " holds (" +
                                                std::to_string(item.first) + ", " + std::to_string(item.second) +
                                                ") twice");
                continue;
            }
            if (item.second >= offset[item.first + 1] - offset[item.first]) {
                rep.copy_count_errors.push_back("unexpected subpacket id " + std::to_string(item.second) +
                                                " for content " + std::to_string(item.first));
                continue;
            }
            ++holders[offset[item.first] + item.second];
            if (coded) {
                if (i > 0 && sorted[i - 1].first == item.first)
                    rep.copy_count_errors.push_back("node " + std::to_string(v) + " holds two coded pieces of content " +
                                                    std::to_string(item.first));
                else
                    ++content_nodes[item.first];
            }
        }
    }

    for (std::size_t m = 0; m < M; ++m) {
        const std::size_t want = ceil_copies(alloc.values[m]);
        if (coded) {
            if (content_nodes[m] != want)
                rep.copy_count_errors.push_back("content " + std::to_string(m) + " on " +
                                                std::to_string(content_nodes[m]) + " nodes, expected " +
                                                std::to_string(want));
            for (std::size_t i = 0; i < want; ++i)
                if (holders[offset[m] + i] != 1)
                    rep.copy_count_errors.push_back("content " + std::to_string(m) + " coded piece " +
                                                    std::to_string(i) + " not held exactly once");
        } else {
            for (std::size_t k = 0; k < cfg.K; ++k) {
                const std::size_t got = holders[offset[m] + k];
                if (got != want)
                    rep.copy_count_errors.push_back("subpacket (" + std::to_string(m) + ", " + std::to_string(k) +
                                                    ") has " + std::to_string(got) + " copies, expected " +
                                                    std::to_string(want));
            }
        }
    }
    if (static_cast<double>(rep.max_load) > 2.0 * static_cast<double>(cfg.S))
        rep.copy_count_errors.push_back("max load " + std::to_string(rep.max_load) + " exceeds 2S = " +
                                        std::to_string(2 * cfg.S));
    return rep;
}

void write_assignment(std::ostream& os, const CacheAssignment& assignment) {
    os << "# nodes " << assignment.nodes() << '\n';
    for (std::size_t v = 0; v < assignment.per_node.size(); ++v)
        for (const auto& [m, k] : assignment.per_node[v]) os << v << ' ' << m << ' ' << k << '\n';
}

CacheAssignment read_assignment(std::istream& is, std::size_t n_hint) {
    CacheAssignment out;
    std::size_t n = n_hint;
    std::vector<std::array<std::size_t, 3>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            std::size_t value = 0;
            if (hs >> key && key == "nodes" && hs >> value) n = std::max(n, value);
            continue;
        }
        std::istringstream ls(line);
        std::size_t v, m, k;
        std::string extra;
        if (!(ls >> v >> m >> k) || (ls >> extra))
            throw std::runtime_error("read_assignment: malformed line " + std::to_string(lineno));
        rows.push_back({v, m, k});
        n = std::max(n, v + 1);
    }
    out.per_node.resize(n);
    out.load.assign(n, 0);
    for (const auto& r : rows) {
        out.per_node[r[0]].emplace_back(r[1], r[2]);
        ++out.load[r[0]];
    }
    return out;
}

}  // namespace mobicache
