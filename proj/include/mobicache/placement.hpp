#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mobicache/allocation.hpp"
#include "mobicache/network.hpp"

namespace mobicache {

/// Which (content, subpacket) pairs every node caches. For coded content the
/// subpacket id is the coded-subpacket index 0..ceil(r_m)-1.
struct CacheAssignment {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> per_node;
    std::vector<std::size_t> load;

    std::size_t nodes() const { return per_node.size(); }
};

/// Copies placed per subpacket (uncoded) or coded pieces per content (coded):
/// ceil(value) with a 1e-9 tolerance so 3.0000000001 still counts as 3.
std::size_t ceil_copies(double value);

/// Load-balanced placement. Contents are visited in ascending order; each
/// step hands one copy to each of the least-loaded nodes, drawing uniformly
/// among equally loaded candidates. Uncoded content takes K steps of
/// ceil(X_m) nodes; coded content takes one step of ceil(r_m) nodes.
/// Throws InfeasibleError when a step needs more than n nodes or the ceiled
/// total exceeds 2 * S * n.
CacheAssignment place(const Allocation& alloc, const NetworkConfig& cfg, std::uint64_t seed);

struct PlacementReport {
    std::size_t max_load = 0;
    std::size_t min_load = 0;
    std::vector<std::string> copy_count_errors;
};

/// Recomputes loads and copy counts from per_node. Never throws.
PlacementReport verify(const CacheAssignment& assignment, const Allocation& alloc, const NetworkConfig& cfg);

/// Line format `node_id content_id subpacket_id`, preceded by `# nodes <n>`.
void write_assignment(std::ostream& os, const CacheAssignment& assignment);
/// Lines starting with '#' are comments except the `# nodes <n>` header,
/// which fixes the node count. Throws std::runtime_error on malformed input.
CacheAssignment read_assignment(std::istream& is, std::size_t n_hint = 0);

}  // namespace mobicache
