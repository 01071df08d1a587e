#pragma once

#include <stdexcept>
#include <string>

namespace mobicache {

/// Raised when a cache budget cannot satisfy the per-content lower bounds,
/// or a placement step needs more distinct nodes than the network has.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the exhaustive oracle when the enumeration box is too large.
class SearchSpaceError : public std::runtime_error {
public:
    explicit SearchSpaceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mobicache
