#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mobicache {

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    std::string detail;
};

struct SelfTestOptions {
    bool inject_codec_fault = false;  // run the codec check on a field with a flipped antilog entry
    std::size_t brute_force_M = 3;    // library size of the oracle instances; above 4 the check is skipped
    std::size_t brute_force_instances = 20;
    std::uint64_t seed = 1;
};

std::vector<CheckResult> run_selftest(const SelfTestOptions& opts);

/// True when no check failed (skipped checks do not count as failures).
bool selftest_passed(const std::vector<CheckResult>& results);

}  // namespace mobicache
