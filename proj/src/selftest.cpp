#include "mobicache/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mobicache/allocation.hpp"
#include "mobicache/delay_model.hpp"
#include "mobicache/errors.hpp"
#include "mobicache/mds_codec.hpp"
#include "mobicache/placement.hpp"
#include "mobicache/solver.hpp"

namespace mobicache {

namespace {

CheckResult check_delay_oracles() {
    CheckResult r{"delay-model oracles", CheckStatus::Pass, ""};
    const auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    auto cfg = NetworkConfig::make(100, 0.25, 2);
    const std::vector<double> one{1.0}, x4{4.0}, r3{3.0};
    const bool ok = near(contact_prob(0.25, 2), 0.4375) &&
                    near(expected_delay_uncoded(cfg, one, x4).exact_slots, 2.0 / (1.0 - std::pow(0.75, 4))) &&
                    near(expected_delay_mds(cfg, one, r3).exact_slots,
                         1.0 / (1.0 - std::pow(0.75, 3)) + 1.0 / (1.0 - 0.75 * 0.75));
    if (!ok) {
        r.status = CheckStatus::Fail;
        r.detail = "closed-form delay values disagree";
    }
    return r;
}

CheckResult check_brute_force(const SelfTestOptions& opts) {
    CheckResult r{"solver vs brute force", CheckStatus::Pass, ""};
    if (opts.brute_force_M > 4) {
        r.status = CheckStatus::Skipped;
        r.detail = "warning: M=" + std::to_string(opts.brute_force_M) + " exceeds the brute-force limit of 4";
        return r;
    }
    std::mt19937_64 rng(opts.seed);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < opts.brute_force_instances; ++i) {
        const double alpha = std::uniform_real_distribution<double>(0.3, 3.0)(rng);
        const std::size_t K = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        const double inv_a = static_cast<double>(std::uniform_int_distribution<int>(2, 12 - static_cast<int>(K))(rng));
        const std::size_t n = std::uniform_int_distribution<std::size_t>(opts.brute_force_M + 1, 12)(rng);
        NetworkConfig cfg = NetworkConfig::make(n, 1.0 / inv_a, K);
        const PopularityModel pop(opts.brute_force_M, alpha);
        for (Strategy s : {Strategy::UncodedSeq, Strategy::MdsRandom}) {
            const SolverReport cont = s == Strategy::UncodedSeq ? solve_uncoded(pop, cfg) : solve_mds_convex(pop, cfg);
            const SolverReport integer = brute_force(pop, cfg, s, ObjectiveKind::Order);
            const double c = cont.objective, b = integer.objective;
            if (!(c <= b * (1.0 + 1e-9) && b <= 2.0 * c * (1.0 + 1e-9))) {
                std::ostringstream os;
                os << "instance " << i << ": continuous " << c << " vs integer " << b;
                r.status = CheckStatus::Fail;
                r.detail = os.str();
                return r;
            }
            ++checked;
        }
    }
    r.detail = std::to_string(checked) + " solves bracketed";
    return r;
}

CheckResult check_codec(const SelfTestOptions& opts) {
    CheckResult r{"codec MDS property", CheckStatus::Pass, ""};
    const Gf256 field = opts.inject_codec_fault ? Gf256::with_corrupted_exp(1, 3) : Gf256::standard();
    const MdsCodec codec(field);

    // Known answer: K=2 data [1, 2] at points 1..3.
    const std::vector<std::vector<std::uint8_t>> ka{{0x01}, {0x02}};
    const auto kc = codec.encode(ka, 3);
    if (kc[0].payload[0] != 0x03 || kc[1].payload[0] != 0x05 || kc[2].payload[0] != 0x07) {
        r.status = CheckStatus::Fail;
        r.detail = "known-answer encoding mismatch";
        return r;
    }

    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<int> byte(0, 255);
    std::size_t decodes = 0;
    for (std::size_t K = 1; K <= 4; ++K) {
        for (std::size_t rr = K; rr <= 8; ++rr) {
            std::vector<std::vector<std::uint8_t>> data(K, std::vector<std::uint8_t>(16));
            for (auto& d : data)
                for (auto& b : d) b = static_cast<std::uint8_t>(byte(rng));
            const auto coded = codec.encode(data, rr);
            std::vector<std::size_t> idx(K);
            for (std::size_t i = 0; i < K; ++i) idx[i] = i;
            for (;;) {
                std::vector<CodedSubpacket> pick;
                for (std::size_t i : idx) pick.push_back(coded[i]);
                if (codec.decode(pick, K) != data) {
                    r.status = CheckStatus::Fail;
                    r.detail = "decode mismatch at K=" + std::to_string(K) + " r=" + std::to_string(rr);
                    return r;
                }
                ++decodes;
                std::size_t j = K;
                while (j > 0 && idx[j - 1] == rr - K + j - 1) --j;
                if (j == 0) break;
                ++idx[j - 1];
                for (std::size_t t = j; t < K; ++t) idx[t] = idx[t - 1] + 1;
            }
        }
    }
    r.detail = std::to_string(decodes) + " subsets decoded";
    return r;
}

CheckResult check_placement(const SelfTestOptions& opts) {
    CheckResult r{"placement load bound", CheckStatus::Pass, ""};
    const auto cfg = NetworkConfig::make(200, 0.02, 4);
    const PopularityModel pop(10, 1.0);
    const Allocation alloc = uncoded_allocation(cfg, pop);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto rep = verify(place(alloc, cfg, opts.seed + s), alloc, cfg);
        if (!rep.copy_count_errors.empty()) {
            r.status = CheckStatus::Fail;
            r.detail = rep.copy_count_errors.front();
            return r;
        }
    }
    r.detail = "20 placements within 2S";
    return r;
}

}  // namespace

std::vector<CheckResult> run_selftest(const SelfTestOptions& opts) {
    std::vector<CheckResult> out;
    auto guarded = [&](auto&& fn, const char* name) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, CheckStatus::Fail, std::string("exception: ") + e.what()});
        }
    };
    guarded([&] { return check_delay_oracles(); }, "delay-model oracles");
    guarded([&] { return check_brute_force(opts); }, "solver vs brute force");
    guarded([&] { return check_codec(opts); }, "codec MDS property");
    guarded([&] { return check_placement(opts); }, "placement load bound");
    return out;
}

bool selftest_passed(const std::vector<CheckResult>& results) {
    return std::none_of(results.begin(), results.end(),
                        [](const CheckResult& r) { return r.status == CheckStatus::Fail; });
}

}  // namespace mobicache
