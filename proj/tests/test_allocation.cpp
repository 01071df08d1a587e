#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mobicache/allocation.hpp"
#include "mobicache/delay_model.hpp"
#include "mobicache/errors.hpp"

using namespace mobicache;

namespace {
NetworkConfig cfg_of(std::size_t n, double a, std::size_t K, std::size_t S = 0) {
    auto c = NetworkConfig::make(n, a, K);
    if (S) c.S = S;
    return c;
}
}  // namespace

TEST_CASE("uncoded regime boundary") {
    CHECK(uncoded_boundary(cfg_of(100, 0.1, 2), PopularityModel(1, 1.0)) == 1);

    // round((n a / H_2(1000))^{1/2}) with H_2(1000) summed independently.
    double h2 = 0.0;
    for (int i = 1; i <= 1000; ++i) h2 += 1.0 / (double(i) * i);
    CHECK(h2 == doctest::Approx(1.6439).epsilon(1e-4));
    const auto expect = static_cast<std::size_t>(std::lround(std::sqrt(100.0 / h2)));
    CHECK(expect == 8);
    CHECK(uncoded_boundary(cfg_of(10000, 0.01, 1), PopularityModel(1000, 4.0)) == 8);

    const double n = 30000.0;
    const auto fig = cfg_of(30000, std::log(n) / n, 20);
    CHECK(uncoded_allocation(fig, PopularityModel(250, 0.5)).m1 == 1);
}

TEST_CASE("uncoded allocation respects the replica cap") {
    // The proportional split 4.686 : 3.314 of budget 8 exceeds the cap 1/a = 4,
    // so both contents sit at the cap.
    const auto a = uncoded_allocation(cfg_of(8, 0.25, 2), PopularityModel(2, 1.0));
    REQUIRE(a.values.size() == 2);
    CHECK(a.values[0] == doctest::Approx(4.0));
    CHECK(a.values[1] == doctest::Approx(4.0));
    CHECK(a.m1 == 3);

    const auto b = uncoded_allocation(cfg_of(10, 0.2, 2), PopularityModel(2, 1.0));
    CHECK(b.values[0] == doctest::Approx(5.0));
    CHECK(b.values[1] == doctest::Approx(5.0));
    CHECK(b.m1 == 3);

    const auto c = uncoded_allocation(cfg_of(50, 0.1, 3), PopularityModel(1, 2.5));
    CHECK(c.values[0] == doctest::Approx(10.0));
}

TEST_CASE("uncoded allocation follows the square-root profile when unsaturated") {
    // Budget 20 over weights sqrt(2/3) : sqrt(1/3), cap 1/a = 50.
    const auto a = uncoded_allocation(cfg_of(20, 0.02, 1), PopularityModel(2, 1.0));
    const double w0 = std::sqrt(2.0 / 3.0), w1 = std::sqrt(1.0 / 3.0);
    CHECK(a.values[0] == doctest::Approx(20.0 * w0 / (w0 + w1)).epsilon(1e-6));
    CHECK(a.values[1] == doctest::Approx(20.0 * w1 / (w0 + w1)).epsilon(1e-6));
    CHECK(a.m1 == 1);
}

TEST_CASE("uncoded allocation invariants across parameters") {
    for (double alpha : {0.5, 1.0, 2.0, 3.5}) {
        for (double area : {0.001, 0.01, 0.05}) {
            const auto cfg = cfg_of(3000, area, 4);
            const PopularityModel pop(200, alpha);
            const auto al = uncoded_allocation(cfg, pop);
            INFO("alpha=" << alpha << " area=" << area);
            CHECK(check_allocation(al, cfg).empty());
        }
    }
}

TEST_CASE("infeasible budget raises") {
    CHECK_THROWS_AS(uncoded_allocation(cfg_of(10, 0.1, 4), PopularityModel(20, 1.0)), InfeasibleError);
}

TEST_CASE("mds regime boundaries") {
    // alpha <= 2: m1 = min(M, round((S n / K - M) K a)), m2 = M.
    const auto b1 = mds_boundaries(cfg_of(10000, 1e-4, 10), PopularityModel(100, 1.0));
    const double residual = 10000.0 - 100.0;
    CHECK(b1.m1 == static_cast<std::size_t>(std::lround(residual * 10 * 1e-4)));
    CHECK(b1.m1 == 10);
    CHECK(b1.m2 == 100);

    // alpha > 2: m2 = round(residual^{2/alpha}), m1 = round((K residual / H_{alpha/2}^... ) form.
    const auto b2 = mds_boundaries(cfg_of(10000, 0.01, 10), PopularityModel(1000, 3.0));
    CHECK(b2.m2 == static_cast<std::size_t>(std::lround(std::pow(9000.0, 2.0 / 3.0))));
    CHECK(b2.m2 == 433);
    CHECK(b2.m1 == static_cast<std::size_t>(std::lround(std::pow(10.0 * 9000.0 / 100.0, 2.0 / 3.0))));
    CHECK(b2.m1 == 93);
    CHECK(b2.fixed_point_converged);

    const auto b3 = mds_boundaries(cfg_of(100, 0.1, 2), PopularityModel(1, 1.0));
    CHECK(b3.m1 == 1);
    CHECK(b3.m2 == 1);
}

TEST_CASE("mds boundaries reject libraries larger than the network") {
    CHECK_THROWS_AS(mds_boundaries(cfg_of(50, 0.1, 2), PopularityModel(60, 1.0)), InfeasibleError);
}

TEST_CASE("mds allocation small cases") {
    const auto a = mds_allocation(cfg_of(6, 0.25, 2), PopularityModel(2, 1.0));
    CHECK(a.values[0] == doctest::Approx(6.0));
    CHECK(a.values[1] == doctest::Approx(6.0));
    CHECK(a.m1 == 3);

    const auto b = mds_allocation(cfg_of(4, 0.25, 2), PopularityModel(2, 1.0));
    CHECK(b.values[0] == doctest::Approx(4.0));
    CHECK(b.values[1] == doctest::Approx(4.0));

    const auto c = mds_allocation(cfg_of(100, 0.25, 2), PopularityModel(1, 1.0));
    CHECK(c.values[0] == doctest::Approx(6.0));
}

TEST_CASE("mds allocation invariants") {
    for (double alpha : {0.5, 1.5, 3.0}) {
        const auto cfg = cfg_of(5000, 0.002, 5);
        const PopularityModel pop(300, alpha);
        const auto al = mds_allocation(cfg, pop);
        INFO("alpha=" << alpha);
        CHECK(check_allocation(al, cfg).empty());
        REQUIRE(al.m2.has_value());
        CHECK(*al.m2 >= al.m1);
    }
}

TEST_CASE("delay scaling classes") {
    const double n = 30000.0;
    const auto cfg3 = cfg_of(30000, std::log(n) / n, 20);
    const auto s3 = delay_scaling(cfg3, PopularityModel(250, 3.0), Strategy::UncodedSeq);
    CHECK(s3.dominant_term == "K");
    CHECK(s3.value == doctest::Approx(20.0));
    CHECK(delay_scaling(cfg3, PopularityModel(250, 3.0), Strategy::MdsRandom).dominant_term == "K");

    const auto small = cfg_of(30000, 5e-5, 20);
    const auto su = delay_scaling(small, PopularityModel(250, 1.5), Strategy::UncodedSeq);
    CHECK(su.symbolic_class == "K*M^0.5/(n*a)");
    CHECK(su.value > 20.0);
    const auto sm = delay_scaling(small, PopularityModel(250, 1.5), Strategy::MdsRandom);
    CHECK(sm.symbolic_class == "M^0.5/(n*a)");
    CHECK(su.value / sm.value == doctest::Approx(20.0));
    CHECK(sm.throughput == doctest::Approx(1.0 / (n * 5e-5 * sm.value)));
}

TEST_CASE("round_clamp rounds half up and clamps") {
    CHECK(round_clamp(2.5, 1, 10) == 3);
    CHECK(round_clamp(2.49, 1, 10) == 2);
    CHECK(round_clamp(-4.0, 1, 10) == 1);
    CHECK(round_clamp(40.0, 1, 10) == 10);
}

TEST_CASE("allocations stay within budget across a library-size sweep") {
    // Lifting tail entries to one copy can cascade; the budget must still hold.
    const double n = 30000.0;
    const auto cfg = cfg_of(30000, std::log(n) / n, 5);
    for (std::size_t M : {10, 20, 50, 100, 200, 500, 1000, 2000, 10000}) {
        for (double alpha : {0.5, 1.25, 3.0}) {
            const PopularityModel pop(M, alpha);
            INFO("M=" << M << " alpha=" << alpha);
            CHECK(check_allocation(uncoded_allocation(cfg, pop), cfg).empty());
            CHECK(check_allocation(mds_allocation(cfg, pop), cfg).empty());
        }
    }
}
