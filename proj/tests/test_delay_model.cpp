#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mobicache/delay_model.hpp"
#include "mobicache/popularity.hpp"

using namespace mobicache;

TEST_CASE("contact probability") {
    CHECK(contact_prob(1.0, 5) == 1.0);
    CHECK(contact_prob(0.25, 2) == doctest::Approx(0.4375));
    CHECK(contact_prob(0.25, 0) == 0.0);
    CHECK(contact_prob_order(0.25, 2) == doctest::Approx(0.5));
    CHECK(contact_prob_order(0.25, 8) == 1.0);
    // Tiny area keeps full relative precision.
    CHECK(contact_prob(1e-12, 3) == doctest::Approx(3e-12).epsilon(1e-9));
}

TEST_CASE("uncoded expected delay") {
    auto cfg = NetworkConfig::make(100, 0.25, 2);
    const std::vector<double> one{1.0};
    const std::vector<double> x4{4.0};
    CHECK(expected_delay_uncoded(cfg, one, x4).exact_slots ==
          doctest::Approx(2.0 / (1.0 - std::pow(0.75, 4))));
    CHECK(expected_delay_uncoded(cfg, one, x4).exact_slots == doctest::Approx(2.9261).epsilon(1e-4));

    const std::vector<double> half{0.5, 0.5}, x42{4.0, 2.0};
    CHECK(expected_delay_uncoded(cfg, half, x42).order_slots == doctest::Approx(3.0));

    auto full = NetworkConfig::make(100, 1.0, 3);
    const std::vector<double> x1{1.0};
    CHECK(expected_delay_uncoded(full, one, x1).exact_slots == doctest::Approx(3.0));
}

TEST_CASE("mds expected delay") {
    auto cfg = NetworkConfig::make(100, 0.25, 2);
    const std::vector<double> one{1.0};
    const std::vector<double> r3{3.0};
    const double expect = 1.0 / (1.0 - std::pow(0.75, 3)) + 1.0 / (1.0 - 0.75 * 0.75);
    CHECK(expected_delay_mds(cfg, one, r3).exact_slots == doctest::Approx(expect));
    CHECK(expect == doctest::Approx(4.0155).epsilon(1e-4));

    auto full = NetworkConfig::make(100, 1.0, 2);
    const std::vector<double> r2{2.0};
    CHECK(expected_delay_mds(full, one, r2).exact_slots == doctest::Approx(2.0));

    const std::vector<double> pmf{2.0 / 3.0, 1.0 / 3.0}, r44{4.0, 4.0};
    CHECK(expected_delay_mds(cfg, pmf, r44).order_slots == doctest::Approx(7.0 / 3.0));
    CHECK(mds_content_delay_order(0.25, 2, 4.0) == doctest::Approx(1.0 + 1.0 / 0.75));
}

TEST_CASE("delays reject allocations outside the domain") {
    auto cfg = NetworkConfig::make(100, 0.25, 2);
    const std::vector<double> one{1.0};
    const std::vector<double> bad_x{0.5}, bad_r{1.0};
    CHECK_THROWS_AS(expected_delay_uncoded(cfg, one, bad_x), std::invalid_argument);
    CHECK_THROWS_AS(expected_delay_mds(cfg, one, bad_r), std::invalid_argument);
}

TEST_CASE("order form never exceeds exact form") {
    // 1-(1-a)^c <= a*c, so the order denominators are at least the exact ones.
    const PopularityModel pop(30, 0.9);
    auto cfg = NetworkConfig::make(500, 0.02, 3);
    std::vector<double> x(30), r(30);
    for (std::size_t m = 0; m < 30; ++m) {
        x[m] = 1.0 + static_cast<double>(30 - m);
        r[m] = 3.0 + static_cast<double>(30 - m);
    }
    CHECK(expected_delay_uncoded(cfg, pop, x).order_slots <= expected_delay_uncoded(cfg, pop, x).exact_slots);
    CHECK(expected_delay_mds(cfg, pop, r).order_slots <= expected_delay_mds(cfg, pop, r).exact_slots);
}

TEST_CASE("per-node throughput") {
    CHECK(per_node_throughput(NetworkConfig::make(100, 0.01, 1), 10.0) == doctest::Approx(0.1));
    CHECK(per_node_throughput(NetworkConfig::make(100, 0.01, 1), 1.0) == doctest::Approx(1.0));
    const double n = 30000.0;
    const auto cfg = NetworkConfig::make(30000, std::log(n) / n, 1);
    CHECK(per_node_throughput(cfg, 20.0) == doctest::Approx(1.0 / (20.0 * std::log(n))));
    CHECK(per_node_throughput(cfg, 20.0) == doctest::Approx(0.00485).epsilon(2e-3));
}

TEST_CASE("random-walk delay bounds") {
    auto cfg = NetworkConfig::make(22026, 0.25, 2);
    const std::vector<double> one{1.0}, x4{4.0};
    const auto e = expected_delay_random_walk(cfg, one, x4, Strategy::UncodedSeq, 10.0);
    REQUIRE(e.bounds.has_value());
    CHECK(e.bounds->first == doctest::Approx(2.0));
    CHECK(e.bounds->second == doctest::Approx(20.0));

    auto big = NetworkConfig::make(100, 0.9, 2);
    const auto s = expected_delay_random_walk(big, one, x4, Strategy::UncodedSeq, 2.0);
    CHECK(s.bounds->first == doctest::Approx(2.0));
    CHECK(s.bounds->second == doctest::Approx(2.0));

    auto cfg2 = NetworkConfig::make(100, 0.1, 1);
    const std::vector<double> pmf{2.0 / 3.0, 1.0 / 3.0}, x21{2.0, 1.0};
    const auto t = expected_delay_random_walk(cfg2, pmf, x21, Strategy::UncodedSeq, 2.0);
    CHECK(t.bounds->first == doctest::Approx(20.0 / 3.0));
    CHECK(t.bounds->second == doctest::Approx(40.0 / 3.0));
}

TEST_CASE("random-walk log factor defaults to ln n") {
    auto cfg = NetworkConfig::make(1000, 0.001, 1);
    const std::vector<double> one{1.0}, x{10.0};
    const auto d = expected_delay_random_walk(cfg, one, x, Strategy::UncodedSeq);
    CHECK(d.bounds->second == doctest::Approx(d.bounds->first * std::log(1000.0)));
}
