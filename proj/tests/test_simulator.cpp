#include <cmath>
#include <stdexcept>
#include <set>

#include "doctest.h"
#include "mobicache/allocation.hpp"
#include "mobicache/delay_model.hpp"
#include "mobicache/placement.hpp"
#include "mobicache/simulator.hpp"

using namespace mobicache;

TEST_CASE("full coverage delivers one subpacket per slot") {
    auto cfg = NetworkConfig::make(50, 1.0, 3);
    const PopularityModel pop(4, 1.0);
    const auto caches = place(uncoded_allocation(cfg, pop), cfg, 1);
    SimOptions o;
    o.slots = 60;
    o.warmup = 5;
    o.seed = 4;
    const auto t = run_trial(cfg, pop, caches, o);
    REQUIRE(t.completed > 0);
    CHECK(t.censored == 0);
    for (const auto& per : t.per_content_delays)
        for (auto d : per) CHECK(d == 3);
    CHECK(t.d_avg_empirical == doctest::Approx(3.0));
}

TEST_CASE("trials are reproducible and independent of the worker count") {
    auto cfg = NetworkConfig::make(300, 0.02, 2);
    const PopularityModel pop(10, 1.0);
    const auto caches = place(mds_allocation(cfg, pop), cfg, 3);
    SimOptions o;
    o.strategy = Strategy::MdsRandom;
    o.slots = 80;
    o.warmup = 10;
    o.seed = 21;
    const auto a = run_trials(cfg, pop, caches, o, 4, 1);
    const auto b = run_trials(cfg, pop, caches, o, 4, 3);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a[i].d_avg_empirical == b[i].d_avg_empirical);
        CHECK(a[i].seed == derive_seed(21, i));
    }
    CHECK(a[0].d_avg_empirical != a[1].d_avg_empirical);
}

TEST_CASE("empirical delay tracks the closed form on a mid-size network") {
    auto cfg = NetworkConfig::make(800, 0.01, 3);
    const PopularityModel pop(10, 1.0);
    const auto al = uncoded_allocation(cfg, pop);
    const auto caches = place(al, cfg, 8);
    SimOptions o;
    o.slots = 150;
    o.warmup = 20;
    o.seed = 5;
    const auto trials = run_trials(cfg, pop, caches, o, 2, 2);
    const double emp = pooled_delay(trials).first;
    std::vector<double> ceiled;
    for (double v : al.values) ceiled.push_back(std::ceil(v - 1e-9));
    const double model = expected_delay_uncoded(cfg, pop, ceiled).exact_slots;
    CHECK(std::abs(emp - model) / model < 0.1);
}

TEST_CASE("scheduled mode never violates the interference constraint") {
    auto cfg = NetworkConfig::make(400, 0.01, 2);
    const PopularityModel pop(5, 1.0);
    const auto caches = place(uncoded_allocation(cfg, pop), cfg, 2);
    SimOptions o;
    o.mode = SimMode::Scheduled;
    o.slots = 40;
    o.warmup = 0;
    o.requester_fraction = 0.1;
    const auto t = run_trial(cfg, pop, caches, o);
    CHECK(t.protocol_violations == 0);
    CHECK(t.completed > 0);
}

TEST_CASE("simulator rejects mismatched inputs") {
    auto cfg = NetworkConfig::make(20, 0.1, 2);
    const PopularityModel pop(3, 1.0);
    const auto caches = place(uncoded_allocation(cfg, pop), cfg, 1);
    SimOptions o;
    o.slots = 10;
    o.warmup = 10;
    CHECK_THROWS_AS(run_trial(cfg, pop, caches, o), std::invalid_argument);
    auto other = cfg;
    other.n = 21;
    o.warmup = 0;
    CHECK_THROWS_AS(run_trial(other, pop, caches, o), std::invalid_argument);
}

TEST_CASE("hitting time with a range covering the torus is one slot") {
    const auto h = estimate_hitting_time(1.0, 1.0, 200, 100, 3);
    CHECK(h.mean == 1.0);
    CHECK(h.censored_fraction == 0.0);
    CHECK_THROWS(estimate_hitting_time(0.1, 0.5, 10, 10, 1));
}

TEST_CASE("hitting time falls in the expected bracket") {
    const double R = 0.1;
    const auto h = estimate_hitting_time(R, R, 1000, 200000, 9, 4);
    CHECK(h.mean >= 0.1 / (R * R));
    CHECK(h.mean <= 10.0 * std::log(1000.0) / (R * R));
}

TEST_CASE("empirical contact frequency matches the contact probability") {
    auto cfg = NetworkConfig::make(20, 0.25, 1);
    CacheAssignment caches;
    caches.per_node.resize(20);
    caches.load.assign(20, 0);
    // content 0: 2 holders, content 1: none, content 2: 8 holders
    for (std::size_t v = 0; v < 2; ++v) caches.per_node[v].push_back({0, 0});
    for (std::size_t v = 2; v < 10; ++v) caches.per_node[v].push_back({2, 0});
    for (std::size_t v = 0; v < 20; ++v) caches.load[v] = caches.per_node[v].size();
    const auto f = empirical_contact_check(cfg, caches, 3, 100000, 12);
    REQUIRE(f.size() == 3);
    CHECK(f[0].copies == 2);
    const double p2 = 0.4375, p8 = 1.0 - std::pow(0.75, 8);
    CHECK(std::abs(f[0].frequency - p2) <= 3.0 * std::sqrt(p2 * (1 - p2) / 1e5));
    CHECK(f[1].frequency == 0.0);
    CHECK(p8 == doctest::Approx(0.8999).epsilon(1e-4));
    CHECK(std::abs(f[2].frequency - p8) <= 3.0 * std::sqrt(p8 * (1 - p8) / 1e5));
}

TEST_CASE("seed derivation is a bijection on small index ranges") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}
