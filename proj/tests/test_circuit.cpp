#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "circuit_oracle.hpp"
#include "reflexgrid/circuit.hpp"

using namespace reflexgrid::circuit;
using testsupport::nodal_solve;
using testsupport::rel_err;

TEST_CASE("single branch divider by hand") {
    // 1 ohm source, 3 ohm base, flex off: v = 10 * 3 / 4.
    const CircuitConfig c(1.0, {{3.0, 6.0}});
    auto s = solve(c, 10.0, LoadState::all(1, false));
    CHECK(s.v_load == doctest::Approx(7.5).epsilon(1e-15));
    CHECK(s.i_total == doctest::Approx(2.5).epsilon(1e-15));
    // flex on: 3 || 6 = 2 ohm, v = 10 * 2 / 3.
    s = solve(c, 10.0, LoadState::all(1, true));
    CHECK(s.v_load == doctest::Approx(20.0 / 3.0).epsilon(1e-15));
    CHECK(s.branch_currents[0] == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("v_load_for_count agrees with solve on homogeneous banks") {
    const auto c = CircuitConfig::homogeneous(0.05, 100, {100.0, 50.0});
    for (std::size_t n = 0; n <= 100; n += 7) {
        LoadState s = LoadState::all(100, false);
        for (std::size_t i = 0; i < n; ++i) s.flex_on[i] = true;
        CHECK(rel_err(v_load_for_count(c, 10.0, n), solve(c, 10.0, s).v_load) < 1e-12);
    }
    // More connected flexible load pulls the bus down.
    CHECK(v_load_for_count(c, 10.0, 10) > v_load_for_count(c, 10.0, 11));
    CHECK_THROWS(v_load_for_count(c, 10.0, 101));
    const CircuitConfig mixed(0.05, {{100.0, 50.0}, {90.0, 50.0}});
    CHECK_FALSE(mixed.is_homogeneous());
    CHECK_THROWS(v_load_for_count(mixed, 10.0, 1));
}

TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS(CircuitConfig(0.0, {{1.0, 1.0}}));
    CHECK_THROWS(CircuitConfig(-1.0, {{1.0, 1.0}}));
    CHECK_THROWS(CircuitConfig(1.0, {}));
    CHECK_THROWS(CircuitConfig(1.0, {{0.0, 1.0}}));
    CHECK_THROWS(CircuitConfig(1.0, {{1.0, std::numeric_limits<double>::infinity()}}));
    const CircuitConfig c(1.0, {{1.0, 1.0}});
    CHECK_THROWS(solve(c, -1.0, LoadState::all(1, true)));
    CHECK_THROWS(solve(c, std::nan(""), LoadState::all(1, true)));
    CHECK_THROWS(solve(c, 1.0, LoadState::all(2, true)));
    CHECK(solve(c, 0.0, LoadState::all(1, true)).v_load == 0.0);
}

TEST_CASE("closed form matches the nodal oracle on random feeders") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> log_r(std::log(0.1), std::log(100.0));
    std::uniform_int_distribution<std::size_t> count(1, 20);
    std::uniform_real_distribution<double> vs(0.0, 400.0);
    std::bernoulli_distribution coin(0.5);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double rs = std::exp(log_r(rng));
        const std::size_t n = count(rng);
        std::vector<Branch> branches;
        std::vector<std::pair<double, double>> plain;
        LoadState loads;
        for (std::size_t i = 0; i < n; ++i) {
            const double rb = std::exp(log_r(rng));
            const double rf = std::exp(log_r(rng));
            branches.push_back({rb, rf});
            plain.emplace_back(rb, rf);
            loads.flex_on.push_back(coin(rng));
        }
        const double v = vs(rng);
        const auto got = solve(CircuitConfig(rs, branches), v, loads);
        const auto want = nodal_solve(rs, plain, loads.flex_on, v);
        if (v == 0.0) continue;
        worst = std::max({worst, rel_err(got.v_load, want.v_load), rel_err(got.i_total, want.i_total)});
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, rel_err(got.branch_currents[i], want.branch_currents[i]));
            sum += got.branch_currents[i];
        }
        // KCL at the bus, KVL around source and bank.
        REQUIRE(rel_err(sum, got.i_total) <= 1e-9);
        REQUIRE(std::abs(v - got.i_total * rs - got.v_load) / v <= 1e-9);
    }
    CHECK(worst <= 1e-9);
}
