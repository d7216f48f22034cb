#include "decentmem/router.hpp"
#include "decentmem/rng.hpp"

#include <doctest.h>

using namespace decentmem;

namespace {
RouterState with_we(double w_e) {
    RouterState s;
    s.w_e = w_e;
    return s;
}
} // namespace

TEST_CASE("selection probability is w_e over the weight sum") {
    CHECK(selection_prob(with_we(1.0)) == doctest::Approx(0.5));
    CHECK(selection_prob(with_we(1.5)) == doctest::Approx(0.6));
    CHECK(selection_prob(with_we(3.0)) == doctest::Approx(0.75));
}

TEST_CASE("update covers all eight choice/delta/floor combinations") {
    // Above the floor: both directions move.
    CHECK(update(with_we(2.0), PoolChoice::Exploit, 1).w_e == doctest::Approx(2.5));
    CHECK(update(with_we(2.0), PoolChoice::Explore, 0).w_e == doctest::Approx(2.5));
    CHECK(update(with_we(4.0), PoolChoice::Exploit, 0).w_e == doctest::Approx(2.0));
    CHECK(update(with_we(4.0), PoolChoice::Explore, 1).w_e == doctest::Approx(2.0));
    // At the floor: decay saturates, growth still applies.
    CHECK(update(with_we(1.0), PoolChoice::Exploit, 0).w_e == doctest::Approx(1.0));
    CHECK(update(with_we(1.0), PoolChoice::Explore, 1).w_e == doctest::Approx(1.0));
    CHECK(update(with_we(1.0), PoolChoice::Exploit, 1).w_e == doctest::Approx(1.5));
    CHECK(update(with_we(1.0), PoolChoice::Explore, 0).w_e == doctest::Approx(1.5));
}

TEST_CASE("successful exploitation chain replays 1.0 -> 1.5 -> 2.0") {
    RouterState s;
    s = update(s, PoolChoice::Exploit, 1);
    CHECK(s.w_e == doctest::Approx(1.5));
    s = update(s, PoolChoice::Exploit, 1);
    CHECK(s.w_e == doctest::Approx(2.0));
    CHECK(selection_prob(s) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("exploit and explore updates are symmetric under delta flip") {
    for (double w : {1.0, 1.5, 2.0, 3.25, 7.0}) {
        CHECK(update(with_we(w), PoolChoice::Exploit, 1) ==
              update(with_we(w), PoolChoice::Explore, 0));
        CHECK(update(with_we(w), PoolChoice::Exploit, 0) ==
              update(with_we(w), PoolChoice::Explore, 1));
    }
}

TEST_CASE("weights never drop below the floor under random feedback") {
    Rng rng(99);
    RouterState s;
    for (int i = 0; i < 10'000; ++i) {
        const PoolChoice c =
            rng.bernoulli(0.5) ? PoolChoice::Exploit : PoolChoice::Explore;
        s = update(s, c, rng.bernoulli(0.5) ? 1 : 0);
        REQUIRE(s.w_e >= s.floor);
        REQUIRE(selection_prob(s) >= 0.5);
        REQUIRE(selection_prob(s) < 1.0);
    }
}

TEST_CASE("choose follows the selection probability empirically") {
    Rng rng(2024);
    RouterState s; // w_e = w_x = 1 -> probability 0.5
    const int n = 100'000;
    int exploits = 0;
    for (int i = 0; i < n; ++i) {
        if (choose(s, rng) == PoolChoice::Exploit) ++exploits;
    }
    const double freq = static_cast<double>(exploits) / n;
    CHECK(freq == doctest::Approx(0.5).epsilon(0.02)); // 0.5 +- 0.01

    RouterState biased = with_we(3.0); // probability 0.75
    exploits = 0;
    for (int i = 0; i < n; ++i) {
        if (choose(biased, rng) == PoolChoice::Exploit) ++exploits;
    }
    CHECK(static_cast<double>(exploits) / n == doctest::Approx(0.75).epsilon(0.015));
}

TEST_CASE("custom increment, decay and floor are honored") {
    RouterState s;
    s.w_e = 6.0;
    s.increment = 1.0;
    s.decay = 0.25;
    s.floor = 2.0;
    CHECK(update(s, PoolChoice::Exploit, 1).w_e == doctest::Approx(7.0));
    CHECK(update(s, PoolChoice::Exploit, 0).w_e == doctest::Approx(2.0)); // floored
}
