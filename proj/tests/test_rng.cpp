#include <doctest.h>

#include <cmath>
#include <set>

#include "qotto/rng.hpp"

using namespace qotto;

TEST_SUITE("rng") {

TEST_CASE("Philox4x32-10 known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    std::set<std::uint64_t> seen;
    for (int k = 0; k < 100; ++k) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        seen.insert(x);
        seen.insert(c.next_u64());
        seen.insert(d.next_u64());
    }
    CHECK(seen.size() == 300);
}

TEST_CASE("uniform stays in the open unit interval") {
    RngStream r(1, 0);
    double lo = 1, hi = 0, sum = 0;
    for (int k = 0; k < 200000; ++k) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 200000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("Wiener increments: E[dw] = 0, E[dw^2] = dt at 4 sigma on 1e6 samples") {
    const int n = 1000000;
    const double dt = 5e-3;
    RngStream r(2015, 11);
    double s1 = 0, s2 = 0, s4 = 0;
    for (int k = 0; k < n; ++k) {
        const double w = r.wiener(dt);
        s1 += w;
        s2 += w * w;
        s4 += w * w * w * w;
    }
    CHECK(std::abs(s1 / n) < 4 * std::sqrt(dt / n));
    const double var = s2 / n;
    CHECK(std::abs(var - dt) < 4 * std::sqrt((s4 / n - var * var) / n));
    CHECK(s4 / n == doctest::Approx(3 * dt * dt).epsilon(0.02));
}

}
