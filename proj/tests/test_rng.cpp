#include <doctest.h>

#include <cmath>
#include <set>

#include "ttsv/rng.hpp"

using namespace ttsv;

TEST_SUITE("rng") {

TEST_CASE("philox known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(1, 5, Purpose::prices), b(1, 5, Purpose::prices), c(1, 5, Purpose::noise), d(1, 6, Purpose::prices);
    std::set<double> seen;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x != c.uniform());
        CHECK(x != d.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        seen.insert(x);
    }
    CHECK(seen.size() == 100);
}

TEST_CASE("uniform and normal moments") {
    RngStream r(3, 0);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        su += r.uniform();
        const double z = r.normal();
        sn += z;
        sn2 += z * z;
    }
    CHECK(std::abs(su / n - 0.5) < 3 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(sn / n) < 3 / std::sqrt(double(n)));
    CHECK(std::abs(sn2 / n - 1.0) < 3 * std::sqrt(2.0 / n));
}

TEST_CASE("poisson and geometric means") {
    RngStream r(4, 0);
    const int n = 20000;
    double sp = 0, sg = 0;
    for (int i = 0; i < n; ++i) {
        sp += static_cast<double>(r.poisson(100.0));
        sg += static_cast<double>(r.geometric(0.05));
    }
    CHECK(std::abs(sp / n - 100.0) < 3 * std::sqrt(100.0 / n));
    // failures before success: mean (1-p)/p = 19, variance (1-p)/p^2 = 380
    CHECK(std::abs(sg / n - 19.0) < 3 * std::sqrt(380.0 / n));
    CHECK(r.poisson(0.0) == 0);
    CHECK(r.geometric(1.0) == 0);
    for (int i = 0; i < 1000; ++i) CHECK(r.uniform_index(7) < 7);
}

}
