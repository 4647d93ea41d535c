#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <heckelab/root_data.hpp>
#include <heckelab/rng.hpp>

using namespace heckelab;

TEST_CASE("canonical form fixes the center coordinate") {
    Cocharacter a({3, 1, 1});
    CHECK(a.coords() == std::vector<int64_t>{2, 0, 0});
    CHECK(Cocharacter({1, 1}) == Cocharacter({5, 5}));
    CHECK(Cocharacter({1, 0}) != Cocharacter({0, 1}));
    CHECK(zero_cocharacter(4).is_zero());
}

TEST_CASE("dominance and dominant representative") {
    CHECK(Cocharacter({2, 1, 0}).is_dominant());
    CHECK_FALSE(Cocharacter({0, 1}).is_dominant());
    CHECK(dominant_representative(Cocharacter({0, 2, 1})) == Cocharacter({2, 1, 0}));
}

TEST_CASE("weyl orbit sizes") {
    CHECK(weyl_orbit(Cocharacter({1, 0})).size() == 2);
    CHECK(weyl_orbit(Cocharacter({1, 1, 0})).size() == 3);
    CHECK(weyl_orbit(Cocharacter({2, 1, 0})).size() == 6);
    CHECK(weyl_orbit(zero_cocharacter(3)).size() == 1);
}

TEST_CASE("norm normalization: root coweight has norm 1") {
    // e_1 - e_2 in each rank
    for (int d = 2; d <= 5; ++d) {
        std::vector<int64_t> v(d, 0);
        v[0] = 1;
        v[1] = -1;
        CHECK(cochar_norm_squared(Cocharacter(v)) == 1);
    }
    CHECK(cochar_norm_squared(Cocharacter({1, 0})) == Rat(1, 4));
    CHECK(cochar_norm_squared(Cocharacter({1, 0, 0})) == Rat(1, 3));
    CHECK(cochar_norm_squared(Cocharacter({2, 0})) == 1);
}

TEST_CASE("norm is invariant under the orbit and the center") {
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        int d = 2 + static_cast<int>(rng.below(3));
        std::vector<int64_t> v(d);
        for (auto& x : v) x = rng.range(-5, 5);
        Cocharacter c(v);
        Rat n = cochar_norm_squared(c);
        for (const Cocharacter& w : weyl_orbit(c)) CHECK(cochar_norm_squared(w) == n);
        for (auto& x : v) x += 3;
        CHECK(cochar_norm_squared(Cocharacter(v)) == n);
    }
}

TEST_CASE("modular pairing values") {
    CHECK(two_rho_pairing(Cocharacter({1, 0})) == 1);
    CHECK(two_rho_pairing(Cocharacter({1, 0, 0})) == 2);
    CHECK(two_rho_pairing(Cocharacter({1, 1, 0})) == 2);
    CHECK(two_rho_pairing(Cocharacter({2, 1, 0})) == 4);
    CHECK(two_rho_pairing(zero_cocharacter(3)) == 0);
    // well defined on the quotient: shifting by the center changes nothing
    CHECK(two_rho_pairing(Cocharacter({3, 2, 1})) == two_rho_pairing(Cocharacter({2, 1, 0})));
}

TEST_CASE("pairing is maximal on the dominant representative") {
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
        int d = 2 + static_cast<int>(rng.below(3));
        std::vector<int64_t> v(d);
        for (auto& x : v) x = rng.range(-4, 4);
        Cocharacter c(v);
        int64_t dom = two_rho_pairing(c);
        for (const Cocharacter& w : weyl_orbit(c))
            CHECK(two_rho_pairing_raw(w.coords()) <= dom);
    }
}

TEST_CASE("amplifier base point checksum") {
    for (int d = 2; d <= 4; ++d) {
        Cocharacter a = amplifier_base_point(d);
        CHECK(cochar_norm_squared(a) == 16);
        CHECK(dominant_representative(a) == a);
        // symmetric orbit: -a lies in the same Weyl orbit
        CHECK(dominant_representative(cochar_scale(a, -1)) == a);
    }
    CHECK(amplifier_base_point(2) == Cocharacter({4, -4}));
    CHECK(amplifier_base_point(3) == Cocharacter({4, 0, -4}));
    CHECK_THROWS(amplifier_base_point(1));
}

TEST_CASE("cocharacter arithmetic") {
    Cocharacter a({2, 0}), b({1, 1});
    CHECK(cochar_add(a, b) == a);  // b is central
    CHECK(cochar_scale(a, 3) == Cocharacter({6, 0}));
    CHECK(cochar_scale(a, 0).is_zero());
}
