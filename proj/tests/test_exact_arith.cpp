#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <heckelab/matrix.hpp>
#include <heckelab/rng.hpp>

using namespace heckelab;

TEST_CASE("rational denominators and lcm") {
    CHECK(denom_rational(Rat(3, 7)) == 7);
    CHECK(denom_rational(Rat(4)) == 1);
    CHECK(denom_rational(Rat(-5, 10)) == 2);
    CHECK(lcm_int(4, 6) == 12);
    CHECK(lcm_int(1, 1) == 1);
    CHECK(lcm_int(0, 5) == 0);
}

TEST_CASE("rational wire format roundtrip") {
    CHECK(rat_to_string(Rat(22, 7)) == "22/7");
    CHECK(rat_to_string(Rat(-3)) == "-3");
    CHECK(rat_from_string("22/7") == Rat(22, 7));
    CHECK(rat_from_string("-9") == Rat(-9));
    CHECK_THROWS(rat_from_string("1/0"));
}

TEST_CASE("matrix denominator basics") {
    RationalMatrix g(2);
    g(0, 0) = Rat(1, 2);
    g(0, 1) = Rat(1, 3);
    g(1, 0) = Rat(0);
    g(1, 1) = Rat(5);
    CHECK(denom_matrix(g) == 6);
    CHECK(denom_matrix(RationalMatrix::identity(3)) == 1);
}

TEST_CASE("denominator is submultiplicative") {
    Rng rng(101);
    for (int t = 0; t < 200; ++t) {
        int n = 2 + static_cast<int>(rng.below(3));
        RationalMatrix a(n), b(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                a(i, j) = Rat(rng.range(-6, 6), rng.range(1, 8));
                b(i, j) = Rat(rng.range(-6, 6), rng.range(1, 8));
            }
        CHECK(denom_matrix(a * b) <= denom_matrix(a) * denom_matrix(b));
    }
}

TEST_CASE("inverse denominator bound d(g^-1) <= d(g)^(n-1)") {
    // g^-1 = adj(g)/det(g); with det(g) = 1 the adjugate entries are degree
    // n-1 minors, so the bound holds for unimodular-rational g.
    Rng rng(202);
    for (int t = 0; t < 100; ++t) {
        int n = 2 + static_cast<int>(rng.below(3));
        RationalMatrix g = random_unimodular_rational(rng, n);
        Int d = denom_matrix(g);
        Int bound = pow_int(d, static_cast<unsigned>(n - 1));
        CHECK(denom_matrix(inverse(g)) <= bound);
    }
}

TEST_CASE("determinant and inverse") {
    RationalMatrix g(2);
    g(0, 0) = 2;
    g(0, 1) = 1;
    g(1, 0) = 1;
    g(1, 1) = 1;
    CHECK(det(g) == 1);
    RationalMatrix inv = inverse(g);
    CHECK(g * inv == RationalMatrix::identity(2));
    RationalMatrix sing(2);
    sing(0, 0) = 1;
    sing(0, 1) = 2;
    sing(1, 0) = 2;
    sing(1, 1) = 4;
    CHECK(det(sing) == 0);
    CHECK_THROWS(inverse(sing));
}

TEST_CASE("hermite normal form shape and factorization") {
    Rng rng(303);
    for (int t = 0; t < 100; ++t) {
        int n = 2 + static_cast<int>(rng.below(3));
        IntegerMatrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.range(-9, 9);
        if (det(m) == 0) continue;
        auto [h, u] = hermite_normal_form(m);
        CHECK(u * h == m);
        Int du = det(u);
        CHECK((du == 1 || du == -1));
        for (int i = 0; i < n; ++i) {
            CHECK(h(i, i) > 0);
            for (int j = 0; j < i; ++j) CHECK(h(i, j) == 0);
            // entries above each pivot reduced into [0, pivot)
            for (int j = i + 1; j < n; ++j) {
                CHECK(h(i, j) >= 0);
                CHECK(h(i, j) < h(j, j));
            }
        }
    }
}

TEST_CASE("hnf is a row-span invariant") {
    Rng rng(404);
    for (int t = 0; t < 60; ++t) {
        int n = 3;
        IntegerMatrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.range(-9, 9);
        if (det(m) == 0) continue;
        IntegerMatrix v = random_unimodular(rng, n);
        auto [h1, u1] = hermite_normal_form(m);
        auto [h2, u2] = hermite_normal_form(v * m);
        CHECK(h1 == h2);
    }
}

TEST_CASE("exact rank") {
    std::vector<std::vector<Rat>> rows = {{Rat(1), Rat(2), Rat(3)},
                                          {Rat(2), Rat(4), Rat(6)},
                                          {Rat(0), Rat(1), Rat(0)}};
    CHECK(rank_over_Q(rows) == 2);
    rows[1][2] = Rat(7);
    CHECK(rank_over_Q(rows) == 3);
    CHECK(rank_over_Q({{Rat(0), Rat(0)}}) == 0);
}

TEST_CASE("matrix json roundtrip") {
    RationalMatrix g(2);
    g(0, 0) = Rat(1, 2);
    g(0, 1) = Rat(-3);
    g(1, 0) = Rat(0);
    g(1, 1) = Rat(7, 5);
    CHECK(matrix_from_json(matrix_to_json(g)) == g);
}
