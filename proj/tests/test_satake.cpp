#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <heckelab/rng.hpp>
#include <heckelab/satake.hpp>

#include <complex>

using namespace heckelab;

namespace {

SpectralParameter random_tempered(Rng& rng, int64_t p, int d) {
    std::vector<double> theta(d - 1);
    for (auto& t : theta) t = rng.uniform() * 2.0 * M_PI;
    return tempered_parameter(p, d, theta);
}

}  // namespace

TEST_CASE("spectral parameters") {
    SpectralParameter nu = tempered_parameter(7, 3, {0.3, 1.1});
    CHECK(nu.z.size() == 3);
    Cplx prod = nu.z[0] * nu.z[1] * nu.z[2];
    CHECK(std::abs(prod - Cplx(1, 0)) < 1e-12);
    CHECK(nu.is_tempered());

    SpectralParameter triv = trivial_parameter(7, 2);
    CHECK_FALSE(triv.is_tempered());
    CHECK(std::abs(triv.z[0] - std::sqrt(7.0)) < 1e-12);
    CHECK(std::abs(triv.z[1] - 1.0 / std::sqrt(7.0)) < 1e-12);
}

TEST_CASE("basis transform conventions, d = 2") {
    // transform of 1_{K diag(p,1) K} is sqrt(p) (z1 + z2)
    for (int64_t p : {2, 5, 13}) {
        WSymLaurentX f = basis_transform(p, Cocharacter({1, 0}));
        REQUIRE(f.terms.size() == 1);
        CHECK(f.terms.at(Cocharacter({1, 0})) == half_power(p, 1));
        CHECK(evaluate_trivial(f) == SqrtExt::rational(Rat(p + 1)));
    }
    // transform of 1_{K diag(p^2,1) K} is p(z1^2 + z2^2) + (p-1) z1 z2
    for (int64_t p : {2, 5, 13}) {
        WSymLaurentX f = basis_transform(p, Cocharacter({2, 0}));
        REQUIRE(f.terms.size() == 2);
        CHECK(f.terms.at(Cocharacter({2, 0})) == SqrtExt::rational(Rat(p)));
        CHECK(f.terms.at(Cocharacter({0, 0})) == SqrtExt::rational(Rat(p - 1)));
        CHECK(evaluate_trivial(f) == SqrtExt::rational(Rat(p * (p + 1))));
    }
}

TEST_CASE("basis transform conventions, d = 3") {
    for (int64_t p : {2, 3, 7}) {
        for (auto av : {std::vector<int64_t>{1, 0, 0}, {1, 1, 0}}) {
            WSymLaurentX f = basis_transform(p, Cocharacter(av));
            REQUIRE(f.terms.size() == 1);
            CHECK(f.terms.at(Cocharacter(av)) == SqrtExt::rational(Rat(p)));
            CHECK(evaluate_trivial(f) == SqrtExt::rational(Rat(p * p + p + 1)));
        }
    }
}

TEST_CASE("hall-littlewood route agrees with coset enumeration") {
    struct Case { int64_t p; std::vector<int64_t> a; };
    for (const Case& c : {Case{2, {2, 0}}, Case{3, {3, 0}}, Case{5, {2, 1, 0}},
                          Case{2, {2, 2, 0}}, Case{3, {3, 1, 0}}}) {
        Cocharacter a(c.a);
        WSymLaurentX fast = basis_transform(c.p, a);
        WSymLaurentX slow = basis_transform_enumerated(DoubleCosetKey(c.p, a.d(), a));
        CHECK(fast.terms == slow.terms);
    }
}

TEST_CASE("spectral coset count matches enumeration") {
    for (int64_t p : {2, 3, 5, 7}) {
        for (auto av : {std::vector<int64_t>{1, 0}, {2, 0}, {2, 1, 0}, {2, 2, 0}}) {
            Cocharacter a(av);
            CHECK(coset_count_spectral(p, a) ==
                  Int(coset_count(DoubleCosetKey(p, a.d(), a))));
        }
    }
}

TEST_CASE("hecke algebra relation T_p * T_p = T_{p^2} + (p+1) id") {
    for (int64_t p : {2, 5, 11}) {
        auto prod = convolve_basis(p, 2, Cocharacter({1, 0}), Cocharacter({1, 0}));
        REQUIRE(prod.size() == 2);
        CHECK(prod.at(Cocharacter({2, 0})) == 1);
        CHECK(prod.at(Cocharacter({0, 0})) == p + 1);
    }
}

TEST_CASE("transform turns convolution into multiplication") {
    Rng rng(55);
    struct Case { int64_t p; int d; };
    for (const Case& c : {Case{3, 2}, Case{5, 3}}) {
        for (int t = 0; t < 8; ++t) {
            // random exact functions supported on small basis keys
            auto random_fn = [&](uint64_t) {
                ExactHeckeFunction f;
                f.p = c.p;
                f.d = c.d;
                std::vector<std::vector<int64_t>> keys;
                if (c.d == 2)
                    keys = {{0, 0}, {1, 0}, {2, 0}};
                else
                    keys = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
                for (const auto& k : keys)
                    f.add(Cocharacter(k), SqrtExt::rational(Rat(rng.range(-3, 3))));
                return f;
            };
            ExactHeckeFunction f = random_fn(0), g = random_fn(1);
            ExactHeckeFunction h = convolve(f, g);
            WSymLaurentX lhs = satake_transform(h);
            // compare pointwise at random tempered parameters
            for (int s = 0; s < 3; ++s) {
                SpectralParameter nu = random_tempered(rng, c.p, c.d);
                Cplx want = evaluate(satake_transform(f), nu) * evaluate(satake_transform(g), nu);
                Cplx got = evaluate(lhs, nu);
                CHECK(std::abs(got - want) <= 1e-8 * (1.0 + std::abs(want)));
            }
        }
    }
}

TEST_CASE("exact inverse transform roundtrip") {
    Rng rng(77);
    struct Case { int64_t p; int d; };
    for (const Case& c : {Case{2, 2}, Case{7, 2}, Case{3, 3}}) {
        for (int t = 0; t < 10; ++t) {
            ExactHeckeFunction f;
            f.p = c.p;
            f.d = c.d;
            std::vector<std::vector<int64_t>> keys;
            if (c.d == 2)
                keys = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
            else
                keys = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {2, 1, 0}};
            for (const auto& k : keys) {
                Rat num(rng.range(-5, 5), rng.range(1, 4));
                f.add(Cocharacter(k), SqrtExt::rational(num));
            }
            ExactHeckeFunction back = inverse_satake(satake_transform(f));
            for (const auto& [k, v] : f.coeffs) {
                auto it = back.coeffs.find(k);
                if (it == back.coeffs.end())
                    CHECK(v.is_zero());
                else
                    CHECK(it->second == v);
            }
            for (const auto& [k, v] : back.coeffs)
                if (!f.coeffs.count(k)) CHECK(v.is_zero());
        }
    }
}

TEST_CASE("numeric inverse transform recovers a basis delta") {
    WSymLaurentX fx = basis_transform(5, Cocharacter({2, 1, 0}));
    HeckeFunction f = inverse_satake(to_complex(fx));
    REQUIRE(f.coeffs.size() == 1);
    auto it = f.coeffs.find(Cocharacter({2, 1, 0}));
    REQUIRE(it != f.coeffs.end());
    CHECK(std::abs(it->second - Cplx(1, 0)) < 1e-9);
}

TEST_CASE("plancherel density is a probability density") {
    for (int64_t p : {5, 11}) {
        for (int d : {2, 3}) {
            double total = plancherel_integral(p, d, [](const SpectralParameter&) { return 1.0; });
            CHECK(std::abs(total - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("plancherel isometry: ||B_a||^2 equals the coset count") {
    struct Case { int64_t p; int d; std::vector<int64_t> a; double want; };
    for (const Case& c : {Case{5, 2, {1, 0}, 6.0},
                          Case{11, 2, {1, 0}, 12.0},
                          Case{5, 3, {1, 0, 0}, 31.0},
                          Case{5, 2, {2, 0}, 30.0}}) {
        WSymLaurent fhat = to_complex(basis_transform(c.p, Cocharacter(c.a)));
        double n2 = plancherel_inner(fhat, fhat);
        CHECK(std::abs(n2 - c.want) < 1e-7 * c.want);
    }
}

TEST_CASE("orthogonality of distinct basis transforms") {
    WSymLaurent f = to_complex(basis_transform(5, Cocharacter({1, 0})));
    WSymLaurent g = to_complex(basis_transform(5, Cocharacter({2, 0})));
    CHECK(std::abs(plancherel_inner(f, g)) < 1e-7);
}

TEST_CASE("density gap to the large-p limit shrinks like 1/sqrt(p)") {
    int64_t prev_p = 0;
    double prev_scaled = 0;
    for (int64_t p : {11, 31, 101}) {
        double gap = plancherel_limit_gap(p, 2);
        double scaled = gap * std::sqrt(static_cast<double>(p));
        CHECK(scaled < 10.0);
        if (prev_p != 0) CHECK(gap < plancherel_limit_gap(prev_p, 2));
        prev_p = p;
        prev_scaled = scaled;
    }
    (void)prev_scaled;
}

TEST_CASE("support radius") {
    WSymLaurentX f = basis_transform(5, Cocharacter({2, 0}));
    CHECK(support_radius(f) == doctest::Approx(1.0));
    ExactHeckeFunction g;
    g.p = 5;
    g.d = 2;
    g.add(Cocharacter({1, 0}), SqrtExt::rational(Rat(1)));
    CHECK(support_radius(g) == doctest::Approx(0.5));
}

TEST_CASE("spherical value normalization") {
    // normalized spherical function equals transform / count at any parameter
    Rng rng(99);
    for (int t = 0; t < 10; ++t) {
        SpectralParameter nu = random_tempered(rng, 7, 2);
        Cocharacter a({2, 0});
        Cplx direct = spherical_value(7, a, nu);
        Cplx via = evaluate(basis_transform(7, a), nu) /
                   to_double(Rat(coset_count_spectral(7, a)));
        CHECK(std::abs(direct - via) < 1e-10);
    }
}
