#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "jouanolou/field.hpp"

using namespace jou;

namespace {

std::mt19937_64 rng(20240817);

Cplx rand_cplx(double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    return {uni(rng), uni(rng)};
}

Complex3 rand_point(double scale = 1.0) {
    return Complex3(rand_cplx(scale), rand_cplx(scale), rand_cplx(scale));
}

/// Random sparse field with small integer coefficients (stays exact).
HomogeneousField rand_exact_field(int degree, int terms_per_comp = 3) {
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> cut(0, degree);
    std::array<Polynomial, 3> comps;
    for (int k = 0; k < 3; ++k)
        for (int t = 0; t < terms_per_comp; ++t) {
            int i = cut(rng);
            int j = std::uniform_int_distribution<int>(0, degree - i)(rng);
            Exponents e{i, j, degree - i - j};
            comps[k][e] = Coeff::rational(Rational(coeff(rng)), Rational(coeff(rng)));
        }
    return HomogeneousField(degree, std::move(comps));
}

double dist(const Complex3& a, const Complex3& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("jouanolou field components and evaluation") {
    auto f = jouanolou_field(2);
    CHECK(f.degree == 2);
    CHECK(f.components[0].count({0, 2, 0}) == 1);  // y^2
    CHECK(f.components[1].count({0, 0, 2}) == 1);  // z^2
    CHECK(f.components[2].count({2, 0, 0}) == 1);  // x^2
    CHECK(f.components[0].size() == 1);

    Complex3 v = f.eval(Complex3(1, 1, 1));
    CHECK(dist(v, Complex3(1, 1, 1)) < 1e-15);
    v = f.eval(Complex3(0, 1, 2));
    CHECK(dist(v, Complex3(1, 4, 0)) < 1e-15);

    CHECK_THROWS_AS(jouanolou_field(0), std::invalid_argument);
}

TEST_CASE("exponent triples must sum to the degree") {
    std::array<Polynomial, 3> comps;
    comps[0][{1, 0, 0}] = Coeff::rational(Rational(1));
    CHECK_THROWS_AS(HomogeneousField(2, comps), std::invalid_argument);
}

TEST_CASE("Complex3 rejects non-finite components") {
    CHECK_THROWS_AS(Complex3(Cplx(std::nan(""), 0), 0, 0), std::invalid_argument);
}

TEST_CASE("homogeneity: eval(F, lambda p) = lambda^d eval(F, p)") {
    for (int trial = 0; trial < 100; ++trial) {
        int d = 1 + trial % 5;
        auto f = rand_exact_field(d);
        Complex3 p = rand_point();
        Cplx lam = rand_cplx(2.0);
        Cplx lam_d{1.0, 0.0};
        for (int i = 0; i < d; ++i) lam_d *= lam;
        Complex3 lhs = f.eval(p.scaled(lam));
        Complex3 rhs = f.eval(p).scaled(lam_d);
        CHECK(dist(lhs, rhs) <= 1e-12 * (1.0 + rhs.norm()));
    }
}

TEST_CASE("divergence of the Jouanolou family vanishes identically") {
    for (int d = 1; d <= 6; ++d) CHECK(divergence(jouanolou_field(d)).empty());
}

TEST_CASE("divergence of handmade fields") {
    // (x^3, 0, 0) -> 3x^2
    std::array<Polynomial, 3> comps;
    comps[0][{3, 0, 0}] = Coeff::rational(Rational(1));
    HomogeneousField f(3, comps);
    auto div = divergence(f);
    REQUIRE(div.size() == 1);
    CHECK(div.begin()->first == Exponents{2, 0, 0});
    CHECK(div.begin()->second.re_exact == Rational(3));

    // (x^2, xy, xz) -> 4x
    std::array<Polynomial, 3> comps2;
    comps2[0][{2, 0, 0}] = Coeff::rational(Rational(1));
    comps2[1][{1, 1, 0}] = Coeff::rational(Rational(1));
    comps2[2][{1, 0, 1}] = Coeff::rational(Rational(1));
    HomogeneousField g(2, comps2);
    auto div2 = divergence(g);
    REQUIRE(div2.size() == 1);
    CHECK(div2.begin()->first == Exponents{1, 0, 0});
    CHECK(div2.begin()->second.re_exact == Rational(4));
}

TEST_CASE("make_divergence_free: J_2 is already divergence-free") {
    auto f = jouanolou_field(2);
    CHECK(make_divergence_free(f) == f);
}

TEST_CASE("make_divergence_free of (x^3,0,0)") {
    std::array<Polynomial, 3> comps;
    comps[0][{3, 0, 0}] = Coeff::rational(Rational(1));
    HomogeneousField f(3, comps);
    auto g = make_divergence_free(f);
    // (2x^3/5, -3x^2 y/5, -3x^2 z/5)
    CHECK(g.components[0].at({3, 0, 0}).re_exact == Rational(2, 5));
    CHECK(g.components[1].at({2, 1, 0}).re_exact == Rational(-3, 5));
    CHECK(g.components[2].at({2, 0, 1}).re_exact == Rational(-3, 5));
    CHECK(divergence(g).empty());
}

TEST_CASE("make_divergence_free kills divergence exactly and is idempotent") {
    for (int trial = 0; trial < 100; ++trial) {
        auto f = rand_exact_field(1 + trial % 4);
        auto g = make_divergence_free(f);
        CHECK(divergence(g).empty());  // exact identity, not a tolerance
        CHECK(make_divergence_free(g) == g);
    }
}

TEST_CASE("jacobian_apply on the Jouanolou field") {
    auto f = jouanolou_field(2);
    CHECK(dist(jacobian_apply(f, Complex3(1, 0, 0)), Complex3(0, 0, 0)) < 1e-15);
    CHECK(dist(jacobian_apply(f, Complex3(1, 1, 1)), Complex3(2, 2, 2)) < 1e-15);
}

TEST_CASE("jacobian_apply on the radial field is the identity on the field value") {
    std::array<Polynomial, 3> comps;
    comps[0][{1, 0, 0}] = Coeff::rational(Rational(1));
    comps[1][{0, 1, 0}] = Coeff::rational(Rational(1));
    comps[2][{0, 0, 1}] = Coeff::rational(Rational(1));
    HomogeneousField radial(1, comps);
    for (int trial = 0; trial < 20; ++trial) {
        Complex3 p = rand_point();
        CHECK(dist(jacobian_apply(radial, p), p) < 1e-14);
    }
}

TEST_CASE("jacobian_apply matches finite differences of t -> F(p + t F(p))") {
    for (int trial = 0; trial < 100; ++trial) {
        auto f = rand_exact_field(1 + trial % 4);
        Complex3 p = rand_point();
        Complex3 v = f.eval(p);
        double h = 1e-6;
        Complex3 plus = f.eval(p + v.scaled(h));
        Complex3 minus = f.eval(p + v.scaled(-h));
        Complex3 fd = (plus - minus).scaled(1.0 / (2.0 * h));
        Complex3 exact = jacobian_apply(f, p);
        CHECK(dist(fd, exact) <= 1e-6 * (1.0 + exact.norm()));
    }
}

TEST_CASE("hermitian_dot") {
    CHECK(std::abs(hermitian_dot(Complex3(1, 0, 0), Complex3(1, 0, 0)) - Cplx(1, 0)) < 1e-15);
    Cplx i{0.0, 1.0};
    CHECK(std::abs(hermitian_dot(Complex3(1, 1, 1), Complex3(i, i, i)) - Cplx(0, -3)) < 1e-15);
    CHECK(std::abs(hermitian_dot(Complex3(1, 0, 0), Complex3(0, 0, 1))) < 1e-15);
}

TEST_CASE("section invariants") {
    auto s2 = section_invariants(2);
    CHECK(s2.d_z == -1);
    CHECK(s2.chi == -4);
    CHECK(s2.genus == 3);

    auto s1 = section_invariants(1);
    CHECK(s1.d_z == 0);
    CHECK(s1.chi == 0);
    CHECK(s1.genus == 1);

    auto s5 = section_invariants(5);
    CHECK(s5.d_z == -4);
    CHECK(s5.chi == -28);
    CHECK(s5.genus == 15);

    for (int d = 1; d <= 9; ++d) {
        auto s = section_invariants(d);
        CHECK(s.chi == (d + 2) * s.d_z);
        CHECK(s.d_z * s.d_z == (1 - d) * s.d_z);
    }
}

TEST_CASE("field JSON round trip") {
    auto f = jouanolou_field(3);
    auto f2 = field_from_json(field_to_json(f));
    CHECK(f2 == f);

    auto g = rand_exact_field(4);
    auto g2 = field_from_json(field_to_json(g));
    CHECK(g2.degree == g.degree);
    for (int k = 0; k < 3; ++k)
        for (const auto& [e, c] : g.components[k]) {
            auto it = g2.components[k].find(e);
            REQUIRE(it != g2.components[k].end());
            CHECK(std::abs(it->second.value() - c.value()) < 1e-15);
        }
}
