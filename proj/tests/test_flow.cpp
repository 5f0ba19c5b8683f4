#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "jouanolou/flow.hpp"

using namespace jou;

namespace {

std::mt19937_64 rng(771100);

Cplx rand_cplx(double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    return {uni(rng), uni(rng)};
}

Complex3 rand_unit() {
    Complex3 p(rand_cplx(), rand_cplx(), rand_cplx());
    return p.scaled(1.0 / p.norm());
}

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

Complex3 golden_b_point() { return Complex3(1.0, -1.0, kGolden); }

HomogeneousField diag_field(long long a, long long b, long long c) {
    std::array<Polynomial, 3> comps;
    comps[0][{1, 0, 0}] = Coeff::rational(Rational(a));
    comps[1][{0, 1, 0}] = Coeff::rational(Rational(b));
    comps[2][{0, 0, 1}] = Coeff::rational(Rational(c));
    return HomogeneousField(1, comps);
}

}  // namespace

TEST_CASE("rho on the Jouanolou field") {
    auto f = jouanolou_field(2);
    CHECK(std::abs(rho(f, Complex3(1, 1, 1)) - Cplx(-2.0 / 3.0, 0)) < 1e-14);
    CHECK(std::abs(rho(f, Complex3(1, 0, 0))) < 1e-15);
    // rho vanishes wherever F(p) is hermitian-orthogonal to p, e.g. on B
    CHECK(std::abs(rho(f, golden_b_point())) < 1e-13);
    CHECK_THROWS_AS(rho(f, Complex3(0, 0, 0)), std::invalid_argument);
}

TEST_CASE("b_residual on the Jouanolou field") {
    auto f = jouanolou_field(2);
    CHECK(std::abs(b_residual(f, Complex3(1, 0, 0))) < 1e-15);
    CHECK(std::abs(b_residual(f, Complex3(1, 1, 1)) - Cplx(3, 0)) < 1e-15);
    CHECK(std::abs(b_residual(f, golden_b_point())) < 1e-13);  // root of 1 + z - z^2
}

TEST_CASE("w_chart vanishes at singularities and on B") {
    auto f = jouanolou_field(2);
    auto w = w_chart(f, 2, Cplx(1, 0), Cplx(1, 0));  // [1:1:1], X = 0 there
    CHECK(std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3]) < 1e-14);
    w = w_chart(f, 0, Cplx(0, 0), Cplx(0, 0));  // [1:0:0] on B, rho = 0 there
    CHECK(std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3]) < 1e-14);
}

TEST_CASE("W vanishes exactly on B~ and singularities, nowhere else (sampled)") {
    auto f = jouanolou_field(2);
    auto sings = find_singularities(f);
    auto wnorm = [&](const Complex3& p) {
        int axis = max_modulus_axis(p);
        Cplx pa = p[axis];
        auto w = w_chart(f, axis, p[(axis + 1) % 3] / pa, p[(axis + 2) % 3] / pa);
        return std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3]);
    };
    for (const auto& s : sings) CHECK(wnorm(s.point.rep) < 1e-10);
    int projected = 0;
    for (int i = 0; i < 50; ++i) {
        auto b = project_to_b(f, rand_unit());
        if (!b) continue;
        ++projected;
        CHECK(wnorm(*b) < 1e-10);
    }
    CHECK(projected > 40);
    for (int i = 0; i < 10000; ++i) {
        Complex3 p = rand_unit();
        bool near_struct = sigma_b(f, p) < 1e-4;
        for (const auto& s : sings) near_struct |= proj_distance(p, s.point.rep) < 1e-3;
        if (!near_struct) CHECK(wnorm(p) > 1e-10);
    }
}

TEST_CASE("f_gain_rate matches finite differences of f along the flow direction") {
    for (int trial = 0; trial < 100; ++trial) {
        auto f = jouanolou_field(2 + trial % 3);
        Complex3 p = rand_unit();
        Cplx r = rho(f, p);
        Complex3 w = f.eval(p).scaled(0.5 * r);  // W~ velocity, Re-part convention
        auto fval = [](const Complex3& q) { return -std::log(q.norm2()); };
        double h = 1e-6;
        double fd = (fval(p + w.scaled(h)) - fval(p + w.scaled(-h))) / (2.0 * h);
        double rate = f_gain_rate(f, p);
        CHECK(std::abs(fd - rate) <= 1e-6 * (1.0 + rate));
    }
}

TEST_CASE("classify_b_point on J_2") {
    auto f = jouanolou_field(2);
    CHECK(classify_b_point(f, Complex3(1, 0, 0)) == BPointClass::SINK);
    CHECK(classify_b_point(f, golden_b_point()) == BPointClass::SINK);
    CHECK_THROWS_AS(classify_b_point(f, Complex3(1, 1, 1)), std::invalid_argument);
}

TEST_CASE("classify_b_point degenerate band") {
    // V = (x, -y, 0): at p = (1,1,0), ||V||^2 = 2 = |DV(V).R| exactly.
    auto f = diag_field(1, -1, 0);
    CHECK(classify_b_point(f, Complex3(1, 1, 0)) == BPointClass::DEGENERATE);
}

TEST_CASE("project_to_b lands in the basin of the nearby root") {
    auto f = jouanolou_field(2);
    auto q = project_to_b(f, Complex3(1, -1, 1.7));
    REQUIRE(q.has_value());
    CHECK(std::abs(b_residual(f, *q)) < 1e-12);
    Complex3 tgt = golden_b_point();
    tgt = tgt.scaled(1.0 / tgt.norm());
    CHECK(std::abs(hermitian_dot(*q, tgt)) > 0.99);
    // already on B: fixed point
    auto q2 = project_to_b(f, Complex3(1, 0, 0));
    REQUIRE(q2.has_value());
    CHECK(proj_distance(*q2, Complex3(1, 0, 0)) < 1e-12);
}

TEST_CASE("find_singularities counts d^2+d+1 and includes [1:1:1]") {
    for (int d = 2; d <= 5; ++d) {
        auto s = find_singularities(jouanolou_field(d));
        CHECK((int)s.size() == d * d + d + 1);
    }
    auto s2 = find_singularities(jouanolou_field(2));
    bool has111 = false;
    Complex3 p111 = Complex3(1, 1, 1).scaled(1.0 / std::sqrt(3.0));
    for (const auto& s : s2) has111 |= proj_distance(s.point.rep, p111) < 1e-12;
    CHECK(has111);
}

TEST_CASE("the 7 singularities of J_2 form a single orbit under t") {
    auto sings = find_singularities(jouanolou_field(2));
    // t = diag(zeta, zeta^4, zeta^2), the exactly equivariant weights
    double th = 2.0 * std::numbers::pi / 7.0;
    auto zp = [&](int e) { return Cplx{std::cos(e * th), std::sin(e * th)}; };
    Complex3 orbit = sings[0].point.rep;
    int matched = 0;
    for (int k = 0; k < 7; ++k) {
        for (const auto& s : sings)
            if (proj_distance(orbit, s.point.rep) < 1e-9) {
                ++matched;
                break;
            }
        orbit = Complex3(zp(1) * orbit.x, zp(4) * orbit.y, zp(2) * orbit.z);
    }
    CHECK(matched == 7);
}

TEST_CASE("linearization at [1:1:1]") {
    auto f = jouanolou_field(2);
    auto rec = linearize_at_singularity(f, ProjPoint(Complex3(1, 1, 1)));
    double s3 = std::sqrt(3.0);
    Cplx lp{-2.0, s3}, lm{-2.0, -s3};
    bool order = std::abs(rec.eigenvalues_x[0] - lp) < 1e-9;
    Cplx e0 = order ? lp : lm, e1 = order ? lm : lp;
    CHECK(std::abs(rec.eigenvalues_x[0] - e0) < 1e-9);
    CHECK(std::abs(rec.eigenvalues_x[1] - e1) < 1e-9);
    CHECK(std::abs(rec.rho_at_s - Cplx(-2.0 / 3.0, 0)) < 1e-10);
    CHECK(std::abs(rec.eigenvalues_y[0] - rec.rho_at_s * rec.eigenvalues_x[0]) < 1e-12);
    CHECK(rec.eigenvalues_y[0].real() > 0);
    CHECK(rec.eigenvalues_y[1].real() > 0);
    CHECK(rec.is_hyperbolic);
    CHECK(rec.is_source_for_w);
    CHECK_THROWS_AS(linearize_at_singularity(f, ProjPoint(Complex3(1, 0, 0))),
                    SingularSolveError);
}

TEST_CASE("check_ps holds for J_2 and J_3") {
    auto r2 = check_ps(jouanolou_field(2));
    CHECK(r2.holds);
    CHECK(r2.singularities.size() == 7);
    auto r3 = check_ps(jouanolou_field(3));
    CHECK(r3.holds);
    CHECK(r3.singularities.size() == 13);
}

TEST_CASE("a diagonal field with real-colinear eigenvalues is not hyperbolic") {
    // V = (2x, 3y, z): chart eigenvalues at each coordinate singularity are
    // real pairs, so every hyperbolicity flag must come back false.
    auto f = diag_field(2, 3, 1);
    for (auto p : {Complex3(1, 0, 0), Complex3(0, 1, 0), Complex3(0, 0, 1)}) {
        auto rec = linearize_at_singularity(f, ProjPoint(p));
        CHECK_FALSE(rec.is_hyperbolic);
    }
    auto rep = check_ps(f);
    CHECK_FALSE(rep.holds);
    for (const auto& s : rep.singularities) CHECK_FALSE(s.is_hyperbolic);
}

TEST_CASE("continuation tracks singularities of a perturbed field") {
    auto f = jouanolou_field(2);
    std::array<Polynomial, 3> comps = f.components;
    comps[0][{2, 0, 0}] = Coeff::inexact({0.01, 0.003});
    comps[1][{0, 2, 0}] = Coeff::inexact({-0.004, 0.008});
    HomogeneousField g(2, comps);
    auto sings = find_singularities(g);
    CHECK(sings.size() == 7);
    for (const auto& s : sings) {
        Complex3 v = g.eval(s.point.rep);
        Cplx cx = v.y * s.point.rep.z - v.z * s.point.rep.y;
        Cplx cy = v.z * s.point.rep.x - v.x * s.point.rep.z;
        Cplx cz = v.x * s.point.rep.y - v.y * s.point.rep.x;
        CHECK(std::sqrt(std::norm(cx) + std::norm(cy) + std::norm(cz)) < 1e-10);
    }
}

TEST_CASE("integrate_w halts SINGULAR at a singularity seed") {
    auto f = jouanolou_field(2);
    auto sings = find_singularities(f);
    IntegrationControls ctl;
    auto res = integrate_w(f, ProjPoint(Complex3(1, 1, 1)), ctl, sings);
    CHECK(res.classification == TrajectoryClass::SINGULAR);
    CHECK(res.steps == 0);
}

TEST_CASE("integrate_w near a B point is an immediate FATOU hit") {
    auto f = jouanolou_field(2);
    auto sings = find_singularities(f);
    IntegrationControls ctl;
    // distance ~1e-3 from [1:0:0] along the tangent of B, tiny transversal part
    auto res = integrate_w(f, ProjPoint(Complex3(1, 9e-4, 1e-7)), ctl, sings);
    CHECK(res.classification == TrajectoryClass::FATOU);
    REQUIRE(res.transit_time.has_value());
    CHECK(*res.transit_time < 1.0);
    REQUIRE(res.limit_b_point.has_value());
    CHECK(sigma_b(f, res.limit_b_point->rep) < 1e-6);
}

TEST_CASE("f_gain is nonnegative and nondecreasing along trajectories") {
    auto f = jouanolou_field(2);
    auto sings = find_singularities(f);
    IntegrationControls ctl;
    ctl.record_samples = true;
    for (int i = 0; i < 100; ++i) {
        auto res = integrate_w(f, ProjPoint(rand_unit()), ctl, sings);
        CHECK(res.f_gain >= 0.0);
        double prev = -1.0;
        for (const auto& s : res.samples) {
            CHECK(s.f_gain >= prev);
            prev = s.f_gain;
        }
    }
}

TEST_CASE("chart consistency: same trajectory in two overlapping charts") {
    auto f = jouanolou_field(2);
    auto sings = find_singularities(f);
    Complex3 p0(1.0, Cplx(0.92, 0.1), Cplx(0.5, -0.4));
    p0 = p0.scaled(1.0 / p0.norm());
    IntegrationControls ctl;
    ctl.t_max = 1.0;
    ctl.eps_b = 1e-30;   // disable halts so both runs cover exactly unit time
    ctl.eps_s = 1e-30;
    ctl.rel_tol = 1e-9;
    ctl.record_samples = true;
    ctl.stop_exactly_at_t_max = true;
    ctl.force_chart = 0;
    auto resa = integrate_w(f, ProjPoint(p0), ctl, sings);
    ctl.force_chart = 1;
    auto resb = integrate_w(f, ProjPoint(p0), ctl, sings);
    REQUIRE(resa.classification == TrajectoryClass::JULIA);  // budget exhausted
    REQUIRE(resb.classification == TrajectoryClass::JULIA);
    Complex3 ea = chart_rep(0, resa.samples.back().u, resa.samples.back().v);
    Complex3 eb = chart_rep(1, resb.samples.back().u, resb.samples.back().v);
    CHECK(std::abs(resa.samples.back().t - 1.0) < 1e-12);
    CHECK(std::abs(resb.samples.back().t - 1.0) < 1e-12);
    CHECK(proj_distance(ea, eb) < 1e-6);
    CHECK(std::abs(resa.f_gain - resb.f_gain) < 1e-6 * (1.0 + resa.f_gain));
}

TEST_CASE("trajectory CSV format") {
    auto f = jouanolou_field(2);
    auto sings = find_singularities(f);
    IntegrationControls ctl;
    ctl.record_samples = true;
    auto res = integrate_w(f, ProjPoint(rand_unit()), ctl, sings);
    std::string csv = trajectory_csv(res);
    std::istringstream is(csv);
    std::string header;
    std::getline(is, header);
    CHECK(header == "step,t,chart,u_re,u_im,v_re,v_im,sigma_B,f_gain");
    long long rows = 0;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == (long long)res.samples.size());
}

TEST_CASE("integrate_w validates controls") {
    auto f = jouanolou_field(2);
    auto sings = find_singularities(f);
    IntegrationControls ctl;
    ctl.dt0 = -1.0;
    CHECK_THROWS_AS(integrate_w(f, ProjPoint(rand_unit()), ctl, sings), std::invalid_argument);
}
