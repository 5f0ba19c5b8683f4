#include "jouanolou/symmetry.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "jouanolou/flow.hpp"

namespace jou::symm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Cplx zeta7(int e) {
    e = ((e % 7) + 7) % 7;
    double th = kTwoPi * e / 7.0;
    return {std::cos(th), std::sin(th)};
}

Matrix3 matmul(const Matrix3& a, const Matrix3& b) {
    Matrix3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Cplx acc{0.0, 0.0};
            for (int k = 0; k < 3; ++k) acc += a[i][k] * b[k][j];
            r[i][j] = acc;
        }
    return r;
}

/// Monomial exponent-weight pairing: x^i y^j z^k picks up zeta^{i a + j b + k c}
/// under diag(zeta^a, zeta^b, zeta^c).
int monomial_weight(const Exponents& e, const std::array<int, 3>& w) {
    return ((e[0] * w[0] + e[1] * w[1] + e[2] * w[2]) % 7 + 7) % 7;
}

/// Exact equivariance of the leaf directions under diag weights with scalar
/// twist k: every monomial of component i must satisfy
/// <exp, w> = w_i + k (mod 7). Purely combinatorial, no floats.
bool diag_equivariant(const HomogeneousField& f, const std::array<int, 3>& w, int k) {
    for (int i = 0; i < 3; ++i)
        for (const auto& [e, c] : f.components[i]) {
            if (c.is_zero()) continue;
            if (monomial_weight(e, w) != ((w[i] + k) % 7 + 7) % 7) return false;
        }
    return true;
}

}  // namespace

Complex3 ProjectiveSymmetry::apply(const Complex3& p) const {
    Complex3 out;
    for (int i = 0; i < 3; ++i) {
        Cplx acc{0.0, 0.0};
        for (int j = 0; j < 3; ++j) acc += matrix[i][j] * p[j];
        out.set(i, acc);
    }
    return out;
}

bool is_unitary(const Matrix3& m, double tol) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Cplx acc{0.0, 0.0};
            for (int k = 0; k < 3; ++k) acc += m[i][k] * std::conj(m[j][k]);
            Cplx expect = i == j ? Cplx{1.0, 0.0} : Cplx{0.0, 0.0};
            if (std::abs(acc - expect) > tol) return false;
        }
    return true;
}

ProjectiveSymmetry compose(const ProjectiveSymmetry& a, const ProjectiveSymmetry& b) {
    return {matmul(a.matrix, b.matrix), a.label + b.label};
}

bool same_projective(const Matrix3& a, const Matrix3& b, double tol) {
    // a = lambda b for a unit scalar lambda: find the largest entry of b and
    // read the scalar off there.
    int bi = 0, bj = 0;
    double best = -1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(b[i][j]) > best) {
                best = std::abs(b[i][j]);
                bi = i;
                bj = j;
            }
    if (best < tol) return false;
    Cplx lambda = a[bi][bj] / b[bi][bj];
    if (std::abs(std::abs(lambda) - 1.0) > tol) return false;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(a[i][j] - lambda * b[i][j]) > tol) return false;
    return true;
}

ProjectiveSymmetry generator_s() {
    Matrix3 m{};
    m[0][1] = 1.0;  // (x,y,z) -> (y,z,x)
    m[1][2] = 1.0;
    m[2][0] = 1.0;
    return {m, "s"};
}

ProjectiveSymmetry generator_t(std::array<int, 3> weights) {
    Matrix3 m{};
    m[0][0] = zeta7(weights[0]);
    m[1][1] = zeta7(weights[1]);
    m[2][2] = zeta7(weights[2]);
    return {m, "t"};
}

std::array<int, 3> find_t_weights(const HomogeneousField& f) {
    std::array<int, 3> canonical{-1, -1, -1};
    for (int a = 0; a < 7 && canonical[0] < 0; ++a)
        for (int b = 0; b < 7 && canonical[0] < 0; ++b)
            for (int c = 0; c < 7 && canonical[0] < 0; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                if (diag_equivariant(f, {a, b, c}, 0)) canonical = {a, b, c};
            }
    if (canonical[0] < 0)
        throw std::runtime_error("find_t_weights: no exactly equivariant diagonal symmetry");
    return canonical;
}

int conjugation_exponent(const HomogeneousField& f) {
    ProjectiveSymmetry s = generator_s();
    ProjectiveSymmetry t = generator_t(find_t_weights(f));
    // s^{-1} = s^2 for the cyclic permutation.
    ProjectiveSymmetry sinv = compose(s, s);
    Matrix3 conj = matmul(matmul(s.matrix, t.matrix), sinv.matrix);
    ProjectiveSymmetry power = t;
    for (int m = 1; m <= 6; ++m) {
        if (same_projective(conj, power.matrix)) return m;
        power = compose(power, t);
    }
    throw std::runtime_error("conjugation_exponent: s t s^-1 is not a power of t");
}

std::vector<ProjectiveSymmetry> group_elements(const HomogeneousField& f) {
    ProjectiveSymmetry s = generator_s();
    ProjectiveSymmetry t = generator_t(find_t_weights(f));
    std::vector<ProjectiveSymmetry> elems;
    ProjectiveSymmetry ti{{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, ""};
    for (int i = 0; i < 7; ++i) {
        ProjectiveSymmetry tisj = ti;
        for (int j = 0; j < 3; ++j) {
            ProjectiveSymmetry e = tisj;
            if (e.label.empty()) e.label = "e";
            elems.push_back(e);
            tisj = compose(tisj, s);
        }
        ti = compose(ti, t);
    }
    return elems;
}

InvarianceReport check_invariance(const HomogeneousField& f, const ProjectiveSymmetry& g,
                                  int n_samples, unsigned long long seed) {
    if (!is_unitary(g.matrix)) throw std::invalid_argument("check_invariance: g not unitary");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    InvarianceReport rep;
    for (int i = 0; i < n_samples; ++i) {
        Complex3 p{{gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)}};
        double nn = p.norm();
        if (!(nn > 1e-9)) continue;
        p = p.scaled(1.0 / nn);
        Complex3 gp = g.apply(p);

        double db = std::abs(std::abs(b_residual(f, gp)) - std::abs(b_residual(f, p)));
        if (db > rep.worst_b_error) {
            rep.worst_b_error = db;
            rep.worst_b_point = p;
        }

        // Complex-velocity lift of W: rho~(p) F(p). Equivariance under a
        // unitary field symmetry is exact; compare W~(g p) with g W~(p).
        Cplx rp = rho(f, p), rgp = rho(f, gp);
        Complex3 w_p = f.eval(p).scaled(rp);
        Complex3 w_gp = f.eval(gp).scaled(rgp);
        Complex3 gw_p = g.apply(w_p);
        double dw = (w_gp - gw_p).norm();
        if (dw > rep.worst_w_error) {
            rep.worst_w_error = dw;
            rep.worst_w_point = p;
        }
    }
    rep.b_invariant = rep.worst_b_error < 1e-10;
    rep.w_equivariant = rep.worst_w_error < 1e-8;
    return rep;
}

std::set<std::array<int, 3>> invariant_quartic_monomials() {
    std::set<std::array<int, 3>> out;
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4 - a; ++b) {
            int c = 4 - a - b;
            if ((a + 2 * b + 4 * c) % 7 == 0) out.insert({a, b, c});
        }
    // The filter is closed under cyclic permutation (the s-invariance
    // argument); verify rather than assume.
    for (const auto& m : out)
        if (!out.count({m[1], m[2], m[0]}))
            throw std::logic_error("invariant_quartic_monomials: set not cyclically closed");
    return out;
}

Cplx klein_quartic_eval(const Complex3& p) {
    return p.x * p.y * p.y * p.y + p.y * p.z * p.z * p.z + p.z * p.x * p.x * p.x;
}

}  // namespace jou::symm
