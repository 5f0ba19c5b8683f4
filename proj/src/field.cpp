#include "jouanolou/field.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace jou {

namespace {

bool finite(Cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

Cplx ipow(Cplx base, int e) {
    Cplx r{1.0, 0.0};
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

}  // namespace

Complex3::Complex3(Cplx x_, Cplx y_, Cplx z_) : x(x_), y(y_), z(z_) {
    if (!finite(x) || !finite(y) || !finite(z))
        throw std::invalid_argument("Complex3: non-finite component");
}

double Complex3::norm2() const { return std::norm(x) + std::norm(y) + std::norm(z); }
double Complex3::norm() const { return std::sqrt(norm2()); }
Complex3 Complex3::scaled(Cplx lambda) const { return Complex3(x * lambda, y * lambda, z * lambda); }

Complex3 operator+(const Complex3& a, const Complex3& b) {
    return Complex3(a.x + b.x, a.y + b.y, a.z + b.z);
}
Complex3 operator-(const Complex3& a, const Complex3& b) {
    return Complex3(a.x - b.x, a.y - b.y, a.z - b.z);
}

Cplx hermitian_dot(const Complex3& a, const Complex3& b) {
    return a.x * std::conj(b.x) + a.y * std::conj(b.y) + a.z * std::conj(b.z);
}

Coeff Coeff::rational(Rational re, Rational im) {
    Coeff c;
    c.exact = true;
    c.re_exact = re;
    c.im_exact = im;
    return c;
}

Coeff Coeff::inexact(Cplx v) {
    Coeff c;
    c.exact = false;
    c.approx = v;
    return c;
}

bool Coeff::is_zero() const {
    return exact ? (re_exact.is_zero() && im_exact.is_zero()) : (approx == Cplx{0.0, 0.0});
}

Coeff Coeff::operator+(const Coeff& o) const {
    if (exact && o.exact)
        return rational(re_exact + o.re_exact, im_exact + o.im_exact);
    return inexact(value() + o.value());
}

Coeff Coeff::operator-() const {
    if (exact) return rational(-re_exact, -im_exact);
    return inexact(-approx);
}

Coeff Coeff::scale_rational(const Rational& r) const {
    if (exact) return rational(re_exact * r, im_exact * r);
    return inexact(approx * r.to_double());
}

Coeff Coeff::scale_int(long long n) const { return scale_rational(Rational(n)); }

bool Coeff::operator==(const Coeff& o) const {
    if (exact != o.exact) return false;
    if (exact) return re_exact == o.re_exact && im_exact == o.im_exact;
    return approx == o.approx;
}

Cplx eval_poly(const Polynomial& poly, const Complex3& p) {
    Cplx acc{0.0, 0.0};
    for (const auto& [e, c] : poly)
        acc += c.value() * ipow(p.x, e[0]) * ipow(p.y, e[1]) * ipow(p.z, e[2]);
    return acc;
}

HomogeneousField::HomogeneousField(int degree_, std::array<Polynomial, 3> comps)
    : degree(degree_), components(std::move(comps)) {
    if (degree < 1) throw std::invalid_argument("HomogeneousField: degree must be >= 1");
    for (const auto& comp : components)
        for (const auto& [e, c] : comp) {
            (void)c;
            if (e[0] < 0 || e[1] < 0 || e[2] < 0 || e[0] + e[1] + e[2] != degree)
                throw std::invalid_argument("HomogeneousField: exponent triple does not sum to degree");
        }
}

Complex3 HomogeneousField::eval(const Complex3& p) const {
    return Complex3(eval_poly(components[0], p), eval_poly(components[1], p),
                    eval_poly(components[2], p));
}

Polynomial HomogeneousField::partial(int component, int axis) const {
    Polynomial out;
    for (const auto& [e, c] : components[component]) {
        if (e[axis] == 0) continue;
        Exponents de = e;
        de[axis] -= 1;
        Coeff dc = c.scale_int(e[axis]);
        auto it = out.find(de);
        if (it == out.end())
            out.emplace(de, dc);
        else
            it->second = it->second + dc;
    }
    return out;
}

bool HomogeneousField::is_exact() const {
    for (const auto& comp : components)
        for (const auto& [e, c] : comp) {
            (void)e;
            if (!c.exact) return false;
        }
    return true;
}

bool HomogeneousField::operator==(const HomogeneousField& o) const {
    if (degree != o.degree) return false;
    for (int k = 0; k < 3; ++k) {
        // Compare modulo explicitly stored zeros.
        Polynomial a, b;
        for (const auto& [e, c] : components[k])
            if (!c.is_zero()) a.emplace(e, c);
        for (const auto& [e, c] : o.components[k])
            if (!c.is_zero()) b.emplace(e, c);
        if (a.size() != b.size()) return false;
        for (const auto& [e, c] : a) {
            auto it = b.find(e);
            if (it == b.end() || !(it->second == c)) return false;
        }
    }
    return true;
}

HomogeneousField jouanolou_field(int d) {
    if (d < 1) throw std::invalid_argument("jouanolou_field: d must be >= 1");
    std::array<Polynomial, 3> comps;
    comps[0].emplace(Exponents{0, d, 0}, Coeff::rational(Rational(1)));  // y^d
    comps[1].emplace(Exponents{0, 0, d}, Coeff::rational(Rational(1)));  // z^d
    comps[2].emplace(Exponents{d, 0, 0}, Coeff::rational(Rational(1)));  // x^d
    return HomogeneousField(d, std::move(comps));
}

bool is_jouanolou(const HomogeneousField& f) { return f == jouanolou_field(f.degree); }

Polynomial divergence(const HomogeneousField& f) {
    Polynomial out;
    for (int k = 0; k < 3; ++k) {
        Polynomial pk = f.partial(k, k);
        for (const auto& [e, c] : pk) {
            auto it = out.find(e);
            if (it == out.end())
                out.emplace(e, c);
            else
                it->second = it->second + c;
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

HomogeneousField make_divergence_free(const HomogeneousField& f) {
    Polynomial div = divergence(f);
    if (div.empty()) return f;
    Rational inv_d2(1, f.degree + 2);
    std::array<Polynomial, 3> comps = f.components;
    // Subtract (div/(d+2)) * R componentwise: component k picks up
    // -(div/(d+2)) * coordinate_k.
    for (int k = 0; k < 3; ++k) {
        for (const auto& [e, c] : div) {
            Exponents me = e;
            me[k] += 1;
            Coeff sub = (-c).scale_rational(inv_d2);
            auto it = comps[k].find(me);
            if (it == comps[k].end())
                comps[k].emplace(me, sub);
            else
                it->second = it->second + sub;
        }
        for (auto it = comps[k].begin(); it != comps[k].end();)
            it = it->second.is_zero() ? comps[k].erase(it) : std::next(it);
    }
    return HomogeneousField(f.degree, std::move(comps));
}

Complex3 jacobian_apply(const HomogeneousField& f, const Complex3& p) {
    Complex3 v = f.eval(p);
    auto jac = jacobian_matrix(f, p);
    Complex3 out;
    for (int k = 0; k < 3; ++k) {
        Cplx acc{0.0, 0.0};
        for (int l = 0; l < 3; ++l) acc += jac[k][l] * v[l];
        out.set(k, acc);
    }
    return out;
}

std::array<std::array<Cplx, 3>, 3> jacobian_matrix(const HomogeneousField& f, const Complex3& p) {
    std::array<std::array<Cplx, 3>, 3> jac;
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) jac[k][l] = eval_poly(f.partial(k, l), p);
    return jac;
}

SectionInvariants section_invariants(int d) {
    if (d < 1) throw std::invalid_argument("section_invariants: d must be >= 1");
    SectionInvariants s;
    s.d_z = 1 - d;
    s.chi = (d + 2) * s.d_z;
    s.genus = d * (d + 1) / 2;
    return s;
}

std::string field_to_json(const HomogeneousField& f) {
    nlohmann::json comps = nlohmann::json::array();
    for (int k = 0; k < 3; ++k) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& [e, c] : f.components[k]) {
            Cplx v = c.value();
            terms.push_back({{"exp", {e[0], e[1], e[2]}}, {"re", v.real()}, {"im", v.imag()}});
        }
        comps.push_back(terms);
    }
    nlohmann::json j{{"degree", f.degree}, {"components", comps}};
    return j.dump();
}

HomogeneousField field_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int degree = j.at("degree").get<int>();
    std::array<Polynomial, 3> comps;
    const auto& jc = j.at("components");
    if (jc.size() != 3) throw std::invalid_argument("field_from_json: need 3 components");
    for (int k = 0; k < 3; ++k) {
        for (const auto& term : jc[k]) {
            Exponents e{term.at("exp")[0].get<int>(), term.at("exp")[1].get<int>(),
                        term.at("exp")[2].get<int>()};
            double re = term.at("re").get<double>();
            double im = term.at("im").get<double>();
            // Round-trippable integers load back as exact coefficients.
            Coeff c;
            if (re == std::floor(re) && im == std::floor(im) && std::abs(re) < (1ll << 40) &&
                std::abs(im) < (1ll << 40))
                c = Coeff::rational(Rational((long long)re), Rational((long long)im));
            else
                c = Coeff::inexact({re, im});
            comps[k].emplace(e, c);
        }
    }
    return HomogeneousField(degree, std::move(comps));
}

}  // namespace jou
