#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>

#include "jouanolou/rational.hpp"

namespace jou {

using Cplx = std::complex<double>;

/// A point of C^3. Construction rejects NaN/Inf components.
struct Complex3 {
    Cplx x{}, y{}, z{};

    Complex3() = default;
    Complex3(Cplx x_, Cplx y_, Cplx z_);

    Cplx operator[](int k) const { return k == 0 ? x : (k == 1 ? y : z); }
    void set(int k, Cplx v) { (k == 0 ? x : (k == 1 ? y : z)) = v; }

    double norm2() const;          // squared hermitian norm
    double norm() const;
    Complex3 scaled(Cplx lambda) const;
};

Complex3 operator+(const Complex3& a, const Complex3& b);
Complex3 operator-(const Complex3& a, const Complex3& b);

/// Standard hermitian product sum_k a_k * conj(b_k).
Cplx hermitian_dot(const Complex3& a, const Complex3& b);

/// Monomial exponents (i,j,k) for x^i y^j z^k.
using Exponents = std::array<int, 3>;

/// Coefficient that stays exact (Gaussian rational) as long as every input
/// was rational; mixing with an inexact value poisons it to double. The
/// exactness flag is what lets divergence tests assert identity-zero instead
/// of tolerance-zero.
struct Coeff {
    bool exact = true;
    Rational re_exact{0}, im_exact{0};
    Cplx approx{0.0, 0.0};

    Coeff() = default;
    static Coeff rational(Rational re, Rational im = Rational(0));
    static Coeff inexact(Cplx v);

    Cplx value() const { return exact ? Cplx(re_exact.to_double(), im_exact.to_double()) : approx; }
    bool is_zero() const;

    Coeff operator+(const Coeff& o) const;
    Coeff operator-() const;
    Coeff scale_rational(const Rational& r) const;
    Coeff scale_int(long long n) const;
    bool operator==(const Coeff& o) const;
};

/// Sparse homogeneous polynomial: exponent triple -> coefficient.
/// All stored triples sum to the same total degree.
using Polynomial = std::map<Exponents, Coeff>;

Cplx eval_poly(const Polynomial& poly, const Complex3& p);

/// Degree-d homogeneous polynomial vector field on C^3, one sparse
/// polynomial per component.
struct HomogeneousField {
    int degree = 1;
    std::array<Polynomial, 3> components;

    HomogeneousField() = default;
    HomogeneousField(int degree_, std::array<Polynomial, 3> comps);

    Complex3 eval(const Complex3& p) const;
    /// d(component k)/d(coordinate axis), as a degree-(d-1) polynomial.
    Polynomial partial(int component, int axis) const;
    bool is_exact() const;
    bool operator==(const HomogeneousField& o) const;
};

/// The Jouanolou field J_d = (y^d, z^d, x^d). Rejects d = 0.
HomogeneousField jouanolou_field(int d);
bool is_jouanolou(const HomogeneousField& f);

/// Symbolic divergence sum_k dF_k/dk, exact when the field is exact.
Polynomial divergence(const HomogeneousField& f);

/// F - (div F / (d+2)) R with R the radial field; has identically zero
/// divergence. Exact fields stay exact.
HomogeneousField make_divergence_free(const HomogeneousField& f);

/// DV(V) at p: the Jacobian of F at p applied to F(p).
Complex3 jacobian_apply(const HomogeneousField& f, const Complex3& p);

/// Jacobian matrix of F at p (rows = components, cols = d/dx, d/dy, d/dz).
std::array<std::array<Cplx, 3>, 3> jacobian_matrix(const HomogeneousField& f, const Complex3& p);

/// Closed-form invariants of a compact transverse section of a degree-d
/// foliation (nonzero Euler characteristic branch).
struct SectionInvariants {
    int d_z = 0;
    int chi = 0;
    int genus = 0;
};

SectionInvariants section_invariants(int d);

/// JSON wire format:
/// {"degree": d, "components": [[{"exp":[i,j,k],"re":..,"im":..},...],...]}
std::string field_to_json(const HomogeneousField& f);
HomogeneousField field_from_json(const std::string& text);

}  // namespace jou
