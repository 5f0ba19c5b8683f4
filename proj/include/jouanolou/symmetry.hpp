#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "jouanolou/field.hpp"

namespace jou::symm {

using Matrix3 = std::array<std::array<Cplx, 3>, 3>;

/// Unitary lift of a projective automorphism, with a word in the generators
/// {s, t} as label.
struct ProjectiveSymmetry {
    Matrix3 matrix;
    std::string label;

    Complex3 apply(const Complex3& p) const;
};

bool is_unitary(const Matrix3& m, double tol = 1e-12);
ProjectiveSymmetry compose(const ProjectiveSymmetry& a, const ProjectiveSymmetry& b);
bool same_projective(const Matrix3& a, const Matrix3& b, double tol = 1e-9);

/// s = cyclic coordinate permutation [x:y:z] -> [y:z:x].
ProjectiveSymmetry generator_s();

/// t = diag(zeta^a, zeta^b, zeta^c) with zeta = e^{2 pi i / 7}.
ProjectiveSymmetry generator_t(std::array<int, 3> weights);

/// Exhaustive search over the 343 exponent triples for a diagonal symmetry
/// of the field's leaf directions, tested exactly on the monomial structure.
/// Returns the canonical representative (lexicographically smallest triple
/// that is exactly equivariant with no scalar twist).
std::array<int, 3> find_t_weights(const HomogeneousField& f);

/// Exponent m with s t s^{-1} = t^m projectively, for the found weights.
/// The group presentation <s,t | s^3, t^7, s t s^-1 t^-m> has order 21 for
/// m in {2, 4}.
int conjugation_exponent(const HomogeneousField& f);

/// The full group {t^i s^j} of order 21, closed under multiplication
/// projectively.
std::vector<ProjectiveSymmetry> group_elements(const HomogeneousField& f);

struct InvarianceReport {
    bool b_invariant = false;
    bool w_equivariant = false;
    double worst_b_error = 0.0;
    double worst_w_error = 0.0;
    Complex3 worst_b_point;
    Complex3 worst_w_point;
};

/// Random-point check that |b_residual| is g-invariant (1e-10) and that the
/// complex-velocity lift of W is g-equivariant (1e-8).
InvarianceReport check_invariance(const HomogeneousField& f, const ProjectiveSymmetry& g,
                                  int n_samples, unsigned long long seed = 42);

/// Degree-4 exponent triples with alpha + 2 beta + 4 gamma = 0 mod 7,
/// closed under cyclic permutation: {(1,3,0),(0,1,3),(3,0,1)}.
std::set<std::array<int, 3>> invariant_quartic_monomials();

/// x y^3 + y z^3 + z x^3.
Cplx klein_quartic_eval(const Complex3& p);

}  // namespace jou::symm
