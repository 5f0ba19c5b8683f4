#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jouanolou/field.hpp"

namespace jou::pnorm {

/// Derivatives of phi(t) = sum_k |q_k(t)|^p along the leaf parameterization
/// dq/dt = F(q):
///   phi_t    = (p/2) sum |q_k|^{p-2} conj(q_k) V_k
///   phi_tt   = (p/2) sum [ (p-2)/2 |q_k|^{p-4} (conj(q_k) V_k)^2
///                          + |q_k|^{p-2} conj(q_k) (DV(V))_k ]
///   phi_ttb  = (p^2/4) sum |q_k|^{p-2} |V_k|^2
/// Terms with q_k = 0 count as 0 for p > 2.
struct PhiDerivatives {
    Cplx phi_t{};
    Cplx phi_tt{};
    double phi_ttbar = 0.0;
};

PhiDerivatives phi_derivatives(const HomogeneousField& f, double p_exp, const Complex3& q);

/// Newton projection onto B_p = {phi_t = 0} moving only along the leaf
/// direction, renormalized to unit norm each step.
std::optional<Complex3> project_to_bp(const HomogeneousField& f, double p_exp,
                                      const Complex3& q0, double tol = 1e-10,
                                      int max_iters = 50);

/// R_p = |phi_tt| / phi_ttbar at a point of B_p.
double ratio_rp(const HomogeneousField& f, double p_exp, const Complex3& q);

struct SweepRow {
    int d = 0;
    double p_exp = 0.0;
    double max_ratio = 0.0;
    Complex3 argmax;
    long long samples_used = 0;
    double converged_fraction = 0.0;
};

struct SweepOptions {
    long long samples = 10000;
    int seeds = 8;          // hill-climb starts taken from the top candidates
    int climb_steps = 200;
    unsigned long long rng_seed = 20240901;
    int threads = 0;        // 0 = auto
};

/// For each p on the grid, projects quasi-random unit points onto B_p,
/// evaluates R_p, hill-climbs from the best candidates and reports the
/// sampled maximum (a lower bound on the true supremum).
std::vector<SweepRow> sweep(int d, double p_min, double p_max, int p_steps,
                            const SweepOptions& opts = {});

/// CSV columns: d,p,max_ratio,argmax_x_re,argmax_x_im,argmax_y_re,
/// argmax_y_im,argmax_z_re,argmax_z_im,samples,converged_fraction.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace jou::pnorm
