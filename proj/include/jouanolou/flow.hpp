#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jouanolou/field.hpp"

namespace jou {

/// Point of the complex projective plane, stored as a unit-norm
/// representative. Two ProjPoints are equal iff the reps differ by a unit
/// scalar.
struct ProjPoint {
    Complex3 rep;

    ProjPoint() : rep(1.0, 0.0, 0.0) {}
    explicit ProjPoint(const Complex3& p);  // normalizes, rejects ~0

    bool same_point(const ProjPoint& o, double tol = 1e-9) const;
};

/// Sine of the Fubini-Study distance between two projective points.
double proj_distance(const Complex3& a, const Complex3& b);

/// rho~(p) = -2 <p, F(p)> / ||p||^{2d}. W~ = Re(rho~ V).
Cplx rho(const HomogeneousField& f, const Complex3& p);

/// <p, F(p)>; vanishing cuts out the lifted locus B~ (for J_2 this is
/// x conj(y)^2 + y conj(z)^2 + z conj(x)^2).
Cplx b_residual(const HomogeneousField& f, const Complex3& p);

/// Scale-invariant residual |b_residual| / ||p||^{d+1}.
double sigma_b(const HomogeneousField& f, const Complex3& p);

/// Affine chart: coordinate `axis` is 1, u sits at axis+1, v at axis+2
/// (cyclically). chart z (axis 2) is the paper's (u, v) = (x/z, y/z).
Complex3 chart_rep(int axis, Cplx u, Cplx v);
int max_modulus_axis(const Complex3& p);

/// The chart components of the rational field X defining the foliation:
/// X_u = V_{axis+1} - u V_axis, X_v = V_{axis+2} - v V_axis.
struct ChartField {
    Cplx xu, xv;
};
ChartField x_chart(const HomogeneousField& f, int axis, Cplx u, Cplx v);

/// W in the chart as (Re(rho Xu), Im(rho Xu), Re(rho Xv), Im(rho Xv)).
/// Exact closed form, not a truncation.
std::array<double, 4> w_chart(const HomogeneousField& f, int axis, Cplx u, Cplx v);

/// Growth rate of f = -log||.||^2 along the lifted W trajectory,
/// evaluated at the chart representative: |rho~|^2 ||p||^{2d-2}. Nonnegative.
double f_gain_rate(const HomogeneousField& f, const Complex3& p);

enum class BPointClass { SINK, SADDLE, DEGENERATE };

/// Lemma-4.5 test at a point of B~: SINK iff ||V||^2 > |DV(V).R|, scaled by
/// ||p||^{2d}. Rejects points whose b-residual is not small.
BPointClass classify_b_point(const HomogeneousField& f, const Complex3& p, double tol = 1e-9,
                             double eps_b = 1e-6);

/// Newton projection onto B~ moving only along the leaf direction V,
/// renormalized each step. Empty on non-convergence.
std::optional<Complex3> project_to_b(const HomogeneousField& f, const Complex3& q0,
                                     double tol = 1e-12, int max_iters = 50);

struct SingularityRecord {
    ProjPoint point;
    int chart = 2;                       // axis of the chart used
    std::array<Cplx, 2> eigenvalues_x;   // chart-field Jacobian eigenvalues
    Cplx rho_at_s{};
    std::array<Cplx, 2> eigenvalues_y;   // rho(s) * eigenvalues_x
    bool is_hyperbolic = false;
    bool is_source_for_w = false;
};

struct SingularSolveError : std::runtime_error {
    double residual;
    SingularSolveError(const std::string& msg, double res)
        : std::runtime_error(msg), residual(res) {}
};

/// All projective points with F(p) ^ p = 0. Jouanolou fields get their exact
/// root set (the <t>-orbit structure) polished by Newton; other fields are
/// tracked by homotopy continuation from the J_d roots.
std::vector<SingularityRecord> find_singularities(const HomogeneousField& f);

/// Chart linearization at a singularity: eigenvalues of the 2x2 Jacobian of
/// X, rho(s), the Y = rho(s) X eigenvalues, hyperbolicity and W-source flags.
SingularityRecord linearize_at_singularity(const HomogeneousField& f, const ProjPoint& s);

struct PsReport {
    bool holds = false;
    std::vector<SingularityRecord> singularities;
};

/// Property P_S: every singularity hyperbolic and a W-source.
PsReport check_ps(const HomogeneousField& f);

enum class TrajectoryClass { FATOU, JULIA, SINGULAR };

struct TrajectorySample {
    long long step;
    double t;
    int chart;
    Cplx u, v;
    double sigma_b;
    double f_gain;
};

struct TrajectoryResult {
    TrajectoryClass classification = TrajectoryClass::JULIA;
    std::optional<double> transit_time;
    std::optional<ProjPoint> limit_b_point;
    double f_gain = 0.0;
    long long steps = 0;
    std::vector<TrajectorySample> samples;  // filled only when requested
};

struct IntegrationControls {
    double dt0 = 1e-3;
    double t_max = 200.0;
    double eps_b = 1e-6;
    double eps_s = 1e-6;
    long long max_steps = 1000000;
    double rel_tol = 1e-7;
    bool record_samples = false;
    long long sample_stride = 1;
    std::optional<int> force_chart;  // disables chart switching (testing)
    // Default budget semantics never clips steps to t_max, so the accepted
    // step sequence (hence any FATOU first-hit) is independent of the
    // budget. Set this to land exactly on t_max instead (trajectory dumps,
    // chart-consistency comparisons).
    bool stop_exactly_at_t_max = false;
};

struct NumericFailure : std::runtime_error {
    double t_at_failure;
    int chart;
    Cplx u, v;
    NumericFailure(const std::string& msg, double t, int chart_, Cplx u_, Cplx v_)
        : std::runtime_error(msg), t_at_failure(t), chart(chart_), u(u_), v(v_) {}
};

/// Integrates W forward with an embedded Dormand-Prince scheme in the chart
/// of maximal modulus, switching charts with hysteresis, carrying the f-gain
/// quadrature. Halts FATOU when sigma_B < eps_b and the sink test passes at
/// the nearest B-projection; SINGULAR within eps_s of a known singularity;
/// JULIA at budget exhaustion. Step underflow throws NumericFailure.
TrajectoryResult integrate_w(const HomogeneousField& f, const ProjPoint& p0,
                             const IntegrationControls& controls,
                             const std::vector<SingularityRecord>& singularities);

/// CSV dump: step,t,chart,u_re,u_im,v_re,v_im,sigma_B,f_gain.
std::string trajectory_csv(const TrajectoryResult& r);

}  // namespace jou
