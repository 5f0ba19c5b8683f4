#include "jouanolou/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace jou {

namespace {

constexpr double kPi = std::numbers::pi;

Cplx cpow_int(Cplx b, int e) {
    Cplx r{1.0, 0.0};
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

double pow_int(double b, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

ProjPoint::ProjPoint(const Complex3& p) {
    double n = p.norm();
    if (!(n > 1e-300)) throw std::invalid_argument("ProjPoint: zero representative");
    rep = p.scaled(1.0 / n);
}

bool ProjPoint::same_point(const ProjPoint& o, double tol) const {
    return std::abs(std::abs(hermitian_dot(rep, o.rep)) - 1.0) < tol;
}

double proj_distance(const Complex3& a, const Complex3& b) {
    // sin of the Fubini-Study angle, computed as the orthogonal rejection so
    // small distances do not cancel.
    double na2 = a.norm2(), nb2 = b.norm2();
    Cplx coef = hermitian_dot(b, a) / na2;
    Complex3 rej = b - a.scaled(coef);
    return std::sqrt(std::min(1.0, rej.norm2() / nb2));
}

Cplx rho(const HomogeneousField& f, const Complex3& p) {
    double n2 = p.norm2();
    if (!(n2 > 0.0)) throw std::invalid_argument("rho: p must be nonzero");
    return -2.0 * hermitian_dot(p, f.eval(p)) / pow_int(n2, f.degree);
}

Cplx b_residual(const HomogeneousField& f, const Complex3& p) {
    return hermitian_dot(p, f.eval(p));
}

double sigma_b(const HomogeneousField& f, const Complex3& p) {
    double n = p.norm();
    return std::abs(b_residual(f, p)) / pow_int(n, f.degree + 1);
}

Complex3 chart_rep(int axis, Cplx u, Cplx v) {
    Complex3 p;
    p.set(axis, {1.0, 0.0});
    p.set((axis + 1) % 3, u);
    p.set((axis + 2) % 3, v);
    return p;
}

int max_modulus_axis(const Complex3& p) {
    double m0 = std::norm(p.x), m1 = std::norm(p.y), m2 = std::norm(p.z);
    if (m0 >= m1 && m0 >= m2) return 0;
    return m1 >= m2 ? 1 : 2;
}

ChartField x_chart(const HomogeneousField& f, int axis, Cplx u, Cplx v) {
    Complex3 p = chart_rep(axis, u, v);
    Complex3 vf = f.eval(p);
    Cplx va = vf[axis];
    return {vf[(axis + 1) % 3] - u * va, vf[(axis + 2) % 3] - v * va};
}

std::array<double, 4> w_chart(const HomogeneousField& f, int axis, Cplx u, Cplx v) {
    Complex3 p = chart_rep(axis, u, v);
    Complex3 vf = f.eval(p);
    double n2 = p.norm2();
    Cplx r = -2.0 * hermitian_dot(p, vf) / pow_int(n2, f.degree);
    Cplx va = vf[axis];
    Cplx wu = r * (vf[(axis + 1) % 3] - u * va);
    Cplx wv = r * (vf[(axis + 2) % 3] - v * va);
    return {wu.real(), wu.imag(), wv.real(), wv.imag()};
}

double f_gain_rate(const HomogeneousField& f, const Complex3& p) {
    double n2 = p.norm2();
    Cplx res = hermitian_dot(p, f.eval(p));
    // df(W~) with the real-part flow convention (coordinate velocity
    // rho~ V / 2): 2 |<p,V>|^2 / ||p||^{2d+2}.
    return 2.0 * std::norm(res) / pow_int(n2, f.degree + 1);
}

BPointClass classify_b_point(const HomogeneousField& f, const Complex3& p, double tol,
                             double eps_b) {
    double n = p.norm();
    if (std::abs(b_residual(f, p)) >= eps_b * pow_int(n, f.degree + 1))
        throw std::invalid_argument("classify_b_point: point is not on B to tolerance");
    Complex3 v = f.eval(p);
    double lhs = v.norm2();
    double rhs = std::abs(hermitian_dot(jacobian_apply(f, p), p));
    double scale = tol * pow_int(n * n, f.degree);
    if (lhs - rhs > scale) return BPointClass::SINK;
    if (rhs - lhs > scale) return BPointClass::SADDLE;
    return BPointClass::DEGENERATE;
}

std::optional<Complex3> project_to_b(const HomogeneousField& f, const Complex3& q0, double tol,
                                     int max_iters) {
    Complex3 q = q0.scaled(1.0 / q0.norm());
    for (int it = 0; it < max_iters; ++it) {
        Cplx res = b_residual(f, q);
        if (std::abs(res) < tol) return q;
        Complex3 v = f.eval(q);
        // res(delta) = <q + delta v, F(q + delta v)>; d/d(delta) = ||F||^2,
        // d/d(conj delta) = conj(<DF(F), q>). Solve A d + B conj(d) = -res.
        double a = v.norm2();
        Cplx b = std::conj(hermitian_dot(jacobian_apply(f, q), q));
        double den = a * a - std::norm(b);
        if (std::abs(den) < 1e-30) return std::nullopt;
        Cplx c = -res;
        Cplx delta = (a * c - b * std::conj(c)) / den;
        q = q + v.scaled(delta);
        double n = q.norm();
        if (!(n > 1e-300) || !std::isfinite(n)) return std::nullopt;
        q = q.scaled(1.0 / n);
    }
    return std::abs(b_residual(f, q)) < tol ? std::optional<Complex3>(q) : std::nullopt;
}

namespace {

/// Roots of V(p) = lambda p for J_d: with z = 1, lambda^n = 1 for
/// n = d^2 + d + 1 and p = (lambda^{-(d+1)}, lambda^{-1}, 1).
std::vector<Complex3> jouanolou_seed_roots(int d) {
    int n = d * d + d + 1;
    std::vector<Complex3> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * kPi * k / n;
        Cplx lam{std::cos(th), std::sin(th)};
        Cplx linv = std::conj(lam);  // lambda^{-1} for |lambda| = 1
        out.emplace_back(cpow_int(linv, d + 1), linv, Cplx{1.0, 0.0});
    }
    return out;
}

double singular_residual(const HomogeneousField& f, const Complex3& p) {
    // ||F(p) ^ p|| scaled to be unit-free.
    Complex3 v = f.eval(p);
    Cplx cx = v.y * p.z - v.z * p.y;
    Cplx cy = v.z * p.x - v.x * p.z;
    Cplx cz = v.x * p.y - v.y * p.x;
    double n = p.norm();
    return std::sqrt(std::norm(cx) + std::norm(cy) + std::norm(cz)) / pow_int(n, f.degree + 1);
}

/// Newton on X(u,v) = 0 in the chart of maximal modulus. Returns the
/// polished unit representative, or nullopt.
std::optional<Complex3> polish_singularity(const HomogeneousField& f, Complex3 p, int iters = 60) {
    for (int it = 0; it < iters; ++it) {
        int axis = max_modulus_axis(p);
        Cplx pa = p[axis];
        Cplx u = p[(axis + 1) % 3] / pa, v = p[(axis + 2) % 3] / pa;
        ChartField x = x_chart(f, axis, u, v);
        if (std::abs(x.xu) + std::abs(x.xv) < 1e-15) return ProjPoint(p).rep;
        // Chart Jacobian of X via the ambient Jacobian.
        Complex3 rep = chart_rep(axis, u, v);
        auto jac = jacobian_matrix(f, rep);
        Complex3 vf = f.eval(rep);
        int iu = (axis + 1) % 3, iv = (axis + 2) % 3;
        Cplx a11 = jac[iu][iu] - u * jac[axis][iu] - vf[axis];
        Cplx a12 = jac[iu][iv] - u * jac[axis][iv];
        Cplx a21 = jac[iv][iu] - v * jac[axis][iu];
        Cplx a22 = jac[iv][iv] - v * jac[axis][iv] - vf[axis];
        Cplx det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-30) return std::nullopt;
        Cplx du = (-x.xu * a22 + x.xv * a12) / det;
        Cplx dv = (-a11 * x.xv + a21 * x.xu) / det;
        u += du;
        v += dv;
        p = chart_rep(axis, u, v);
        if (std::abs(du) + std::abs(dv) < 1e-15) break;
    }
    Complex3 unit = ProjPoint(p).rep;
    return singular_residual(f, unit) < 1e-10 ? std::optional<Complex3>(unit) : std::nullopt;
}

std::array<Cplx, 2> eig2(Cplx a11, Cplx a12, Cplx a21, Cplx a22) {
    Cplx tr = a11 + a22;
    Cplx disc = std::sqrt(tr * tr - 4.0 * (a11 * a22 - a12 * a21));
    return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

}  // namespace

SingularityRecord linearize_at_singularity(const HomogeneousField& f, const ProjPoint& s) {
    double res = singular_residual(f, s.rep);
    if (res > 1e-6)
        throw SingularSolveError("linearize_at_singularity: point is not singular", res);
    int axis = max_modulus_axis(s.rep);
    Cplx pa = s.rep[axis];
    Cplx u = s.rep[(axis + 1) % 3] / pa, v = s.rep[(axis + 2) % 3] / pa;
    Complex3 rep = chart_rep(axis, u, v);
    auto jac = jacobian_matrix(f, rep);
    Complex3 vf = f.eval(rep);
    int iu = (axis + 1) % 3, iv = (axis + 2) % 3;
    Cplx a11 = jac[iu][iu] - u * jac[axis][iu] - vf[axis];
    Cplx a12 = jac[iu][iv] - u * jac[axis][iv];
    Cplx a21 = jac[iv][iu] - v * jac[axis][iu];
    Cplx a22 = jac[iv][iv] - v * jac[axis][iv] - vf[axis];

    SingularityRecord rec;
    rec.point = s;
    rec.chart = axis;
    rec.eigenvalues_x = eig2(a11, a12, a21, a22);
    rec.rho_at_s = rho(f, rep);
    rec.eigenvalues_y = {rec.rho_at_s * rec.eigenvalues_x[0], rec.rho_at_s * rec.eigenvalues_x[1]};
    Cplx ratio = rec.eigenvalues_x[0] / rec.eigenvalues_x[1];
    rec.is_hyperbolic = std::abs(ratio.imag()) > 1e-9;
    rec.is_source_for_w =
        rec.eigenvalues_y[0].real() > 0.0 && rec.eigenvalues_y[1].real() > 0.0;
    return rec;
}

std::vector<SingularityRecord> find_singularities(const HomogeneousField& f) {
    int d = f.degree;
    std::vector<Complex3> roots = jouanolou_seed_roots(d);
    HomogeneousField jd = jouanolou_field(d);

    if (!(f == jd)) {
        // Homotopy continuation (1-s) gamma J_d + s F, Newton-polish at each
        // step. A straight real path can hit a discriminant point (roots
        // collide); a complex phase on the start system breaks those
        // degeneracies, so retry over a few fixed phases.
        const double phases[] = {0.0, 0.7, 2.1, 4.0};
        std::optional<std::vector<Complex3>> tracked;
        std::string last_error;
        for (double phase : phases) {
            Cplx gamma{std::cos(phase), std::sin(phase)};
            std::vector<Complex3> path = jouanolou_seed_roots(d);
            bool ok = true;
            int steps = 32;
            for (int si = 1; si <= steps && ok; ++si) {
                double s = double(si) / steps;
                std::array<Polynomial, 3> comps;
                for (int k = 0; k < 3; ++k) {
                    for (const auto& [e, c] : jd.components[k])
                        comps[k][e] = Coeff::inexact(c.value() * gamma * (1.0 - s));
                    for (const auto& [e, c] : f.components[k]) {
                        Cplx prev = comps[k].count(e) ? comps[k][e].value() : Cplx{0, 0};
                        comps[k][e] = Coeff::inexact(prev + c.value() * s);
                    }
                }
                HomogeneousField fs(d, std::move(comps));
                const HomogeneousField& target = (si == steps) ? f : fs;
                for (auto& r : path) {
                    auto polished = polish_singularity(target, r);
                    if (!polished) {
                        ok = false;
                        last_error = "continuation lost a root";
                        break;
                    }
                    r = *polished;
                }
            }
            if (ok) {
                for (size_t i = 0; i < path.size() && ok; ++i)
                    for (size_t j = i + 1; j < path.size(); ++j)
                        if (proj_distance(path[i], path[j]) < 1e-8) {
                            ok = false;
                            last_error = "two roots collided";
                            break;
                        }
            }
            if (ok) {
                tracked = std::move(path);
                break;
            }
        }
        if (!tracked) throw SingularSolveError("find_singularities: " + last_error, 0.0);
        roots = std::move(*tracked);
    } else {
        for (auto& r : roots) {
            auto polished = polish_singularity(f, r);
            if (!polished)
                throw SingularSolveError("find_singularities: Newton polish failed",
                                         singular_residual(f, r));
            r = *polished;
        }
        for (size_t i = 0; i < roots.size(); ++i)
            for (size_t j = i + 1; j < roots.size(); ++j)
                if (proj_distance(roots[i], roots[j]) < 1e-8)
                    throw SingularSolveError("find_singularities: two roots collided", 0.0);
    }

    std::vector<SingularityRecord> out;
    out.reserve(roots.size());
    for (const auto& r : roots) out.push_back(linearize_at_singularity(f, ProjPoint(r)));
    return out;
}

PsReport check_ps(const HomogeneousField& f) {
    PsReport rep;
    rep.singularities = find_singularities(f);
    rep.holds = std::all_of(rep.singularities.begin(), rep.singularities.end(),
                            [](const SingularityRecord& s) {
                                return s.is_hyperbolic && s.is_source_for_w;
                            });
    return rep;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84,  0.0};
constexpr double kB4[7] = {5179.0 / 57600, 0.0,          7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct FlowState {
    double y[5];  // u_re, u_im, v_re, v_im, f_gain
    Cplx u() const { return {y[0], y[1]}; }
    Cplx v() const { return {y[2], y[3]}; }
};

void flow_deriv(const HomogeneousField& f, int axis, const double* y, double* dy) {
    // W = Re(rho X): the real part of a holomorphic field moves coordinates
    // at half the holomorphic velocity.
    auto w = w_chart(f, axis, Cplx{y[0], y[1]}, Cplx{y[2], y[3]});
    dy[0] = 0.5 * w[0];
    dy[1] = 0.5 * w[1];
    dy[2] = 0.5 * w[2];
    dy[3] = 0.5 * w[3];
    dy[4] = f_gain_rate(f, chart_rep(axis, Cplx{y[0], y[1]}, Cplx{y[2], y[3]}));
}

}  // namespace

TrajectoryResult integrate_w(const HomogeneousField& f, const ProjPoint& p0,
                             const IntegrationControls& controls,
                             const std::vector<SingularityRecord>& singularities) {
    if (!(controls.dt0 > 0) || !(controls.t_max > 0) || !(controls.eps_b > 0) ||
        !(controls.eps_s > 0) || controls.max_steps <= 0)
        throw std::invalid_argument("integrate_w: controls must be positive");

    TrajectoryResult result;
    int axis = controls.force_chart ? *controls.force_chart : max_modulus_axis(p0.rep);
    Cplx pa = p0.rep[axis];
    if (std::abs(pa) < 1e-12) throw std::invalid_argument("integrate_w: degenerate start chart");
    FlowState st;
    Cplx u0 = p0.rep[(axis + 1) % 3] / pa, v0 = p0.rep[(axis + 2) % 3] / pa;
    st.y[0] = u0.real();
    st.y[1] = u0.imag();
    st.y[2] = v0.real();
    st.y[3] = v0.imag();
    st.y[4] = 0.0;

    double t = 0.0;
    double h = controls.dt0;
    long long accepted = 0;

    auto rep_now = [&]() { return chart_rep(axis, st.u(), st.v()); };

    auto record = [&](long long step) {
        if (!controls.record_samples || step % controls.sample_stride != 0) return;
        result.samples.push_back({step, t, axis, st.u(), st.v(), sigma_b(f, rep_now()), st.y[4]});
    };

    auto near_singularity = [&](const Complex3& p) -> const SingularityRecord* {
        for (const auto& s : singularities)
            if (proj_distance(p, s.point.rep) < controls.eps_s) return &s;
        return nullptr;
    };

    auto fatou_check = [&](const Complex3& p) -> std::optional<ProjPoint> {
        if (sigma_b(f, p) >= controls.eps_b) return std::nullopt;
        // sigma_B alone can dip near saddles of non-P_B fields; confirm with
        // the sink inequality at the nearest B-projection.
        auto proj = project_to_b(f, p);
        if (!proj) return std::nullopt;
        try {
            if (classify_b_point(f, *proj, 1e-12) == BPointClass::SINK) return ProjPoint(*proj);
        } catch (const std::invalid_argument&) {
        }
        return std::nullopt;
    };

    record(0);
    while (true) {
        Complex3 p = rep_now();
        if (near_singularity(p) != nullptr) {
            result.classification = TrajectoryClass::SINGULAR;
            result.transit_time = t;
            result.limit_b_point = std::nullopt;
            result.f_gain = st.y[4];
            result.steps = accepted;
            return result;
        }
        if (t >= controls.t_max || accepted >= controls.max_steps) {
            result.classification = TrajectoryClass::JULIA;
            result.transit_time = std::nullopt;
            result.f_gain = st.y[4];
            result.steps = accepted;
            return result;
        }
        if (auto b = fatou_check(p)) {
            result.classification = TrajectoryClass::FATOU;
            result.transit_time = t;
            result.limit_b_point = *b;
            result.f_gain = st.y[4];
            result.steps = accepted;
            return result;
        }

        double hstep = controls.stop_exactly_at_t_max ? std::min(h, controls.t_max - t) : h;
        double k[7][5];
        flow_deriv(f, axis, st.y, k[0]);
        for (int i = 1; i < 7; ++i) {
            double yy[5];
            for (int c = 0; c < 5; ++c) {
                yy[c] = st.y[c];
                for (int j = 0; j < i; ++j) yy[c] += hstep * kA[i][j] * k[j][c];
            }
            flow_deriv(f, axis, yy, k[i]);
        }
        double y5[5], y4[5];
        for (int c = 0; c < 5; ++c) {
            double acc5 = 0.0, acc4 = 0.0;
            for (int i = 0; i < 7; ++i) {
                acc5 += kB5[i] * k[i][c];
                acc4 += kB4[i] * k[i][c];
            }
            y5[c] = st.y[c] + hstep * acc5;
            y4[c] = st.y[c] + hstep * acc4;
        }
        double errsq = 0.0, scalesq = 0.0;
        for (int c = 0; c < 5; ++c) {
            double e = y5[c] - y4[c];
            errsq += e * e;
            double s = 1.0 + std::abs(y5[c]);
            scalesq += s * s;
        }
        double err = std::sqrt(errsq) / (controls.rel_tol * std::sqrt(scalesq));

        if (err <= 1.0) {
            double fg_inc = y5[4] - st.y[4];
            for (int c = 0; c < 4; ++c) st.y[c] = y5[c];
            // Quadrature of a nonnegative rate; clamp roundoff-level
            // negatives.
            st.y[4] += std::max(fg_inc, 0.0);
            t += hstep;
            ++accepted;
            record(accepted);
            if (!controls.force_chart) {
                // Hysteresis band [1, 1.1]: re-chart only past 1.1.
                if (std::abs(st.u()) > 1.1 || std::abs(st.v()) > 1.1) {
                    Complex3 np = rep_now();
                    int naxis = max_modulus_axis(np);
                    if (naxis != axis) {
                        Cplx na = np[naxis];
                        Cplx nu = np[(naxis + 1) % 3] / na, nv = np[(naxis + 2) % 3] / na;
                        axis = naxis;
                        st.y[0] = nu.real();
                        st.y[1] = nu.imag();
                        st.y[2] = nv.real();
                        st.y[3] = nv.imag();
                    }
                }
            }
        }
        double grow = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = hstep * std::clamp(grow, 0.2, 5.0);
        if (h < 1e-14)
            throw NumericFailure("integrate_w: step size underflow", t, axis, st.u(), st.v());
    }
}

std::string trajectory_csv(const TrajectoryResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << "step,t,chart,u_re,u_im,v_re,v_im,sigma_B,f_gain\n";
    for (const auto& s : r.samples)
        os << s.step << ',' << s.t << ',' << s.chart << ',' << s.u.real() << ',' << s.u.imag()
           << ',' << s.v.real() << ',' << s.v.imag() << ',' << s.sigma_b << ',' << s.f_gain
           << '\n';
    return os.str();
}

}  // namespace jou
