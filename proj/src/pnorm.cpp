#include "jouanolou/pnorm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "jouanolou/parallel.hpp"

namespace jou::pnorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double weight(double a, double e) { return a > 0.0 ? std::pow(a, e) : 0.0; }

/// Kronecker low-discrepancy sequence in [0,1)^6 (generalized golden
/// ratios), folded through Box-Muller into points of the unit sphere of C^3.
struct SphereSampler {
    std::array<double, 6> state;
    std::array<double, 6> alpha;

    explicit SphereSampler(unsigned long long seed) {
        // gamma_k = phi_6^-(k+1) with phi_6 the positive root of x^7 = x + 1.
        double phi = 1.1347241384015194;
        double g = 1.0;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int k = 0; k < 6; ++k) {
            g /= phi;
            alpha[k] = g;
            state[k] = uni(rng);  // random Cranley-Patterson shift
        }
    }

    Complex3 next() {
        double n[6];
        for (int k = 0; k < 6; ++k) {
            state[k] += alpha[k];
            if (state[k] >= 1.0) state[k] -= 1.0;
        }
        for (int k = 0; k < 3; ++k) {
            double r = std::sqrt(-2.0 * std::log(std::max(state[2 * k], 1e-300)));
            n[2 * k] = r * std::cos(kTwoPi * state[2 * k + 1]);
            n[2 * k + 1] = r * std::sin(kTwoPi * state[2 * k + 1]);
        }
        Complex3 q{{n[0], n[3]}, {n[1], n[4]}, {n[2], n[5]}};
        double nn = q.norm();
        if (!(nn > 1e-12)) return next();
        return q.scaled(1.0 / nn);
    }
};

/// Fold by the cyclic symmetry of the Jouanolou field: rotate coordinates so
/// the max-modulus one sits last. R_p is invariant under this relabeling.
Complex3 fold_cyclic(const Complex3& q) {
    double m0 = std::norm(q.x), m1 = std::norm(q.y), m2 = std::norm(q.z);
    if (m2 >= m0 && m2 >= m1) return q;
    if (m0 >= m1) return Complex3(q.y, q.z, q.x);
    return Complex3(q.z, q.x, q.y);
}

}  // namespace

PhiDerivatives phi_derivatives(const HomogeneousField& f, double p_exp, const Complex3& q) {
    if (p_exp < 2.0) throw std::invalid_argument("phi_derivatives: p_exp >= 2 required");
    if (!(q.norm2() > 0.0)) throw std::invalid_argument("phi_derivatives: q must be nonzero");
    Complex3 v = f.eval(q);
    Complex3 jv = jacobian_apply(f, q);
    PhiDerivatives out;
    const double p = p_exp;
    for (int k = 0; k < 3; ++k) {
        double a = std::abs(q[k]);
        double w2 = p == 2.0 ? 1.0 : weight(a, p - 2.0);
        Cplx qv = std::conj(q[k]) * v[k];
        out.phi_t += (p / 2.0) * w2 * qv;
        Cplx tt = w2 * std::conj(q[k]) * jv[k];
        if (p > 2.0 && a > 0.0) {
            // |q|^{p-4} (conj(q) V)^2 written as |q|^{p-2} (phase V)^2 so
            // tiny components cannot overflow the negative power.
            Cplx unit_qv = (std::conj(q[k]) / a) * v[k];
            tt += ((p - 2.0) / 2.0) * w2 * unit_qv * unit_qv;
        }
        out.phi_tt += (p / 2.0) * tt;
        out.phi_ttbar += (p * p / 4.0) * w2 * std::norm(v[k]);
    }
    return out;
}

std::optional<Complex3> project_to_bp(const HomogeneousField& f, double p_exp,
                                      const Complex3& q0, double tol, int max_iters) {
    if (!(q0.norm2() > 0.0)) throw std::invalid_argument("project_to_bp: q0 must be nonzero");
    Complex3 q = q0.scaled(1.0 / q0.norm());
    for (int it = 0; it < max_iters; ++it) {
        PhiDerivatives d = phi_derivatives(f, p_exp, q);
        if (std::abs(d.phi_t) < tol) return q;
        // phi_t(q + delta V) to first order: A delta + B conj(delta) with
        // A = phi_tt, B = phi_ttbar.
        double b = d.phi_ttbar;
        Cplx a = d.phi_tt;
        double den = std::norm(a) - b * b;
        if (std::abs(den) < 1e-30) return std::nullopt;
        Cplx c = -d.phi_t;
        Cplx delta = (std::conj(a) * c - b * std::conj(c)) / den;
        q = q + f.eval(q).scaled(delta);
        double nn = q.norm();
        if (!(nn > 1e-300) || !std::isfinite(nn)) return std::nullopt;
        q = q.scaled(1.0 / nn);
    }
    return std::abs(phi_derivatives(f, p_exp, q).phi_t) < tol ? std::optional<Complex3>(q)
                                                              : std::nullopt;
}

double ratio_rp(const HomogeneousField& f, double p_exp, const Complex3& q) {
    PhiDerivatives d = phi_derivatives(f, p_exp, q);
    double n = q.norm();
    if (std::abs(d.phi_t) > 1e-7 * std::pow(n, p_exp + f.degree - 1))
        throw std::invalid_argument("ratio_rp: q does not pass the B_p residual test");
    if (!(d.phi_ttbar > 0.0)) throw std::domain_error("ratio_rp: phi_ttbar vanished");
    return std::abs(d.phi_tt) / d.phi_ttbar;
}

namespace {

struct Candidate {
    double ratio = -1.0;
    Complex3 point;
};

Candidate evaluate_sample(const HomogeneousField& f, double p, const Complex3& q0) {
    auto proj = project_to_bp(f, p, q0);
    if (!proj) return {};
    PhiDerivatives d = phi_derivatives(f, p, *proj);
    if (!(d.phi_ttbar > 0.0)) return {};
    return {std::abs(d.phi_tt) / d.phi_ttbar, *proj};
}

Candidate hill_climb(const HomogeneousField& f, double p, Candidate c, int steps,
                     unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double scale = 0.05;
    for (int i = 0; i < steps; ++i) {
        Complex3 pert(c.point.x + scale * Cplx(gauss(rng), gauss(rng)),
                      c.point.y + scale * Cplx(gauss(rng), gauss(rng)),
                      c.point.z + scale * Cplx(gauss(rng), gauss(rng)));
        Candidate trial = evaluate_sample(f, p, pert);
        if (trial.ratio > c.ratio)
            c = trial;
        else
            scale = std::max(scale * 0.93, 1e-5);
    }
    return c;
}

}  // namespace

std::vector<SweepRow> sweep(int d, double p_min, double p_max, int p_steps,
                            const SweepOptions& opts) {
    if (p_min < 2.0 || p_max < p_min || p_steps < 1 || opts.samples < 1)
        throw std::invalid_argument("sweep: need 2 <= p_min <= p_max, steps/samples >= 1");
    HomogeneousField f = jouanolou_field(d);
    std::vector<SweepRow> rows(p_steps);

    for (int pi = 0; pi < p_steps; ++pi) {
        double p = p_steps == 1 ? p_min
                                : p_min + (p_max - p_min) * double(pi) / double(p_steps - 1);
        const long long batch = 256;
        const long long n_batches = (opts.samples + batch - 1) / batch;
        struct BatchOut {
            std::vector<Candidate> top;
            Candidate best_sample;
            long long converged = 0;
            long long used = 0;
        };
        std::vector<BatchOut> outs(n_batches);
        parallel_for_indexed(n_batches, resolve_thread_count(opts.threads), [&](std::size_t bi) {
            // Per-batch sampler offset keeps the stream deterministic and
            // independent of the thread schedule.
            SphereSampler sampler(opts.rng_seed + 977 * bi + 131 * pi);
            BatchOut out;
            long long lo = bi * batch;
            long long hi = std::min<long long>(lo + batch, opts.samples);
            for (long long i = lo; i < hi; ++i) {
                Complex3 q0 = fold_cyclic(sampler.next());
                ++out.used;
                Candidate c = evaluate_sample(f, p, q0);
                if (c.ratio < 0.0) continue;
                ++out.converged;
                if (c.ratio > out.best_sample.ratio) out.best_sample = c;
                if (opts.seeds > 0) {
                    out.top.push_back(c);
                    std::sort(out.top.begin(), out.top.end(), [](const Candidate& a,
                                                                 const Candidate& b) {
                        return a.ratio > b.ratio;
                    });
                    if ((int)out.top.size() > opts.seeds) out.top.resize(opts.seeds);
                }
            }
            outs[bi] = std::move(out);
        });

        std::vector<Candidate> top;
        Candidate best;
        long long converged = 0, used = 0;
        for (const auto& o : outs) {
            converged += o.converged;
            used += o.used;
            if (o.best_sample.ratio > best.ratio) best = o.best_sample;
            top.insert(top.end(), o.top.begin(), o.top.end());
        }
        std::sort(top.begin(), top.end(),
                  [](const Candidate& a, const Candidate& b) { return a.ratio > b.ratio; });
        if ((int)top.size() > opts.seeds) top.resize(opts.seeds);

        // The sampled maximum alone is monotone in the sample count; hill
        // climbing can only raise it further.
        for (std::size_t si = 0; si < top.size(); ++si) {
            Candidate c = hill_climb(f, p, top[si], opts.climb_steps, opts.rng_seed ^ (si * 7919));
            if (c.ratio > best.ratio) best = c;
        }

        SweepRow row;
        row.d = d;
        row.p_exp = p;
        row.max_ratio = std::max(best.ratio, 0.0);
        row.argmax = best.point;
        row.samples_used = used;
        row.converged_fraction = used > 0 ? double(converged) / double(used) : 0.0;
        rows[pi] = row;
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os.precision(15);
    os << "d,p,max_ratio,argmax_x_re,argmax_x_im,argmax_y_re,argmax_y_im,argmax_z_re,"
          "argmax_z_im,samples,converged_fraction\n";
    for (const auto& r : rows)
        os << r.d << ',' << r.p_exp << ',' << r.max_ratio << ',' << r.argmax.x.real() << ','
           << r.argmax.x.imag() << ',' << r.argmax.y.real() << ',' << r.argmax.y.imag() << ','
           << r.argmax.z.real() << ',' << r.argmax.z.imag() << ',' << r.samples_used << ','
           << r.converged_fraction << '\n';
    return os.str();
}

}  // namespace jou::pnorm
