#include "jouanolou/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "jouanolou/parallel.hpp"

namespace jou::render {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex3 scale_add(const Complex3& a, const Complex3& b, Cplx w) {
    return Complex3(a.x + w * b.x, a.y + w * b.y, a.z + w * b.z);
}

/// Eigenvector of the 2x2 chart Jacobian for eigenvalue lam.
std::array<Cplx, 2> eigvec2(Cplx a11, Cplx a12, Cplx a21, Cplx a22, Cplx lam) {
    // (a11 - lam) x + a12 y = 0; pick the better-conditioned row.
    Cplx r1x = a11 - lam, r1y = a12;
    Cplx r2x = a21, r2y = a22 - lam;
    Cplx vx, vy;
    if (std::abs(r1x) + std::abs(r1y) > std::abs(r2x) + std::abs(r2y)) {
        vx = -r1y;
        vy = r1x;
    } else {
        vx = -r2y;
        vy = r2x;
    }
    double n = std::sqrt(std::norm(vx) + std::norm(vy));
    if (n < 1e-14) return {Cplx{1.0, 0.0}, Cplx{0.0, 0.0}};
    return {vx / n, vy / n};
}

}  // namespace

SingularFrame singular_frame(const HomogeneousField& f, const SingularityRecord& s) {
    int axis = s.chart;
    Cplx pa = s.point.rep[axis];
    Cplx u = s.point.rep[(axis + 1) % 3] / pa, v = s.point.rep[(axis + 2) % 3] / pa;
    Complex3 rep = chart_rep(axis, u, v);
    auto jac = jacobian_matrix(f, rep);
    Complex3 vf = f.eval(rep);
    int iu = (axis + 1) % 3, iv = (axis + 2) % 3;
    Cplx a11 = jac[iu][iu] - u * jac[axis][iu] - vf[axis];
    Cplx a12 = jac[iu][iv] - u * jac[axis][iv];
    Cplx a21 = jac[iv][iu] - v * jac[axis][iu];
    Cplx a22 = jac[iv][iv] - v * jac[axis][iv] - vf[axis];

    SingularFrame fr;
    fr.e0 = s.point.rep;
    fr.eigenvalues = s.eigenvalues_x;
    for (int k = 0; k < 2; ++k) {
        auto cv = eigvec2(a11, a12, a21, a22, s.eigenvalues_x[k]);
        // Lift the chart direction (du, dv) to C^3 at the chart
        // representative, then orthogonalize against e0.
        Complex3 lift;
        lift.set(axis, {0.0, 0.0});
        lift.set(iu, cv[0]);
        lift.set(iv, cv[1]);
        Cplx along = hermitian_dot(lift, fr.e0);
        Complex3 orth = scale_add(lift, fr.e0, -along);
        double n = orth.norm();
        if (n < 1e-12) throw std::runtime_error("singular_frame: degenerate eigenvector lift");
        orth = orth.scaled(1.0 / n);
        (k == 0 ? fr.e1 : fr.e2) = orth;
    }
    // Gram step in case the eigenvectors are not hermitian-orthogonal
    // (they are at the symmetric singularities; generic fields may drift).
    Cplx overlap = hermitian_dot(fr.e2, fr.e1);
    if (std::abs(overlap) > 1e-12) {
        Complex3 adj = scale_add(fr.e2, fr.e1, -overlap);
        double n = adj.norm();
        if (n < 1e-9) throw std::runtime_error("singular_frame: parallel eigenvectors");
        fr.e2 = adj.scaled(1.0 / n);
    }
    return fr;
}

std::vector<ProjPoint> sphere_grid(const HomogeneousField& f, const SingularityRecord& s,
                                   const std::vector<SingularityRecord>& all, double radius,
                                   const SliceSpec& slice) {
    if (slice.width < 16 || slice.height < 16)
        throw std::invalid_argument("sphere_grid: resolution components must be >= 16");
    if (!(radius > 0.0)) throw std::invalid_argument("sphere_grid: radius must be positive");
    if (slice.mode == SliceMode::HOPF_TORUS && !(slice.eta > 0.0 && slice.eta < kTwoPi / 4))
        throw std::invalid_argument("sphere_grid: eta must lie in (0, pi/2)");

    // The frame ball of radius r has projective radius r/sqrt(1+r^2); demand
    // strict separation from every other singularity.
    double ball = radius / std::sqrt(1.0 + radius * radius);
    double nearest = 1e300;
    for (const auto& other : all) {
        if (other.point.same_point(s.point, 1e-9)) continue;
        nearest = std::min(nearest, proj_distance(s.point.rep, other.point.rep));
    }
    if (nearest <= ball * 1.05) {
        std::ostringstream os;
        os << "sphere_grid: radius " << radius << " reaches another singularity (nearest "
           << "projective distance " << nearest << ")";
        throw std::invalid_argument(os.str());
    }

    SingularFrame fr = singular_frame(f, s);
    std::vector<ProjPoint> grid;
    grid.reserve(std::size_t(slice.width) * slice.height);
    for (int row = 0; row < slice.height; ++row) {
        for (int col = 0; col < slice.width; ++col) {
            Cplx w1, w2;
            if (slice.mode == SliceMode::MERIDIAN_SPHERE) {
                // Round 2-sphere {(w1, t e^{i phase}) : |w1|^2 + t^2 = r^2}.
                double theta = std::numbers::pi * (row + 0.5) / slice.height;
                double psi = kTwoPi * (col + 0.5) / slice.width;
                w1 = radius * std::sin(theta) * Cplx{std::cos(psi), std::sin(psi)};
                double t = radius * std::cos(theta);
                w2 = t * Cplx{std::cos(slice.phase), std::sin(slice.phase)};
            } else {
                double th1 = kTwoPi * (col + 0.5) / slice.width;
                double th2 = kTwoPi * (row + 0.5) / slice.height;
                w1 = radius * std::cos(slice.eta) * Cplx{std::cos(th1), std::sin(th1)};
                w2 = radius * std::sin(slice.eta) * Cplx{std::cos(th2), std::sin(th2)};
            }
            Complex3 p = scale_add(scale_add(fr.e0, fr.e1, w1), fr.e2, w2);
            grid.emplace_back(p);
        }
    }
    return grid;
}

JuliaImage render_slice(const HomogeneousField& f, int singularity_index, double radius,
                  const SliceSpec& slice, const RenderOptions& opts) {
    auto sings = find_singularities(f);
    if (singularity_index < 0 || singularity_index >= (int)sings.size())
        throw std::invalid_argument("render: singularity index out of range");
    const SingularityRecord& s = sings[singularity_index];

    std::vector<ProjPoint> grid = sphere_grid(f, s, sings, radius, slice);

    JuliaImage img;
    img.width = slice.width;
    img.height = slice.height;
    img.classes.assign(grid.size(), PixelClass::JULIA);
    img.transit.assign(grid.size(), -1.0f);
    img.degree = f.degree;
    img.singularity_index = singularity_index;
    img.radius = radius;
    img.budget = opts.budget;
    img.slice = slice;

    IntegrationControls ctl = opts.controls;
    ctl.t_max = opts.budget;

    const int rows = slice.height;
    parallel_for_indexed(rows, resolve_thread_count(opts.threads), [&](std::size_t row) {
        for (int col = 0; col < slice.width; ++col) {
            std::size_t idx = row * slice.width + col;
            try {
                TrajectoryResult r = integrate_w(f, grid[idx], ctl, sings);
                switch (r.classification) {
                    case TrajectoryClass::FATOU:
                        img.classes[idx] = PixelClass::FATOU;
                        img.transit[idx] = *r.transit_time;
                        break;
                    case TrajectoryClass::SINGULAR:
                        img.classes[idx] = PixelClass::SINGULAR;
                        break;
                    case TrajectoryClass::JULIA:
                        img.classes[idx] = PixelClass::JULIA;
                        break;
                }
            } catch (const NumericFailure&) {
                img.classes[idx] = PixelClass::FAILED;
            }
        }
    });

    for (std::size_t i = 0; i < img.classes.size(); ++i) {
        if (img.classes[i] == PixelClass::FAILED) ++img.failed_pixels;
        if (img.classes[i] == PixelClass::JULIA) ++img.julia_pixels;
    }
    return img;
}

std::string image_to_ppm(const JuliaImage& img) {
    std::ostringstream os;
    os << "P6\n" << img.width << " " << img.height << "\n255\n";
    // Fatou shading: log-scaled transit time, bright for fast transit.
    double tmax = 0.0;
    for (std::size_t i = 0; i < img.classes.size(); ++i)
        if (img.classes[i] == PixelClass::FATOU) tmax = std::max(tmax, img.transit[i]);
    double logmax = std::log1p(std::max(1e-6, tmax));
    for (std::size_t i = 0; i < img.classes.size(); ++i) {
        unsigned char rgb[3] = {0, 0, 0};
        switch (img.classes[i]) {
            case PixelClass::JULIA:
                break;  // black
            case PixelClass::FATOU: {
                double v = 1.0 - std::log1p(std::max(0.0, img.transit[i])) / logmax;
                int c = (int)std::lround(40.0 + 215.0 * std::clamp(v, 0.0, 1.0));
                rgb[0] = (unsigned char)c;
                rgb[1] = (unsigned char)std::lround(c * 0.72);
                rgb[2] = (unsigned char)std::lround(40.0 + 0.2 * c);
                break;
            }
            case PixelClass::SINGULAR:
                rgb[0] = 60;
                rgb[1] = 60;
                rgb[2] = 220;
                break;
            case PixelClass::FAILED:
                rgb[0] = 255;
                rgb[1] = 0;
                rgb[2] = 255;  // sentinel
                break;
        }
        os.write(reinterpret_cast<const char*>(rgb), 3);
    }
    return os.str();
}

std::string image_metadata_json(const JuliaImage& img) {
    nlohmann::json j{
        {"degree", img.degree},
        {"singularity_index", img.singularity_index},
        {"radius", img.radius},
        {"budget", img.budget},
        {"slice",
         {{"mode", img.slice.mode == SliceMode::MERIDIAN_SPHERE ? "meridian" : "torus"},
          {"phase", img.slice.phase},
          {"eta", img.slice.eta},
          {"width", img.slice.width},
          {"height", img.slice.height}}},
        {"julia_pixels", img.julia_pixels},
        {"failed_pixels", img.failed_pixels},
        {"julia_fraction", img.julia_fraction()},
    };
    return j.dump(2);
}

}  // namespace jou::render
