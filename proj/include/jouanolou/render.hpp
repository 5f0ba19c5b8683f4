#pragma once

#include <string>
#include <vector>

#include "jouanolou/flow.hpp"

namespace jou::render {

enum class SliceMode { MERIDIAN_SPHERE, HOPF_TORUS };

/// 2D slice of the 3-sphere around a singularity, parameterized in the
/// eigenframe of the chart linearization (which at an s-fixed singularity is
/// the unitary eigenframe of the symmetry, making torus slices exactly
/// s-invariant).
struct SliceSpec {
    SliceMode mode = SliceMode::MERIDIAN_SPHERE;
    double phase = 0.0;    // meridian mode: phase of the real circle factor
    double eta = 0.7853981633974483;  // torus mode: Hopf angle in (0, pi/2)
    int width = 512;
    int height = 512;
};

/// Orthonormal frame at a singularity: e0 = unit representative, (e1, e2)
/// spanning the hermitian orthogonal complement along the linearization
/// eigenvectors.
struct SingularFrame {
    Complex3 e0, e1, e2;
    std::array<Cplx, 2> eigenvalues;  // chart-field eigenvalues matching e1, e2
};

SingularFrame singular_frame(const HomogeneousField& f, const SingularityRecord& s);

/// Grid of seed points on the slice. Throws if the frame ball of the given
/// radius could contain another singularity (message carries the nearest
/// distance).
std::vector<ProjPoint> sphere_grid(const HomogeneousField& f, const SingularityRecord& s,
                                   const std::vector<SingularityRecord>& all, double radius,
                                   const SliceSpec& slice);

enum class PixelClass : unsigned char { JULIA = 0, FATOU = 1, SINGULAR = 2, FAILED = 3 };

struct JuliaImage {
    int width = 0, height = 0;
    std::vector<PixelClass> classes;      // row-major
    std::vector<double> transit;          // finite for FATOU pixels
    int degree = 0;
    int singularity_index = 0;
    double radius = 0.0;
    double budget = 0.0;
    SliceSpec slice;
    long long failed_pixels = 0;
    long long julia_pixels = 0;

    PixelClass at(int row, int col) const { return classes[std::size_t(row) * width + col]; }
    double julia_fraction() const {
        return classes.empty() ? 0.0 : double(julia_pixels) / double(classes.size());
    }
};

struct RenderOptions {
    double budget = 200.0;
    int threads = 0;
    IntegrationControls controls;  // eps/dt defaults; t_max overridden by budget
};

/// Classifies every grid point with integrate_w. Julia pixels black, Fatou
/// shaded by log-scaled transit time, failures in a sentinel color.
JuliaImage render_slice(const HomogeneousField& f, int singularity_index, double radius,
                  const SliceSpec& slice, const RenderOptions& opts = {});

/// Binary PPM (P6).
std::string image_to_ppm(const JuliaImage& img);
std::string image_metadata_json(const JuliaImage& img);

}  // namespace jou::render
