#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "jouanolou/exact_gate.hpp"
#include "jouanolou/field.hpp"
#include "jouanolou/flow.hpp"
#include "jouanolou/pnorm.hpp"
#include "jouanolou/render.hpp"
#include "jouanolou/symmetry.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

/// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), (std::streamsize)content.size());
        if (!os) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void print_report_summary(const jou::gate::VerificationReport& r, std::ostream& os) {
    os << "C_" << r.n << ": members=" << r.member_count
       << " holds=" << (r.holds ? "true" : "false")
       << (r.certifying ? " (certifying)" : " (non-certifying)") << "\n"
       << "  max iota  = " << jou::i128_to_string(r.max_iota) << "\n"
       << "  max kappa = " << jou::i128_to_string(r.max_kappa) << "\n"
       << "  min gap   = " << jou::i128_to_string(r.min_gap) << "\n"
       << "  max ratio = ";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15f", r.max_ratio);
    os << buf << "  at U=(" << r.ratio_argmax.u.re << "," << r.ratio_argmax.u.im << ") V=("
       << r.ratio_argmax.v.re << "," << r.ratio_argmax.v.im << ")\n"
       << "  elapsed   = " << r.elapsed_seconds << "s on " << r.worker_count << " worker(s)\n";
    for (const auto& ce : r.counterexamples)
        os << "  counterexample U=(" << ce.q.u.re << "," << ce.q.u.im << ") V=(" << ce.q.v.re
           << "," << ce.q.v.im << ") iota=" << jou::i128_to_string(ce.iota_val)
           << " kappa=" << jou::i128_to_string(ce.kappa_val) << "\n";
}

jou::Complex3 parse_complex3(const std::string& text) {
    double parts[6] = {0, 0, 0, 0, 0, 0};
    std::stringstream ss(text);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',') && i < 6) parts[i++] = std::stod(item);
    if (i != 6) throw CLI::ValidationError("--trace-point needs 6 comma-separated reals");
    return jou::Complex3({parts[0], parts[1]}, {parts[2], parts[3]}, {parts[4], parts[5]});
}

int run_verify_pb(long long n, int threads, const std::string& json_path,
                  const std::string& chunk_spec) {
    std::optional<std::pair<int, int>> chunk;
    if (!chunk_spec.empty()) {
        int ci, ct;
        if (std::sscanf(chunk_spec.c_str(), "%d/%d", &ci, &ct) != 2)
            throw CLI::ValidationError("--chunk expects i/n");
        chunk = {ci, ct};
    }
    auto rep = jou::gate::verify_cn(n, threads, chunk);
    print_report_summary(rep, std::cout);
    if (!rep.certifying && rep.chunk_total == 1)
        std::cout << "  note: N < " << jou::gate::min_valid_n()
                  << ", result does not certify P_B\n";
    if (!json_path.empty()) write_file_atomic(json_path, jou::gate::report_to_json(rep));
    return rep.holds ? kExitOk : kExitViolation;
}

int run_verify_ps(int degree, const std::string& json_path) {
    auto rep = jou::check_ps(jou::jouanolou_field(degree));
    nlohmann::json sings = nlohmann::json::array();
    for (const auto& s : rep.singularities) {
        sings.push_back(
            {{"point",
              {s.point.rep.x.real(), s.point.rep.x.imag(), s.point.rep.y.real(),
               s.point.rep.y.imag(), s.point.rep.z.real(), s.point.rep.z.imag()}},
             {"chart", s.chart},
             {"eigenvalues_x",
              {{s.eigenvalues_x[0].real(), s.eigenvalues_x[0].imag()},
               {s.eigenvalues_x[1].real(), s.eigenvalues_x[1].imag()}}},
             {"rho", {s.rho_at_s.real(), s.rho_at_s.imag()}},
             {"eigenvalues_y",
              {{s.eigenvalues_y[0].real(), s.eigenvalues_y[0].imag()},
               {s.eigenvalues_y[1].real(), s.eigenvalues_y[1].imag()}}},
             {"hyperbolic", s.is_hyperbolic},
             {"source_for_w", s.is_source_for_w}});
    }
    nlohmann::json j{{"degree", degree},
                     {"singularity_count", rep.singularities.size()},
                     {"holds", rep.holds},
                     {"singularities", sings}};
    std::cout << "P_S degree " << degree << ": " << rep.singularities.size()
              << " singularities, holds=" << (rep.holds ? "true" : "false") << "\n";
    for (const auto& s : rep.singularities)
        std::cout << "  chart " << s.chart << " eig_X=(" << s.eigenvalues_x[0] << ", "
                  << s.eigenvalues_x[1] << ") rho=" << s.rho_at_s
                  << (s.is_hyperbolic ? " hyperbolic" : " NOT-hyperbolic")
                  << (s.is_source_for_w ? " source" : " NOT-source") << "\n";
    if (!json_path.empty()) write_file_atomic(json_path, j.dump(2));
    return rep.holds ? kExitOk : kExitViolation;
}

int run_sweep(int degree, double p_min, double p_max, int steps, long long samples, int seeds,
              int threads, unsigned long long rng_seed, const std::string& csv_path) {
    jou::pnorm::SweepOptions opts;
    opts.samples = samples;
    opts.seeds = seeds;
    opts.threads = threads;
    opts.rng_seed = rng_seed;
    auto rows = jou::pnorm::sweep(degree, p_min, p_max, steps, opts);
    bool unreliable = false;
    for (const auto& r : rows) {
        std::printf("d=%d p=%.4f max R_p=%.6f (sampled lower bound) converged=%.1f%%\n", r.d,
                    r.p_exp, r.max_ratio, 100.0 * r.converged_fraction);
        if (r.converged_fraction < 0.5) unreliable = true;
    }
    if (unreliable) std::cout << "warning: converged fraction below 0.5; results unreliable\n";
    if (!csv_path.empty()) write_file_atomic(csv_path, jou::pnorm::sweep_csv(rows));
    return kExitOk;
}

int run_render(int degree, int sing_index, double radius, const std::string& slice_spec,
               const std::string& resolution, double budget, int threads,
               const std::string& out_path, const std::string& trace_point,
               const std::string& trace_csv) {
    jou::render::SliceSpec slice;
    if (slice_spec.rfind("meridian", 0) == 0) {
        slice.mode = jou::render::SliceMode::MERIDIAN_SPHERE;
        if (auto pos = slice_spec.find("phase="); pos != std::string::npos)
            slice.phase = std::stod(slice_spec.substr(pos + 6));
    } else if (slice_spec.rfind("torus", 0) == 0) {
        slice.mode = jou::render::SliceMode::HOPF_TORUS;
        if (auto pos = slice_spec.find("eta="); pos != std::string::npos)
            slice.eta = std::stod(slice_spec.substr(pos + 4));
    } else {
        throw CLI::ValidationError("--slice expects meridian[:phase=..] or torus[:eta=..]");
    }
    if (std::sscanf(resolution.c_str(), "%dx%d", &slice.width, &slice.height) != 2)
        throw CLI::ValidationError("--resolution expects WxH");

    auto field = jou::jouanolou_field(degree);

    if (!trace_point.empty()) {
        auto sings = jou::find_singularities(field);
        jou::IntegrationControls ctl;
        ctl.t_max = budget;
        ctl.record_samples = true;
        auto res = jou::integrate_w(field, jou::ProjPoint(parse_complex3(trace_point)), ctl, sings);
        if (!trace_csv.empty()) write_file_atomic(trace_csv, jou::trajectory_csv(res));
    }

    jou::render::RenderOptions opts;
    opts.budget = budget;
    opts.threads = threads;
    auto img = jou::render::render_slice(field, sing_index, radius, slice, opts);
    write_file_atomic(out_path, jou::render::image_to_ppm(img));
    std::string meta = out_path + ".json";
    write_file_atomic(meta, jou::render::image_metadata_json(img));
    std::printf("rendered %dx%d: julia fraction %.4f, %lld failed pixels -> %s\n", img.width,
                img.height, img.julia_fraction(), img.failed_pixels, out_path.c_str());
    return img.failed_pixels == 0 ? kExitOk : kExitNumeric;
}

int run_symmetry_check(int samples, const std::string& json_path) {
    auto field = jou::jouanolou_field(2);
    auto weights = jou::symm::find_t_weights(field);
    int conj_exp = jou::symm::conjugation_exponent(field);
    auto elems = jou::symm::group_elements(field);

    bool closed = true;
    for (const auto& a : elems) {
        for (const auto& b : elems) {
            auto ab = jou::symm::compose(a, b);
            bool found = false;
            for (const auto& e : elems)
                if (jou::symm::same_projective(ab.matrix, e.matrix)) {
                    found = true;
                    break;
                }
            closed = closed && found;
        }
    }

    auto s = jou::symm::generator_s();
    auto t = jou::symm::generator_t(weights);
    auto rep_s = jou::symm::check_invariance(field, s, samples);
    auto rep_t = jou::symm::check_invariance(field, t, samples);

    auto monos = jou::symm::invariant_quartic_monomials();
    nlohmann::json jm = nlohmann::json::array();
    for (const auto& m : monos) jm.push_back({m[0], m[1], m[2]});

    bool ok = closed && rep_s.b_invariant && rep_s.w_equivariant && rep_t.b_invariant &&
              rep_t.w_equivariant && elems.size() == 21;
    nlohmann::json j{{"t_weights", {weights[0], weights[1], weights[2]}},
                     {"conjugation_exponent", conj_exp},
                     {"group_order", elems.size()},
                     {"group_closed", closed},
                     {"s_b_invariant", rep_s.b_invariant},
                     {"s_w_equivariant", rep_s.w_equivariant},
                     {"t_b_invariant", rep_t.b_invariant},
                     {"t_w_equivariant", rep_t.w_equivariant},
                     {"invariant_quartic_monomials", jm},
                     {"holds", ok}};
    std::cout << "Aut(J_2): order " << elems.size() << ", t weights (" << weights[0] << ","
              << weights[1] << "," << weights[2] << "), s t s^-1 = t^" << conj_exp
              << ", closed=" << (closed ? "yes" : "no") << "\n"
              << "invariance: s(B " << (rep_s.b_invariant ? "ok" : "FAIL") << ", W "
              << (rep_s.w_equivariant ? "ok" : "FAIL") << ") t(B "
              << (rep_t.b_invariant ? "ok" : "FAIL") << ", W "
              << (rep_t.w_equivariant ? "ok" : "FAIL") << ")\n";
    if (!json_path.empty()) write_file_atomic(json_path, j.dump(2));
    return ok ? kExitOk : kExitViolation;
}

int run_merge(const std::vector<std::string>& inputs, const std::string& json_path) {
    std::vector<jou::gate::VerificationReport> parts;
    parts.reserve(inputs.size());
    for (const auto& path : inputs)
        parts.push_back(jou::gate::report_from_json(read_file(path)));
    auto rep = jou::gate::merge_reports(parts);
    print_report_summary(rep, std::cout);
    if (!json_path.empty()) write_file_atomic(json_path, jou::gate::report_to_json(rep));
    return rep.holds ? kExitOk : kExitViolation;
}

int run_report(const std::string& input) {
    auto rep = jou::gate::report_from_json(read_file(input));
    print_report_summary(rep, std::cout);
    return rep.holds ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jouanolou foliation toolkit: certified C_N gate, P_S check, l^p sweeps, "
                 "Julia-slice rendering, symmetry checks"};
    app.require_subcommand(1);

    // verify-pb
    long long pb_n = 145;
    int pb_threads = 0;
    std::string pb_json, pb_chunk;
    auto* pb = app.add_subcommand("verify-pb", "Exact exhaustive check of condition C_N");
    pb->add_option("--n", pb_n, "Lattice size N")->required()->check(CLI::PositiveNumber);
    pb->add_option("--threads", pb_threads, "Worker threads (default: hardware)");
    pb->add_option("--json", pb_json, "Write the JSON report here");
    pb->add_option("--chunk", pb_chunk, "Row slice i/n for distributed runs");

    // verify-ps
    int ps_degree = 2;
    std::string ps_json;
    auto* ps = app.add_subcommand("verify-ps", "Singularity analysis and property P_S");
    ps->add_option("--degree", ps_degree, "Jouanolou degree")->required()->check(CLI::Range(1, 9));
    ps->add_option("--json", ps_json, "Write the JSON report here");

    // sweep-rp
    int sw_degree = 2, sw_steps = 10, sw_seeds = 8, sw_threads = 0;
    long long sw_samples = 10000;
    double sw_pmin = 2.0, sw_pmax = 6.0;
    unsigned long long sw_seed = 20240901;
    std::string sw_csv;
    auto* sw = app.add_subcommand("sweep-rp", "Max of R_p over B_p across an l^p grid");
    sw->add_option("--degree", sw_degree)->required()->check(CLI::Range(1, 9));
    sw->add_option("--p-min", sw_pmin)->check(CLI::Range(2.0, 64.0));
    sw->add_option("--p-max", sw_pmax)->check(CLI::Range(2.0, 64.0));
    sw->add_option("--steps", sw_steps)->check(CLI::PositiveNumber);
    sw->add_option("--samples", sw_samples)->check(CLI::PositiveNumber);
    sw->add_option("--seeds", sw_seeds)->check(CLI::PositiveNumber);
    sw->add_option("--threads", sw_threads);
    sw->add_option("--rng-seed", sw_seed);
    sw->add_option("--csv", sw_csv, "Write CSV rows here");

    // render-julia
    int rj_degree = 2, rj_sing = 0, rj_threads = 0;
    double rj_radius = 0.3, rj_budget = 200.0;
    std::string rj_slice = "meridian:phase=0", rj_res = "512x512", rj_out = "julia.ppm";
    std::string rj_trace_point, rj_trace_csv;
    auto* rj = app.add_subcommand("render-julia", "Escape-time slice of the Julia set");
    rj->add_option("--degree", rj_degree)->required()->check(CLI::Range(1, 9));
    rj->add_option("--singularity", rj_sing)->check(CLI::NonNegativeNumber);
    rj->add_option("--radius", rj_radius)->check(CLI::PositiveNumber);
    rj->add_option("--slice", rj_slice, "meridian[:phase=..] | torus[:eta=..]");
    rj->add_option("--resolution", rj_res, "WxH");
    rj->add_option("--budget", rj_budget)->check(CLI::PositiveNumber);
    rj->add_option("--threads", rj_threads);
    rj->add_option("--out", rj_out)->required();
    rj->add_option("--trace-point", rj_trace_point,
                   "x_re,x_im,y_re,y_im,z_re,z_im seed for a CSV trajectory dump");
    rj->add_option("--trace-csv", rj_trace_csv, "Trajectory CSV path");

    // symmetry-check
    int sy_samples = 200;
    std::string sy_json;
    auto* sy = app.add_subcommand("symmetry-check", "Aut(J_2) generators, closure, invariance");
    sy->add_option("--samples", sy_samples)->check(CLI::PositiveNumber);
    sy->add_option("--json", sy_json, "Write the JSON report here");

    // merge-reports
    std::vector<std::string> mg_inputs;
    std::string mg_json;
    auto* mg = app.add_subcommand("merge-reports", "Merge chunked verify-pb reports");
    mg->add_option("--in", mg_inputs, "Chunk report JSON files")->required()->expected(-1);
    mg->add_option("--json", mg_json, "Write the merged JSON report here");

    // report
    std::string rp_input;
    auto* rp = app.add_subcommand("report", "Pretty-print a verification report");
    rp->add_option("--in", rp_input, "Report JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (pb->parsed()) return run_verify_pb(pb_n, pb_threads, pb_json, pb_chunk);
        if (ps->parsed()) return run_verify_ps(ps_degree, ps_json);
        if (sw->parsed())
            return run_sweep(sw_degree, sw_pmin, sw_pmax, sw_steps, sw_samples, sw_seeds,
                             sw_threads, sw_seed, sw_csv);
        if (rj->parsed())
            return run_render(rj_degree, rj_sing, rj_radius, rj_slice, rj_res, rj_budget,
                              rj_threads, rj_out, rj_trace_point, rj_trace_csv);
        if (sy->parsed()) return run_symmetry_check(sy_samples, sy_json);
        if (mg->parsed()) return run_merge(mg_inputs, mg_json);
        if (rp->parsed()) return run_report(rp_input);
    } catch (const jou::OverflowError& e) {
        std::cerr << "numeric failure (overflow): " << e.what() << "\n";
        return kExitNumeric;
    } catch (const jou::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << " at t=" << e.t_at_failure << "\n";
        return kExitNumeric;
    } catch (const jou::SingularSolveError& e) {
        std::cerr << "numeric failure: " << e.what() << " (residual " << e.residual << ")\n";
        return kExitNumeric;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
