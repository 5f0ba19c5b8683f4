#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jouanolou/checked_int.hpp"

namespace jou::gate {

/// Gaussian integer with exact signed components.
struct GaussianInt {
    long long re = 0;
    long long im = 0;
    bool operator==(const GaussianInt&) const = default;
};

/// Lattice pair (U, V) of the C_N verification.
struct GaussianPair {
    GaussianInt u, v;
    bool operator==(const GaussianPair&) const = default;
};

/// rho_N = 1 + 1/N; bound C_F(N) <= 3 sqrt(2) rho_N^2.
double cf_bound(long long n);

/// Safe bound C_G(N) <= 6 rho_N^2 (1 + 3 rho_N^4), decreasing to 24.
double cg_bound(long long n);

/// Smallest N with 1/(sqrt(10) N) <= 1/2 - cg_bound(N)/N.
long long min_valid_n();

/// Membership in E_N: |U|^2 <= (N+1)^2, |V|^2 <= (N+1)^2 and
/// |U conj(V)^2 + N^2 V + N conj(U)^2|^2 <= 18 (N+1)^4, all exactly.
bool e_n_member(long long n, const GaussianPair& q);

/// iota = 10 N^2 |N conj(U) V + conj(V) U^2 + U V^2|^2.
i128 iota(long long n, const GaussianPair& q);

/// kappa = (|U|^4 + |V|^4 + N^4)^2.
i128 kappa(long long n, const GaussianPair& q);

struct Counterexample {
    GaussianPair q;
    i128 iota_val = 0;
    i128 kappa_val = 0;
};

struct VerificationReport {
    long long n = 0;
    long long member_count = 0;
    i128 max_iota = 0;
    i128 max_kappa = 0;
    i128 min_gap = 0;  // min over E_N of kappa - iota
    double max_ratio = 0.0;
    GaussianPair ratio_argmax;
    i128 ratio_argmax_iota = 0;
    i128 ratio_argmax_kappa = 0;
    bool holds = false;
    bool certifying = false;  // n >= min_valid_n()
    std::vector<Counterexample> counterexamples;
    double elapsed_seconds = 0.0;
    int worker_count = 1;
    // Chunked runs: this report covers chunk_index of chunk_total U-rows.
    int chunk_index = 0;
    int chunk_total = 1;
    bool complete = true;
};

/// Exhaustive exact check of C_N over the bidisc |U|,|V| <= N+1.
/// Deterministic output independent of worker count and chunk order.
/// chunk = {i, n} restricts to every n-th U-row starting at i.
VerificationReport verify_cn(long long n, int worker_count,
                             std::optional<std::pair<int, int>> chunk = std::nullopt,
                             int max_counterexamples = 16);

/// Merge chunk reports covering 0..total-1 exactly once into a full report.
VerificationReport merge_reports(const std::vector<VerificationReport>& parts);

std::string report_to_json(const VerificationReport& r);
VerificationReport report_from_json(const std::string& text);

}  // namespace jou::gate
