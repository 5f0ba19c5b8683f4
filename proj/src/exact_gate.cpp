#include "jouanolou/exact_gate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>

#include "json.hpp"

#include "jouanolou/parallel.hpp"

namespace jou::gate {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt10 = 3.1622776601683795;

long long isqrt_ll(long long v) {
    if (v < 0) return -1;
    long long r = static_cast<long long>(std::sqrt(static_cast<double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

/// Proves the i64 membership-filter path cannot overflow at this N:
/// every component of S = U conj(V)^2 + N^2 V + N conj(U)^2 over the
/// enumeration bidisc is bounded by 3(N+1)^3, so |S|^2 <= 18(N+1)^6 must be
/// representable. Throws OverflowError otherwise.
void require_filter_domain(long long n) {
    long long m = checked_mul_ll(3, checked_mul_ll(n + 1, checked_mul_ll(n + 1, n + 1)));
    (void)checked_mul_ll(2, checked_mul_ll(m, m));
}

struct RatioBest {
    bool set = false;
    i128 iota_val = 0;
    i128 kappa_val = 1;
    GaussianPair q;
};

/// Exact ratio comparison iota_a/kappa_a vs iota_b/kappa_b by u128
/// cross-multiplication; ties broken lexicographically on the pair so every
/// reduction order yields the same argmax.
bool ratio_improves(const RatioBest& best, i128 io, i128 ka, const GaussianPair& q) {
    if (!best.set) return true;
    u128 lhs = checked_umul(u128(io), u128(best.kappa_val));
    u128 rhs = checked_umul(u128(best.iota_val), u128(ka));
    if (lhs != rhs) return lhs > rhs;
    auto key = [](const GaussianPair& p) {
        return std::array<long long, 4>{p.u.re, p.u.im, p.v.re, p.v.im};
    };
    return key(q) < key(best.q);
}

struct RowStats {
    long long members = 0;
    i128 max_iota = 0;
    i128 max_kappa = 0;
    bool gap_set = false;
    i128 min_gap = 0;
    RatioBest best;
    long long violations = 0;
    std::vector<Counterexample> counterexamples;
};

void merge_row(RowStats& acc, const RowStats& row, int cap) {
    if (row.members == 0) return;
    if (acc.members == 0) {
        acc = row;
        if ((int)acc.counterexamples.size() > cap) acc.counterexamples.resize(cap);
        return;
    }
    acc.members += row.members;
    acc.max_iota = std::max(acc.max_iota, row.max_iota);
    acc.max_kappa = std::max(acc.max_kappa, row.max_kappa);
    if (row.gap_set && (!acc.gap_set || row.min_gap < acc.min_gap)) {
        acc.min_gap = row.min_gap;
        acc.gap_set = true;
    }
    if (row.best.set &&
        ratio_improves(acc.best, row.best.iota_val, row.best.kappa_val, row.best.q))
        acc.best = row.best;
    acc.violations += row.violations;
    for (const auto& ce : row.counterexamples) {
        if ((int)acc.counterexamples.size() >= cap) break;
        acc.counterexamples.push_back(ce);
    }
}

}  // namespace

double cf_bound(long long n) {
    if (n < 1) throw std::invalid_argument("cf_bound: N >= 1");
    double rho = 1.0 + 1.0 / double(n);
    return 3.0 * kSqrt2 * rho * rho;
}

double cg_bound(long long n) {
    if (n < 1) throw std::invalid_argument("cg_bound: N >= 1");
    double rho = 1.0 + 1.0 / double(n);
    double rho2 = rho * rho;
    return 6.0 * rho2 * (1.0 + 3.0 * rho2 * rho2);
}

long long min_valid_n() {
    for (long long n = 1;; ++n) {
        if (1.0 / (kSqrt10 * double(n)) <= 0.5 - cg_bound(n) / double(n)) return n;
    }
}

bool e_n_member(long long n, const GaussianPair& q) {
    if (n < 1) throw std::invalid_argument("e_n_member: N >= 1");
    require_filter_domain(n);
    long long r2 = (n + 1) * (n + 1);
    long long nu2 = q.u.re * q.u.re + q.u.im * q.u.im;
    long long nv2 = q.v.re * q.v.re + q.v.im * q.v.im;
    if (nu2 > r2 || nv2 > r2) return false;
    long long cv2re = q.v.re * q.v.re - q.v.im * q.v.im;
    long long cv2im = -2 * q.v.re * q.v.im;
    long long cu2re = q.u.re * q.u.re - q.u.im * q.u.im;
    long long cu2im = -2 * q.u.re * q.u.im;
    long long sre = q.u.re * cv2re - q.u.im * cv2im + n * n * q.v.re + n * cu2re;
    long long sim = q.u.re * cv2im + q.u.im * cv2re + n * n * q.v.im + n * cu2im;
    i128 s2 = i128(sre) * sre + i128(sim) * sim;
    i128 bound = i128(18) * r2 * r2;
    return s2 <= bound;
}

i128 iota(long long n, const GaussianPair& q) {
    // T = N conj(U) V + conj(V) U^2 + U V^2, with checked 128-bit squares:
    // the 2^62 headroom is only known a posteriori on E_N.
    i128 ure = q.u.re, uim = q.u.im, vre = q.v.re, vim = q.v.im;
    i128 t1re = checked_mul(n, checked_add(checked_mul(ure, vre), checked_mul(uim, vim)));
    i128 t1im = checked_mul(n, checked_sub(checked_mul(ure, vim), checked_mul(uim, vre)));
    i128 u2re = checked_sub(checked_mul(ure, ure), checked_mul(uim, uim));
    i128 u2im = checked_mul(2, checked_mul(ure, uim));
    i128 t2re = checked_add(checked_mul(vre, u2re), checked_mul(vim, u2im));
    i128 t2im = checked_sub(checked_mul(vre, u2im), checked_mul(vim, u2re));
    i128 v2re = checked_sub(checked_mul(vre, vre), checked_mul(vim, vim));
    i128 v2im = checked_mul(2, checked_mul(vre, vim));
    i128 t3re = checked_sub(checked_mul(ure, v2re), checked_mul(uim, v2im));
    i128 t3im = checked_add(checked_mul(ure, v2im), checked_mul(uim, v2re));
    i128 tre = checked_add(checked_add(t1re, t2re), t3re);
    i128 tim = checked_add(checked_add(t1im, t2im), t3im);
    i128 t2 = checked_add(checked_mul(tre, tre), checked_mul(tim, tim));
    return checked_mul(checked_mul(10, checked_mul(i128(n), i128(n))), t2);
}

i128 kappa(long long n, const GaussianPair& q) {
    i128 nu2 = i128(q.u.re) * q.u.re + i128(q.u.im) * q.u.im;
    i128 nv2 = i128(q.v.re) * q.v.re + i128(q.v.im) * q.v.im;
    i128 n2 = checked_mul(i128(n), i128(n));
    i128 sum = checked_add(checked_add(checked_mul(nu2, nu2), checked_mul(nv2, nv2)),
                           checked_mul(n2, n2));
    return checked_mul(sum, sum);
}

VerificationReport verify_cn(long long n, int worker_count,
                             std::optional<std::pair<int, int>> chunk, int max_counterexamples) {
    if (n < 1) throw std::invalid_argument("verify_cn: N >= 1");
    require_filter_domain(n);
    auto t_start = std::chrono::steady_clock::now();

    const long long lim = n + 1;
    const long long r2 = lim * lim;
    const i128 s_bound = i128(18) * r2 * r2;
    const long long n2 = n * n;

    // Precompute b-extent of the disc per |coordinate|.
    std::vector<long long> bmax(lim + 1);
    for (long long a = 0; a <= lim; ++a) bmax[a] = isqrt_ll(r2 - a * a);

    // One work item per U-row (fixed re(U)).
    std::vector<long long> rows;
    int chunk_index = 0, chunk_total = 1;
    if (chunk) {
        chunk_index = chunk->first;
        chunk_total = chunk->second;
        if (chunk_total < 1 || chunk_index < 0 || chunk_index >= chunk_total)
            throw std::invalid_argument("verify_cn: bad chunk spec");
    }
    for (long long au = -lim; au <= lim; ++au) {
        long long row_id = au + lim;
        if (row_id % chunk_total == chunk_index) rows.push_back(au);
    }

    std::vector<RowStats> row_stats(rows.size());
    unsigned threads = resolve_thread_count(worker_count);

    parallel_for_indexed(rows.size(), threads, [&](std::size_t ri) {
        const long long au = rows[ri];
        RowStats st;
        for (long long bu = -bmax[std::llabs(au)]; bu <= bmax[std::llabs(au)]; ++bu) {
            const long long cu2re = au * au - bu * bu;
            const long long cu2im = -2 * au * bu;
            const long long wre = n * cu2re;  // N conj(U)^2
            const long long wim = n * cu2im;
            for (long long av = -lim; av <= lim; ++av) {
                const long long bv_ext = bmax[std::llabs(av)];
                for (long long bv = -bv_ext; bv <= bv_ext; ++bv) {
                    // S = U conj(V)^2 + N^2 V + N conj(U)^2 in plain i64:
                    // components bounded by 3(N+1)^3 (checked at entry).
                    const long long cv2re = av * av - bv * bv;
                    const long long cv2im = -2 * av * bv;
                    const long long sre = au * cv2re - bu * cv2im + n2 * av + wre;
                    const long long sim = au * cv2im + bu * cv2re + n2 * bv + wim;
                    const i128 s2 = i128(sre) * sre + i128(sim) * sim;
                    if (s2 > s_bound) continue;

                    GaussianPair q{{au, bu}, {av, bv}};
                    i128 io = iota(n, q);
                    i128 ka = kappa(n, q);
                    ++st.members;
                    if (io > st.max_iota) st.max_iota = io;
                    if (ka > st.max_kappa) st.max_kappa = ka;
                    i128 gap = checked_sub(ka, io);
                    if (!st.gap_set || gap < st.min_gap) {
                        st.min_gap = gap;
                        st.gap_set = true;
                    }
                    if (ratio_improves(st.best, io, ka, q)) {
                        st.best.set = true;
                        st.best.iota_val = io;
                        st.best.kappa_val = ka;
                        st.best.q = q;
                    }
                    if (io >= ka) {
                        ++st.violations;
                        if ((int)st.counterexamples.size() < max_counterexamples)
                            st.counterexamples.push_back({q, io, ka});
                    }
                }
            }
        }
        row_stats[ri] = std::move(st);
    });

    RowStats total;
    for (const auto& st : row_stats) merge_row(total, st, max_counterexamples);

    VerificationReport rep;
    rep.n = n;
    rep.member_count = total.members;
    rep.max_iota = total.max_iota;
    rep.max_kappa = total.max_kappa;
    rep.min_gap = total.gap_set ? total.min_gap : 0;
    rep.holds = total.violations == 0;
    rep.certifying = n >= min_valid_n() && chunk_total == 1;
    rep.counterexamples = total.counterexamples;
    if (total.best.set) {
        rep.ratio_argmax = total.best.q;
        rep.ratio_argmax_iota = total.best.iota_val;
        rep.ratio_argmax_kappa = total.best.kappa_val;
        rep.max_ratio = double((long double)(total.best.iota_val) /
                               (long double)(total.best.kappa_val));
    }
    rep.worker_count = (int)threads;
    rep.chunk_index = chunk_index;
    rep.chunk_total = chunk_total;
    rep.complete = chunk_total == 1;
    rep.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

VerificationReport merge_reports(const std::vector<VerificationReport>& parts) {
    if (parts.empty()) throw std::invalid_argument("merge_reports: no parts");
    int total = parts[0].chunk_total;
    long long n = parts[0].n;
    std::vector<bool> seen(total, false);
    for (const auto& p : parts) {
        if (p.n != n || p.chunk_total != total)
            throw std::invalid_argument("merge_reports: inconsistent parts");
        if (p.chunk_index < 0 || p.chunk_index >= total || seen[p.chunk_index])
            throw std::invalid_argument("merge_reports: duplicate or bad chunk index");
        seen[p.chunk_index] = true;
    }
    if ((int)parts.size() != total)
        throw std::invalid_argument("merge_reports: chunks missing");

    VerificationReport rep;
    rep.n = n;
    rep.chunk_index = 0;
    rep.chunk_total = 1;
    rep.complete = true;
    rep.certifying = n >= min_valid_n();
    rep.holds = true;
    RatioBest best;
    bool gap_set = false;
    for (const auto& p : parts) {
        rep.member_count += p.member_count;
        rep.max_iota = std::max(rep.max_iota, p.max_iota);
        rep.max_kappa = std::max(rep.max_kappa, p.max_kappa);
        if (p.member_count > 0 && (!gap_set || p.min_gap < rep.min_gap)) {
            rep.min_gap = p.min_gap;
            gap_set = true;
        }
        rep.holds = rep.holds && p.holds;
        rep.elapsed_seconds += p.elapsed_seconds;
        rep.worker_count += p.worker_count;
        for (const auto& ce : p.counterexamples) rep.counterexamples.push_back(ce);
        if (p.member_count > 0 &&
            ratio_improves(best, p.ratio_argmax_iota, p.ratio_argmax_kappa, p.ratio_argmax)) {
            best.set = true;
            best.iota_val = p.ratio_argmax_iota;
            best.kappa_val = p.ratio_argmax_kappa;
            best.q = p.ratio_argmax;
        }
    }
    if (best.set) {
        rep.ratio_argmax = best.q;
        rep.ratio_argmax_iota = best.iota_val;
        rep.ratio_argmax_kappa = best.kappa_val;
        rep.max_ratio = double((long double)best.iota_val / (long double)best.kappa_val);
    }
    // Restore enumeration order across chunks so a merged report is
    // byte-identical to the unchunked run.
    std::sort(rep.counterexamples.begin(), rep.counterexamples.end(),
              [](const Counterexample& a, const Counterexample& b) {
                  auto key = [](const Counterexample& c) {
                      return std::array<long long, 4>{c.q.u.re, c.q.u.im, c.q.v.re, c.q.v.im};
                  };
                  return key(a) < key(b);
              });
    if (rep.counterexamples.size() > 16) rep.counterexamples.resize(16);
    return rep;
}

std::string report_to_json(const VerificationReport& r) {
    nlohmann::json ces = nlohmann::json::array();
    for (const auto& ce : r.counterexamples)
        ces.push_back({{"u", {ce.q.u.re, ce.q.u.im}},
                       {"v", {ce.q.v.re, ce.q.v.im}},
                       {"iota", i128_to_string(ce.iota_val)},
                       {"kappa", i128_to_string(ce.kappa_val)}});
    nlohmann::json j{
        {"n", r.n},
        {"member_count", r.member_count},
        {"max_iota", i128_to_string(r.max_iota)},
        {"max_kappa", i128_to_string(r.max_kappa)},
        {"min_gap", i128_to_string(r.min_gap)},
        {"max_ratio", r.max_ratio},
        {"ratio_argmax",
         {{"u", {r.ratio_argmax.u.re, r.ratio_argmax.u.im}},
          {"v", {r.ratio_argmax.v.re, r.ratio_argmax.v.im}},
          {"iota", i128_to_string(r.ratio_argmax_iota)},
          {"kappa", i128_to_string(r.ratio_argmax_kappa)}}},
        {"holds", r.holds},
        {"certifying", r.certifying},
        {"counterexamples", ces},
        {"elapsed_seconds", r.elapsed_seconds},
        {"worker_count", r.worker_count},
        {"chunk_index", r.chunk_index},
        {"chunk_total", r.chunk_total},
        {"complete", r.complete},
    };
    return j.dump(2);
}

VerificationReport report_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    VerificationReport r;
    r.n = j.at("n").get<long long>();
    r.member_count = j.at("member_count").get<long long>();
    r.max_iota = i128_from_string(j.at("max_iota").get<std::string>());
    r.max_kappa = i128_from_string(j.at("max_kappa").get<std::string>());
    r.min_gap = i128_from_string(j.at("min_gap").get<std::string>());
    r.max_ratio = j.at("max_ratio").get<double>();
    const auto& ra = j.at("ratio_argmax");
    r.ratio_argmax = {{ra.at("u")[0].get<long long>(), ra.at("u")[1].get<long long>()},
                      {ra.at("v")[0].get<long long>(), ra.at("v")[1].get<long long>()}};
    r.ratio_argmax_iota = i128_from_string(ra.at("iota").get<std::string>());
    r.ratio_argmax_kappa = i128_from_string(ra.at("kappa").get<std::string>());
    r.holds = j.at("holds").get<bool>();
    r.certifying = j.at("certifying").get<bool>();
    for (const auto& ce : j.at("counterexamples")) {
        Counterexample c;
        c.q = {{ce.at("u")[0].get<long long>(), ce.at("u")[1].get<long long>()},
               {ce.at("v")[0].get<long long>(), ce.at("v")[1].get<long long>()}};
        c.iota_val = i128_from_string(ce.at("iota").get<std::string>());
        c.kappa_val = i128_from_string(ce.at("kappa").get<std::string>());
        r.counterexamples.push_back(c);
    }
    r.elapsed_seconds = j.at("elapsed_seconds").get<double>();
    r.worker_count = j.at("worker_count").get<int>();
    r.chunk_index = j.at("chunk_index").get<int>();
    r.chunk_total = j.at("chunk_total").get<int>();
    r.complete = j.at("complete").get<bool>();
    return r;
}

}  // namespace jou::gate
