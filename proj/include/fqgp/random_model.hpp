#pragma once

// p-random subsets of F_q^d and lower bounds on their largest general-position
// subset: the deletion method, survivors on the moment curve, and search.
// The sweep reuses one uniform per point for every p, so for a fixed trial
// the samples are nested in p.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "general_position.hpp"

namespace fqgp {

/// Each point of F_q^d (in id order) kept when its uniform falls below p.
inline PointSet sample_p_random(std::uint32_t q, int d, double p, Rng& rng) {
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("sample_p_random: p must lie in [0, 1]");
    AffineSpace sp(q, d);
    std::vector<PointId> ids;
    for (PointId x = 0; x < sp.size(); ++x)
        if (rng.uniform() < p) ids.push_back(x);
    return PointSet(q, d, std::move(ids));
}

struct DeletionResult {
    std::size_t bound = 0;
    PointSet witness;
};

/// Runs through the degenerate (d+1)-subsets in lexicographic order and
/// deletes the last point of each one that is still fully present.
///
/// For a live prefix (a, b, c) every later d in span{a, b, c} is deleted in
/// turn, so the whole block is handled by one scan of that flat.
inline DeletionResult deletion_bound(const PointSet& u) {
    const int d = u.d();
    const std::size_t n = u.size();
    std::vector<std::uint8_t> alive(n, 1);
    const Incidence& inc = incidence(u.q(), d);
    const AffineSpace& sp = u.space();

    auto kill_after = [&](const std::vector<PointId>& flat_pts, std::uint32_t last) {
        for (PointId x : flat_pts) {
            const std::int32_t i = u.index_of(x);
            if (i > static_cast<std::int32_t>(last)) alive[i] = 0;
        }
    };

    if (d == 2) {
        for (std::uint32_t a = 0; a < n; ++a) {
            if (!alive[a]) continue;
            for (std::uint32_t b = a + 1; b < n; ++b) {
                if (!alive[b]) continue;
                const std::uint32_t l = inc.line_id(u.id(a), u.id(b));
                kill_after(points_of(sp, inc.line_flat(l)), b);
            }
        }
    } else {
        const auto& planes = inc.hyperplane_points();
        for (std::uint32_t a = 0; a < n; ++a) {
            if (!alive[a]) continue;
            for (std::uint32_t b = a + 1; b < n; ++b) {
                if (!alive[b]) continue;
                for (std::uint32_t c = b + 1; c < n; ++c) {
                    if (!alive[c]) continue;
                    const PointId x = u.id(a), y = u.id(b), z = u.id(c);
                    if (inc.collinear(x, y, z)) {
                        // Every later point completes a degenerate 4-set.
                        std::fill(alive.begin() + c + 1, alive.end(), 0);
                        break;
                    }
                    kill_after(planes[inc.plane_through(x, y, z)], c);
                }
            }
        }
    }
    std::vector<PointId> keep;
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) keep.push_back(u.id(i));
    DeletionResult r{keep.size(), PointSet(u.q(), d, std::move(keep))};
    return r;
}

/// Survivors of the p-random sample on the moment curve; always in general position.
inline std::size_t survival_lower_bound(std::uint32_t q, int d, double p, Rng& rng) {
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("survival_lower_bound: p must lie in [0, 1]");
    const std::size_t m = moment_curve(q, d).size();
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) k += rng.uniform() < p;
    return k;
}

// ---------------------------------------------------------------------------

struct SweepRecord {
    std::uint32_t q = 0;
    int d = 3;
    double p = 0;
    int trial = 0;  // -1 for per-p summary rows
    std::uint64_t seed = 0;
    double sample_size = 0;
    double alpha_lower = 0;
    double alpha_deletion = 0;
    int exact = 0;  // summary rows: number of trials solved exactly
    double elapsed_ms = 0;
};

enum class AlphaMethod { ExactThenHeuristic, HeuristicOnly };

struct AlphaOptions {
    AlphaMethod method = AlphaMethod::ExactThenHeuristic;
    std::size_t exact_max_points = 60;  // exact search only up to this |U_p|
    std::uint64_t node_limit = 200'000;
    int rounds = 20;
    bool timing = false;  // wall time breaks byte-identical output, so it is opt-in
};

/// One trial: sample with the trial's stream, then bound α(U_p) from below.
inline SweepRecord alpha_trial(std::uint32_t q, int d, double p, int trial, std::uint64_t master, const AlphaOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepRecord r;
    r.q = q;
    r.d = d;
    r.p = p;
    r.trial = trial;
    r.seed = derive_seed(master, {static_cast<std::uint64_t>(trial)});
    Rng rng(r.seed);
    const PointSet u = sample_p_random(q, d, p, rng);
    r.sample_size = static_cast<double>(u.size());
    const DeletionResult del = deletion_bound(u);
    r.alpha_deletion = static_cast<double>(del.bound);
    std::size_t best = del.bound;
    bool exact = false;
    if (opt.method == AlphaMethod::ExactThenHeuristic && u.size() <= opt.exact_max_points) {
        const SearchResult s = max_general_position_exact(u, ExactBudget{opt.node_limit});
        best = std::max(best, s.size);
        exact = s.optimal;
    }
    if (!exact) {
        const HeuristicResult h = max_general_position_heuristic(u, derive_seed(r.seed, {1}), opt.rounds, del.witness.ids());
        best = std::max(best, h.size);
    }
    r.alpha_lower = static_cast<double>(best);
    r.exact = exact;
    if (!(r.alpha_deletion <= r.alpha_lower && r.alpha_lower <= r.sample_size))
        throw std::logic_error("alpha bounds out of order");
    if (opt.timing) r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline std::vector<SweepRecord> estimate_alpha(std::uint32_t q, int d, double p, int trials, std::uint64_t master,
                                               const AlphaOptions& opt = {}) {
    std::vector<SweepRecord> out;
    for (int t = 0; t < trials; ++t) out.push_back(alpha_trial(q, d, p, t, master, opt));
    return out;
}

/// steps log-spaced points from p_min to p_max (inclusive).
inline std::vector<double> log_grid(double p_min, double p_max, int steps) {
    if (steps < 1) throw std::invalid_argument("p grid: need at least one step");
    if (!(p_min > 0 && p_min <= p_max && p_max <= 1)) throw std::invalid_argument("p grid: need 0 < p_min <= p_max <= 1");
    std::vector<double> g;
    for (int i = 0; i < steps; ++i)
        g.push_back(steps == 1 ? p_max : p_min * std::pow(p_max / p_min, static_cast<double>(i) / (steps - 1)));
    g.back() = p_max;
    return g;
}

inline std::vector<double> default_grid(std::uint32_t q, int d) { return log_grid(std::pow(static_cast<double>(q), -d) / 10, 1.0, 40); }

inline double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
}

/// Records for every (p, trial) in grid order, then one summary row per p
/// carrying the medians. Output does not depend on `jobs`.
inline std::vector<SweepRecord> sweep_phase_diagram(std::uint32_t q, int d, const std::vector<double>& grid, int trials,
                                                    std::uint64_t master, const AlphaOptions& opt = {}, int jobs = 1) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty p grid");
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("sweep: p grid must be ascending");
    if (trials < 1) throw std::invalid_argument("sweep: need at least one trial");
    const std::size_t total = grid.size() * static_cast<std::size_t>(trials);
    std::vector<SweepRecord> recs(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i; !failed && (i = next.fetch_add(1)) < total;) {
            try {
                recs[i] = alpha_trial(q, d, grid[i / trials], static_cast<int>(i % trials), master, opt);
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
            }
        }
    };
    if (jobs <= 1) {
        work();
    } else {
        std::vector<std::thread> ts;
        for (int j = 0; j < jobs; ++j) ts.emplace_back(work);
        for (auto& t : ts) t.join();
    }
    if (err) std::rethrow_exception(err);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        SweepRecord s;
        s.q = q;
        s.d = d;
        s.p = grid[g];
        s.trial = -1;
        s.seed = master;
        std::vector<double> sz, al, de;
        for (int t = 0; t < trials; ++t) {
            const SweepRecord& r = recs[g * trials + t];
            sz.push_back(r.sample_size);
            al.push_back(r.alpha_lower);
            de.push_back(r.alpha_deletion);
            s.exact += r.exact;
            s.elapsed_ms += r.elapsed_ms;
        }
        s.sample_size = median(sz);
        s.alpha_lower = median(al);
        s.alpha_deletion = median(de);
        recs.push_back(s);
    }
    return recs;
}

inline constexpr const char* kSweepHeader = "q,d,p,trial,seed,sample_size,alpha_lower,alpha_deletion,exact,elapsed_ms";

inline std::string format_record(const SweepRecord& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%u,%d,%.10g,%d,%llu,%.10g,%.10g,%.10g,%d,%.3f", r.q, r.d, r.p, r.trial,
                  static_cast<unsigned long long>(r.seed), r.sample_size, r.alpha_lower, r.alpha_deletion, r.exact, r.elapsed_ms);
    return buf;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& recs) {
    os << kSweepHeader << '\n';
    for (const SweepRecord& r : recs) os << format_record(r) << '\n';
}

}  // namespace fqgp
