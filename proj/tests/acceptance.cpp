// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Set FQGP_ACCEPT_LARGE=1 to include q = 11, 13 in the bounds ladder (hours
// on one core; see README).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fqgp/chernoff.hpp>
#include <fqgp/random_model.hpp>
#include <fqgp/supersaturation.hpp>

using namespace fqgp;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool ok, const std::string& detail, Clock::time_point t0) {
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%s %2d  %s  (%.1f s)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), s);
    std::fflush(stdout);
    failures += !ok;
}

std::int64_t det3(std::int64_t m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Coplanarity of four points of F_q^3 by the 3x3 determinant of differences.
bool coplanar(const AffineSpace& sp, PointId a, PointId b, PointId c, PointId e) {
    const std::int64_t q = sp.q();
    const Vec A = sp.coords(a);
    const PointId r[3] = {b, c, e};
    std::int64_t m[3][3];
    for (int i = 0; i < 3; ++i) {
        const Vec v = sp.coords(r[i]);
        for (int j = 0; j < 3; ++j) m[i][j] = (static_cast<std::int64_t>(v[j]) - A[j] + q) % q;
    }
    return det3(m) % q == 0;
}

// Collinearity by vanishing 2x2 minors of (b - a, c - a).
bool collinear(const AffineSpace& sp, PointId a, PointId b, PointId c) {
    const std::int64_t q = sp.q();
    const Vec A = sp.coords(a), B = sp.coords(b), C = sp.coords(c);
    std::int64_t u[3], v[3];
    for (int j = 0; j < 3; ++j) {
        u[j] = (static_cast<std::int64_t>(B[j]) - A[j] + q) % q;
        v[j] = (static_cast<std::int64_t>(C[j]) - A[j] + q) % q;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if ((u[i] * v[j] - u[j] * v[i]) % q != 0) return false;
    return true;
}

bool general_position_oracle(const PointSet& u) {
    const std::size_t n = u.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t e = c + 1; e < n; ++e)
                    if (coplanar(u.space(), u.id(a), u.id(b), u.id(c), u.id(e))) return false;
    return true;
}

PointSet random_subset(std::uint32_t q, double p, std::uint64_t seed) {
    Rng rng(seed);
    return sample_p_random(q, 3, p, rng);
}

// ---------------------------------------------------------------------------

void c1_moment_curve() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    for (std::uint32_t q : {5u, 7u, 11u, 13u}) {
        const PointSet c = moment_curve(q, 3);
        if (c.size() != q || !general_position_oracle(c)) {
            ok = false;
            bad += " q=" + std::to_string(q);
        }
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    ok = ok && s < 5;
    report(1, ok, "moment curve q in {5,7,11,13}: q points, no coplanar 4-set" + bad, t0);
}

constexpr std::size_t kAlphaF33 = 5;

void c2_exact_f33() {
    const auto t0 = Clock::now();
    const SearchResult r = max_general_position_exact(PointSet::full(3, 3), ExactBudget{50'000'000});
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool ok = r.optimal && r.size >= 3 && r.size <= 9 && r.size == kAlphaF33 && general_position_oracle(r.witness) && s < 60;
    report(2, ok, "alpha(F_3^3) = " + std::to_string(r.size) + (r.optimal ? " (optimal)" : " (budget hit)") + ", pinned " +
                      std::to_string(kAlphaF33),
           t0);
}

void c3_geometry() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (std::uint64_t q : {3u, 5u, 7u}) {
        AffineSpace sp(static_cast<std::uint32_t>(q), 3);
        const std::uint64_t lines = enumerate_flats(sp, 1).size(), planes = enumerate_flats(sp, 2).size();
        const bool good = lines == q * q * (q * q + q + 1) && planes == q * (q * q + q + 1);
        ok = ok && good;
        if (!good) detail += " counts q=" + std::to_string(q);
    }
    for (std::uint64_t q : {3u, 5u, 7u, 11u}) {
        AffineSpace sp(static_cast<std::uint32_t>(q), 3);
        Rng rng(q);
        for (int t = 0; t < 20; ++t) {
            PointId a, b, c;
            do {
                a = static_cast<PointId>(rng.below(sp.size()));
                b = static_cast<PointId>(rng.below(sp.size()));
                c = static_cast<PointId>(rng.below(sp.size()));
            } while (a == b || b == c || a == c || collinear(sp, a, b, c));
            const auto pts = punctured_flat(sp, {a, b, c});
            if (pts.size() != q * q - 3 * q + 3) {
                ok = false;
                detail += " punctured q=" + std::to_string(q);
                break;
            }
        }
    }
    report(3, ok, "flat counts q in {3,5,7}; punctured plane q^2-3q+3 for q in {3,5,7,11}" + detail, t0);
}

// Every edge coplanar; no edge of a non-dense build contains a collinear triple.
bool check_edges(const SupersatHypergraph& h, bool pure, std::string& why) {
    const PointSet& u = h.base();
    const AffineSpace& sp = u.space();
    for (const Quad& e : h.edges()) {
        const PointId x[4] = {u.id(e[0]), u.id(e[1]), u.id(e[2]), u.id(e[3])};
        if (!coplanar(sp, x[0], x[1], x[2], x[3])) {
            why = "non-coplanar edge";
            return false;
        }
        if (pure)
            for (int i = 0; i < 4; ++i)
                for (int j = i + 1; j < 4; ++j)
                    for (int k = j + 1; k < 4; ++k)
                        if (collinear(sp, x[i], x[j], x[k])) {
                            why = "collinear triple in edge";
                            return false;
                        }
    }
    return true;
}

void c4_membership() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string why;
    std::uint64_t edges = 0, forced = 0;
    std::map<std::string, int> cases;
    BuildOptions opt;
    opt.materialize = true;
    for (std::uint64_t s = 0; s < 50 && ok; ++s) {
        const std::uint32_t q = s % 4 < 2 ? 5 : 7;
        const PointSet u = s % 2 ? random_subset(q, 0.5, derive_seed(404, {s})) : PointSet::full(q, 3);
        ConstructionConstants k;
        k.retries = 1;
        const SupersatResult r = build_supersat(u, k, s, opt);
        ++cases[case_name(r.plan.kase)];
        edges += r.graph->size();
        ok = check_edges(*r.graph, r.plan.kase != Case::Dense, why);
        // A CASE21 build on the same U from a few seeded pairs.
        CasePlan plan;
        plan.kase = Case::Case21;
        plan.explicit_seeds = true;
        plan.threshold = 0;
        Rng rng(derive_seed(405, {s}));
        for (int i = 0; i < 3; ++i) {
            const auto a = static_cast<std::uint32_t>(rng.below(u.size()));
            auto b = static_cast<std::uint32_t>(rng.below(u.size() - 1));
            b += b >= a;
            plan.pairs.push_back({std::min(a, b), std::max(a, b)});
        }
        const SupersatHypergraph h21 = build_case21(u, plan, k, s);
        forced += h21.size();
        ok = ok && h21.size() > 0 && check_edges(h21, true, why);
    }
    std::string mix;
    for (const auto& [name, n] : cases) mix += " " + name + "x" + std::to_string(n);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    ok = ok && secs < 600;
    report(4, ok,
           "50 builds q in {5,7}, full/p=0.5: " + std::to_string(edges) + " edges coplanar, no collinear triple;" + mix +
               "; plus " + std::to_string(forced) + " CASE21 edges" + (why.empty() ? "" : " [" + why + "]"),
           t0);
}

void c5_ratios() {
    const auto t0 = Clock::now();
    const bool large = std::getenv("FQGP_ACCEPT_LARGE") != nullptr;
    std::vector<std::uint32_t> ladder = {5, 7};
    if (large) ladder.insert(ladder.end(), {11, 13});
    const ConstructionConstants k;
    bool ok = true;
    std::array<double, 4> lo, hi;
    lo.fill(1e300);
    hi.fill(0);
    std::string detail;
    for (std::uint32_t q : ladder) {
        const PointSet u = PointSet::full(q, 3);
        int pass = 0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            const SupersatResult r = build_supersat(u, k, derive_seed(500 + q, {s}));
            pass += r.report.pass;
            for (int i = 0; i < 4; ++i) {
                lo[i] = std::min(lo[i], r.report.rho[i]);
                hi[i] = std::max(hi[i], r.report.rho[i]);
            }
        }
        ok = ok && pass >= 18;
        detail += " q=" + std::to_string(q) + ":" + std::to_string(pass) + "/20";
    }
    char buf[160];
    double spread = 0;
    for (int i = 0; i < 4; ++i) spread = std::max(spread, hi[i] / lo[i]);
    ok = ok && spread <= 4;
    std::snprintf(buf, sizeof buf, "; max rho spread %.3f", spread);
    detail += buf;
    if (!large) {
        ok = false;
        detail += "; q=11,13 not run (measured 7.1e9 edges / 17.5 min per q=11 build, q=13 about 6x that; set FQGP_ACCEPT_LARGE=1)";
    }
    report(5, ok, "bounds on full F_q^3:" + detail, t0);
}

// Naive recount: count every i-subset of every edge, keep the first maximum.
DegreeMax naive_max(const SupersatHypergraph& h, int i) {
    std::map<std::array<std::uint32_t, 3>, std::uint64_t> cnt;
    for (const Quad& e : h.edges()) {
        for (int m = 0; m < 16; ++m) {
            if (__builtin_popcount(m) != i) continue;
            std::array<std::uint32_t, 3> s{};
            int t = 0;
            for (int j = 0; j < 4; ++j)
                if (m >> j & 1) s[t++] = e[j];
            ++cnt[s];
        }
    }
    DegreeMax best;
    for (const auto& [s, c] : cnt)
        if (c > best.value) best = {c, s};
    return best;
}

void c6_degree_profile() {
    const auto t0 = Clock::now();
    bool ok = true;
    for (std::uint64_t t = 0; t < 100 && ok; ++t) {
        Rng rng(derive_seed(600, {t}));
        const std::uint32_t n = 8 + static_cast<std::uint32_t>(rng.below(120));
        const std::size_t m = 1 + rng.below(10'000);
        std::vector<PointId> ids(n);
        for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
        std::vector<Quad> edges;
        for (std::size_t j = 0; j < m; ++j) {
            Quad e;
            do {
                for (auto& x : e) x = static_cast<std::uint32_t>(rng.below(n));
                std::sort(e.begin(), e.end());
            } while (e[0] == e[1] || e[1] == e[2] || e[2] == e[3]);
            edges.push_back(e);
        }
        const SupersatHypergraph h(PointSet(11, 3, ids), std::move(edges));
        for (int i = 1; i <= 3; ++i) {
            const DegreeMax a = degree_profile(h, i), b = naive_max(h, i);
            ok = ok && a.value == b.value && std::equal(a.witness.begin(), a.witness.begin() + i, b.witness.begin());
        }
    }
    report(6, ok, "degree_profile equals naive recount on 100 random hypergraphs (<= 1e4 edges)", t0);
}

void c7_chernoff() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    std::uint64_t i = 0;
    for (auto [mu, h] : {std::pair{1.0, 20.0}, {2.0, 40.0}, {5.0, 100.0}}) {
        const ChernoffCheck c = chernoff_check_point(mu, h, 1'000'000, derive_seed(700, {i++}));
        const bool good = c.frequency <= 2 * std::exp(-h / 2) && c.frequency <= c.bound;
        ok = ok && good;
        char buf[96];
        std::snprintf(buf, sizeof buf, " (%g,%g): %.2e <= %.2e", mu, h, c.frequency, c.bound);
        detail += buf;
    }
    report(7, ok, "tail frequency over 1e6 samples:" + detail, t0);
}

void c8_deletion() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (std::uint32_t q : {7u, 11u}) {
        const double p = std::pow(static_cast<double>(q), -2.8);
        int good = 0;
        for (std::uint64_t t = 0; t < 200; ++t) {
            Rng rng(derive_seed(800 + q, {t}));
            const PointSet u = sample_p_random(q, 3, p, rng);
            good += static_cast<double>(deletion_bound(u).bound) >= 0.4 * static_cast<double>(u.size());
        }
        ok = ok && good >= 180;
        detail += " q=" + std::to_string(q) + ":" + std::to_string(good) + "/200";
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    ok = ok && s < 120;
    report(8, ok, "deletion >= 0.4|U| at p = q^-2.8:" + detail, t0);
}

void c9_phase_diagram() {
    const auto t0 = Clock::now();
    const std::uint32_t q = 11;
    const auto grid = default_grid(q, 3);
    const auto recs = sweep_phase_diagram(q, 3, grid, 50, 900);
    std::vector<const SweepRecord*> summary;
    for (const auto& r : recs)
        if (r.trial == -1) summary.push_back(&r);
    bool a = summary.size() == 40, b = true, c = false;
    for (int g = 0; g < 3 && a; ++g) a = std::abs(summary[g]->alpha_lower - summary[g]->sample_size) <= 2;
    int inversions = 0;
    for (std::size_t g = 1; g < summary.size(); ++g) inversions += summary[g]->alpha_lower < summary[g - 1]->alpha_lower;
    b = inversions <= 1;
    const double top = summary.back()->alpha_lower;
    c = summary.back()->p == 1.0 && top >= q && top <= 3 * q;
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    char buf[160];
    std::snprintf(buf, sizeof buf, "q=11 sweep 40x50: low-p medians %s, %d inversion(s), median alpha at p=1 is %g", a ? "match" : "off",
                  inversions, top);
    report(9, a && b && c && s < 900, buf, t0);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

// Runs a shell command (which carries its own redirections); returns the exit code.
int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void c10_determinism() {
    const auto t0 = Clock::now();
    const std::string cli = FQGP_CLI_PATH;
    const std::string dir = "acceptance_det";
    run("mkdir -p " + dir);
    const std::string quiet = " > /dev/null 2>&1";
    bool ok = true;
    std::string detail;
    // build: two runs at --jobs 1 and one at --jobs 3, dump + report + stdout.
    std::vector<std::string> dumps, reports, stdouts;
    int i = 0;
    for (int jobs : {1, 1, 3}) {
        const std::string tag = dir + "/b" + std::to_string(i++);
        run(cli + " build --q 5 --random 0.6 --seed 17 --jobs " + std::to_string(jobs) + " --out " + tag + ".hg --report " + tag +
            ".json > " + tag + ".txt 2>/dev/null");
        stdouts.push_back(slurp(tag + ".txt"));
        dumps.push_back(slurp(tag + ".hg"));
        reports.push_back(slurp(tag + ".json"));
    }
    const bool build_same = !dumps[0].empty() && !reports[0].empty() && dumps[0] == dumps[1] && dumps[0] == dumps[2] &&
                            reports[0] == reports[1] && reports[0] == reports[2] && stdouts[0] == stdouts[1] && stdouts[0] == stdouts[2];
    ok = ok && build_same;
    detail += build_same ? " build identical" : " build differs";
    // Exit 2 is also a failed-bounds verdict, so look for the mismatch diagnostic.
    const int vrc = run(cli + " verify --input " + dir + "/b0.hg --report " + dir + "/b0.json > " + dir + "/v.txt 2>&1");
    const bool round_trip = (vrc == 0 || vrc == 2) && slurp(dir + "/v.txt").find("mismatch") == std::string::npos;
    ok = ok && round_trip;
    detail += round_trip ? ", verify reproduces report" : ", verify mismatch";
    std::vector<std::string> csvs;
    for (int jobs : {1, 1, 3}) {
        const std::string tag = dir + "/s" + std::to_string(csvs.size()) + ".csv";
        run(cli + " sweep --q 5 --trials 5 --p-steps 8 --seed 3 --jobs " + std::to_string(jobs) + " --out " + tag + quiet);
        csvs.push_back(slurp(tag));
    }
    const bool sweep_same = !csvs[0].empty() && csvs[0] == csvs[1] && csvs[0] == csvs[2];
    ok = ok && sweep_same;
    detail += sweep_same ? ", sweep identical" : ", sweep differs";
    report(10, ok, "byte-identical outputs across runs and --jobs:" + detail, t0);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
    void (*const checks[])() = {c1_moment_curve, c2_exact_f33, c3_geometry, c4_membership,    c5_ratios,
                                c6_degree_profile, c7_chernoff, c8_deletion, c9_phase_diagram, c10_determinism};
    for (int id = 1; id <= 10; ++id) {
        if (!want(id)) continue;
        try {
            checks[id - 1]();
        } catch (const std::exception& e) {
            report(id, false, std::string("threw: ") + e.what(), Clock::now());
        }
    }
    return failures ? 1 : 0;
}
