// fqgp: build and verify supersaturated hypergraphs of coplanar 4-sets,
// estimate α(U) for p-random sets, and check the Chernoff tail bound.
//
// Exit codes: 0 success/pass, 1 usage error, 2 built but bounds failed
// (or verify mismatch), 3 I/O error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <fqgp/chernoff.hpp>
#include <fqgp/random_model.hpp>
#include <fqgp/supersaturation.hpp>

using namespace fqgp;
using json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0, kUsage = 1, kFailed = 2, kIo = 3;

// Stream used for --random point sets; far from the per-attempt keys.
constexpr std::uint64_t kSampleKey = 0x5A4D504C45ull;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::uint32_t q = 7;
    int d = 3;
    std::uint64_t seed = 1;
    int jobs = 1;
    bool full_space = false;
    std::optional<double> random_p;
    std::string input, out, report;
    int trials = 50;
    std::optional<double> p_min, p_max, p;
    int p_steps = 40;
    std::uint64_t exact_budget = 5'000'000;
    bool exact = false, timing = false;
    std::vector<double> mus{1}, hs{20};
    std::uint64_t samples = 1'000'000;
    std::vector<std::uint32_t> qs{5, 7};
    int seeds = 5;
    ConstructionConstants k;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    return f;
}

void check_field(const Config& c) {
    if (!is_prime(c.q)) throw std::invalid_argument(std::to_string(c.q) + " is not prime");
    require_dimension(c.d);
}

PointSet load_points(const Config& c) {
    const int sources = c.full_space + c.random_p.has_value() + !c.input.empty();
    if (sources != 1) throw std::invalid_argument("give exactly one of --full-space, --random, --input");
    if (!c.input.empty()) {
        auto f = open_in(c.input);
        try {
            return read_point_set(f);
        } catch (const std::runtime_error& e) {
            throw IoError(e.what());
        }
    }
    check_field(c);
    if (c.full_space) return PointSet::full(c.q, c.d);
    Rng rng(derive_seed(c.seed, {kSampleKey}));
    return sample_p_random(c.q, c.d, *c.random_p, rng);
}

json report_json(const BoundsReport& r) {
    json j;
    j["q"] = r.q;
    j["d"] = r.d;
    j["n"] = r.n;
    j["case"] = case_name(r.kase);
    j["edges"] = r.edges;
    for (int i = 0; i < 3; ++i) {
        const std::string k = "delta" + std::to_string(i + 1);
        j[k] = r.delta[i].value;
        j[k + "_witness"] = std::vector<std::uint32_t>(r.delta[i].witness.begin(), r.delta[i].witness.begin() + i + 1);
    }
    for (int i = 0; i < 4; ++i) j["rho" + std::to_string(i)] = r.rho[i];
    j["size_ok"] = r.size_ok;
    for (int i = 0; i < 3; ++i) j["degree_ok" + std::to_string(i + 1)] = r.degree_ok[i];
    j["pass"] = r.pass;
    j["attempts"] = r.attempts;
    j["seed"] = r.seed;
    return j;
}

void print_seed(std::uint64_t seed) { std::cout << "# seed: " << seed << '\n'; }

// ---------------------------------------------------------------------------

int cmd_build(Config& c) {
    c.k.validate();
    const PointSet u = load_points(c);
    print_seed(c.seed);
    BuildOptions opt;
    opt.jobs = c.jobs;
    opt.materialize = !c.out.empty();
    const SupersatResult res = build_supersat(u, c.k, c.seed, opt);
    const json j = report_json(res.report);
    if (!c.out.empty()) {
        auto f = open_out(c.out);
        write_hypergraph(f, *res.graph);
        if (!f) throw IoError("write failed: " + c.out);
    }
    if (!c.report.empty()) {
        auto f = open_out(c.report);
        f << j.dump(2) << '\n';
    }
    std::cout << j.dump(2) << '\n';
    return res.report.pass ? kOk : kFailed;
}

// Re-derives the report from a dump. The case comes from choose_case on the
// dump's point table; attempts and seed are bookkeeping and are taken from
// --report when one is given.
int cmd_verify(Config& c) {
    c.k.validate();
    if (c.input.empty()) throw std::invalid_argument("verify needs --input <dump>");
    auto f = open_in(c.input);
    std::optional<SupersatHypergraph> h;
    try {
        h.emplace(read_hypergraph(f));
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
    BoundsReport r = verify_bounds(*h, c.k);
    r.kase = choose_case(h->base(), c.k).kase;
    std::optional<json> given;
    if (!c.report.empty()) {
        auto rf = open_in(c.report);
        try {
            given = json::parse(rf);
            r.attempts = given->at("attempts").get<int>();
            r.seed = given->at("seed").get<std::uint64_t>();
        } catch (const json::exception& e) {
            throw IoError(std::string("report: ") + e.what());
        }
    }
    const json j = report_json(r);
    std::cout << j.dump(2) << '\n';
    if (given && *given != j) {
        std::cerr << "verify: report mismatch\n";
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!given->contains(it.key()) || (*given)[it.key()] != it.value())
                std::cerr << "  " << it.key() << ": builder " << (given->contains(it.key()) ? (*given)[it.key()].dump() : "<missing>")
                          << ", recomputed " << it.value().dump() << '\n';
        return kFailed;
    }
    return r.pass ? kOk : kFailed;
}

int cmd_sweep(Config& c) {
    check_field(c);
    std::vector<double> grid;
    if (c.p) {
        if (c.p_min || c.p_max) throw std::invalid_argument("--p excludes --p-min/--p-max");
        grid = {*c.p};
        if (!(*c.p > 0 && *c.p <= 1)) throw std::invalid_argument("--p must lie in (0, 1]");
    } else if (c.p_min || c.p_max) {
        grid = log_grid(c.p_min.value_or(std::pow(static_cast<double>(c.q), -c.d) / 10), c.p_max.value_or(1.0), c.p_steps);
    } else {
        grid = log_grid(std::pow(static_cast<double>(c.q), -c.d) / 10, 1.0, c.p_steps);
    }
    AlphaOptions opt;
    opt.node_limit = c.exact_budget;
    opt.timing = c.timing;
    const auto recs = sweep_phase_diagram(c.q, c.d, grid, c.trials, c.seed, opt, c.jobs);
    std::ostringstream csv;
    write_sweep_csv(csv, recs);
    if (c.out.empty()) {
        print_seed(c.seed);
        std::cout << csv.str();
    } else {
        auto f = open_out(c.out);
        f << "# seed: " << c.seed << '\n' << csv.str();
        print_seed(c.seed);
        std::cout << "wrote " << recs.size() << " rows to " << c.out << '\n';
    }
    return kOk;
}

int cmd_alpha(Config& c) {
    const PointSet u = load_points(c);
    print_seed(c.seed);
    json j;
    j["q"] = u.q();
    j["d"] = u.d();
    j["n"] = u.size();
    PointSet w(u.q(), u.d());
    if (c.exact) {
        const SearchResult s = max_general_position_exact(u, ExactBudget{c.exact_budget});
        j["alpha"] = s.size;
        j["optimal"] = s.optimal;
        j["nodes"] = s.nodes;
        w = s.witness;
    } else {
        const DeletionResult del = deletion_bound(u);
        const HeuristicResult h = max_general_position_heuristic(u, c.seed, 20, del.witness.ids());
        j["alpha"] = std::max(h.size, del.bound);
        j["optimal"] = false;
        j["deletion"] = del.bound;
        w = h.size >= del.bound ? h.witness : del.witness;
    }
    json pts = json::array();
    for (PointId x : w.ids()) {
        const Vec v = u.space().coords(x);
        pts.push_back(std::vector<std::uint32_t>(v.begin(), v.begin() + u.d()));
    }
    j["witness"] = pts;
    std::cout << j.dump(2) << '\n';
    return kOk;
}

int cmd_chernoff(Config& c) {
    print_seed(c.seed);
    const auto checks = chernoff_empirical_check(c.mus, c.hs, c.samples, c.seed);
    bool ok = true;
    std::printf("%-8s %-8s %-14s %-14s %s\n", "mu", "h", "bound", "frequency", "ok");
    for (const auto& k : checks) {
        std::printf("%-8g %-8g %-14.6e %-14.6e %s\n", k.mu, k.h, k.bound, k.frequency, k.ok ? "yes" : "NO");
        ok = ok && k.ok;
    }
    if (checks.empty())
        for (double mu : c.mus)
            for (double h : c.hs) std::printf("%-8g %-8g %-14.6e\n", mu, h, chernoff_tail_bound(mu, h));
    return ok ? kOk : kFailed;
}

// Builds full F_q^3 for each q and seed with open caps and reports the
// observed ratio ranges plus the constants c1 = min ρ0 / 2, C_i = 2 max ρ_i.
int cmd_calibrate(Config& c) {
    print_seed(c.seed);
    ConstructionConstants k = c.k;
    k.c1 = 0;
    k.C1 = k.C2 = k.C3 = std::numeric_limits<double>::max();
    k.retries = 1;
    k.validate();
    std::array<double, 4> lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(0);
    json runs = json::array();
    for (std::uint32_t q : c.qs) {
        if (!is_prime(q)) throw std::invalid_argument(std::to_string(q) + " is not prime");
        const PointSet u = PointSet::full(q, 3);
        for (int s = 0; s < c.seeds; ++s) {
            const std::uint64_t seed = derive_seed(c.seed, {q, static_cast<std::uint64_t>(s)});
            BuildOptions opt;
            opt.jobs = c.jobs;
            const SupersatResult r = build_supersat(u, k, seed, opt);
            json row = report_json(r.report);
            row.erase("size_ok");
            row.erase("degree_ok1");
            row.erase("degree_ok2");
            row.erase("degree_ok3");
            row.erase("pass");
            runs.push_back(row);
            for (int i = 0; i < 4; ++i) {
                lo[i] = std::min(lo[i], r.report.rho[i]);
                hi[i] = std::max(hi[i], r.report.rho[i]);
            }
            std::cerr << "q=" << q << " seed#" << s << " edges=" << r.report.edges << '\n';
        }
    }
    json j;
    j["runs"] = runs;
    j["rho_min"] = lo;
    j["rho_max"] = hi;
    j["c1"] = lo[0] / 2;
    j["C1"] = 2 * hi[1];
    j["C2"] = 2 * hi[2];
    j["C3"] = 2 * hi[3];
    std::cout << j.dump(2) << '\n';
    if (!c.report.empty()) {
        auto f = open_out(c.report);
        f << j.dump(2) << '\n';
    }
    return kOk;
}

void add_constants(CLI::App* s, Config& c) {
    s->add_option("--T", c.k.T, "minimum n/q");
    s->add_option("--tau-b", c.k.tau_b, "richness threshold");
    s->add_option("--tau-split", c.k.tau_split, "heavy-line threshold");
    s->add_option("--eps-dense", c.k.eps_dense, "dense threshold on |S_4|/n^4");
    s->add_option("--c-samp", c.k.c_samp, "sampling multiplier");
    s->add_option("--c1", c.k.c1, "size constant");
    s->add_option("--C1", c.k.C1, "degree cap, singletons");
    s->add_option("--C2", c.k.C2, "degree cap, pairs");
    s->add_option("--C3", c.k.C3, "degree cap, triples");
    s->add_option("--retries", c.k.retries, "build attempts");
}

void add_source(CLI::App* s, Config& c) {
    s->add_flag("--full-space", c.full_space, "U = F_q^d");
    s->add_option("--random", c.random_p, "U = p-random subset of F_q^d");
    s->add_option("--input", c.input, "point-set file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite affine geometry: supersaturation and general position"};
    app.require_subcommand(1);
    Config c;
    auto common = [&](CLI::App* s) {
        s->add_option("--q", c.q, "field size (prime)");
        s->add_option("--d", c.d, "dimension");
        s->add_option("--seed", c.seed, "master seed");
        s->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    };

    auto* build = app.add_subcommand("build", "build a supersaturated hypergraph and check its bounds");
    common(build);
    add_source(build, c);
    add_constants(build, c);
    build->add_option("--out", c.out, "hypergraph dump");
    build->add_option("--report", c.report, "JSON report");

    auto* verify = app.add_subcommand("verify", "recompute the report of a hypergraph dump");
    add_constants(verify, c);
    verify->add_option("--input", c.input, "hypergraph dump")->required();
    verify->add_option("--report", c.report, "builder report to compare against");

    auto* sweep = app.add_subcommand("sweep", "alpha over a log-spaced p grid");
    common(sweep);
    sweep->add_option("--trials", c.trials, "trials per p")->check(CLI::PositiveNumber);
    sweep->add_option("--p-min", c.p_min);
    sweep->add_option("--p-max", c.p_max);
    sweep->add_option("--p-steps", c.p_steps);
    sweep->add_option("--p", c.p, "single p");
    sweep->add_option("--exact-budget", c.exact_budget, "node limit of the exact search");
    sweep->add_flag("--timing", c.timing, "record wall time per trial");
    sweep->add_option("--out", c.out, "CSV path");

    auto* alpha = app.add_subcommand("alpha", "largest general-position subset of U");
    common(alpha);
    add_source(alpha, c);
    alpha->add_flag("--exact", c.exact, "branch and bound instead of the heuristic");
    alpha->add_option("--exact-budget", c.exact_budget, "node limit");

    auto* chern = app.add_subcommand("chernoff", "empirical tail frequency against the bound");
    chern->set_help_flag("--help", "print this help");  // frees -h for the threshold
    chern->add_option("--seed", c.seed);
    chern->add_option("--mu", c.mus)->expected(1, -1);
    chern->add_option("--h", c.hs)->expected(1, -1);
    chern->add_option("--samples", c.samples);

    auto* calib = app.add_subcommand("calibrate", "measure ratio ranges on full spaces");
    calib->add_option("--seed", c.seed);
    calib->add_option("--jobs", c.jobs)->check(CLI::PositiveNumber);
    calib->add_option("--q", c.qs)->expected(1, -1);
    calib->add_option("--seeds", c.seeds)->check(CLI::PositiveNumber);
    calib->add_option("--report", c.report, "JSON output");
    add_constants(calib, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*build) return cmd_build(c);
        if (*verify) return cmd_verify(c);
        if (*sweep) return cmd_sweep(c);
        if (*alpha) return cmd_alpha(c);
        if (*chern) return cmd_chernoff(c);
        if (*calib) return cmd_calibrate(c);
    } catch (const IoError& e) {
        std::cerr << "fqgp: " << e.what() << '\n';
        return kIo;
    } catch (const std::logic_error& e) {
        std::cerr << "fqgp: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "fqgp: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}
