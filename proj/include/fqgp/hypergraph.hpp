#pragma once

// 4-uniform hypergraphs on a point set U, their co-degree profile, the
// normalized size/degree ratios, and the text dump.
//
// Vertices are positions into U.ids(). Edges are stored as ascending
// quadruples, sorted and deduplicated.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "point_set.hpp"

namespace fqgp {

using Quad = std::array<std::uint32_t, 4>;

/// Packs an ascending subset of at most three positions (< 2^21) into a key.
inline std::uint64_t subset_key(const std::uint32_t* s, int k) {
    std::uint64_t key = 0;
    for (int i = 0; i < k; ++i) key = (key << 21) | s[i];
    return key;
}

inline std::array<std::uint32_t, 3> unpack_key(std::uint64_t key, int k) {
    std::array<std::uint32_t, 3> s{};
    for (int i = k - 1; i >= 0; --i) {
        s[i] = static_cast<std::uint32_t>(key & ((1u << 21) - 1));
        key >>= 21;
    }
    return s;
}

class SupersatHypergraph {
public:
    explicit SupersatHypergraph(PointSet u) : u_(std::move(u)) {}

    /// Takes any quadruples of distinct positions; sorts, dedups and checks them.
    SupersatHypergraph(PointSet u, std::vector<Quad> edges) : u_(std::move(u)), edges_(std::move(edges)) {
        if (u_.size() >= (1u << 21)) throw std::invalid_argument("hypergraph: point set too large");
        for (Quad& e : edges_) {
            std::sort(e.begin(), e.end());
            if (e[3] >= u_.size()) throw std::invalid_argument("hypergraph: vertex outside U");
            if (e[0] == e[1] || e[1] == e[2] || e[2] == e[3]) throw std::invalid_argument("hypergraph: repeated vertex");
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    const PointSet& base() const { return u_; }
    const std::vector<Quad>& edges() const { return edges_; }
    std::size_t size() const { return edges_.size(); }

    /// d_H(S) for an ascending subset S of size 1..3.
    std::uint64_t degree(std::span<const std::uint32_t> s) const {
        if (s.empty() || s.size() > 3) throw std::invalid_argument("degree: subset size must be 1..3");
        build_index();
        const auto& idx = index_[s.size() - 1];
        const std::uint64_t key = subset_key(s.data(), static_cast<int>(s.size()));
        auto it = std::lower_bound(idx.begin(), idx.end(), std::pair<std::uint64_t, std::uint64_t>{key, 0});
        return it != idx.end() && it->first == key ? it->second : 0;
    }

    /// (key, d_H) for every i-subset of positive degree, ascending by key.
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& degree_index(int i) const {
        if (i < 1 || i > 3) throw std::invalid_argument("degree_index: i must be 1..3");
        build_index();
        return index_[i - 1];
    }

private:
    void build_index() const {
        if (indexed_) return;
        std::array<std::vector<std::uint64_t>, 3> keys;
        keys[0].reserve(edges_.size() * 4);
        keys[1].reserve(edges_.size() * 6);
        keys[2].reserve(edges_.size() * 4);
        for (const Quad& e : edges_)
            for (int a = 0; a < 4; ++a) {
                keys[0].push_back(e[a]);
                for (int b = a + 1; b < 4; ++b) {
                    const std::uint32_t p[2] = {e[a], e[b]};
                    keys[1].push_back(subset_key(p, 2));
                    for (int c = b + 1; c < 4; ++c) {
                        const std::uint32_t t[3] = {e[a], e[b], e[c]};
                        keys[2].push_back(subset_key(t, 3));
                    }
                }
            }
        for (int i = 0; i < 3; ++i) {
            auto& k = keys[i];
            std::sort(k.begin(), k.end());
            auto& out = index_[i];
            out.clear();
            for (std::size_t a = 0; a < k.size();) {
                std::size_t b = a;
                while (b < k.size() && k[b] == k[a]) ++b;
                out.emplace_back(k[a], b - a);
                a = b;
            }
        }
        indexed_ = true;
    }

    PointSet u_;
    std::vector<Quad> edges_;
    mutable bool indexed_ = false;
    mutable std::array<std::vector<std::pair<std::uint64_t, std::uint64_t>>, 3> index_;
};

struct DegreeMax {
    std::uint64_t value = 0;
    std::array<std::uint32_t, 3> witness{};  // first i entries used
};

/// Δ_i(H) and the lexicographically least i-subset attaining it.
inline DegreeMax degree_profile(const SupersatHypergraph& h, int i) {
    DegreeMax best;
    for (const auto& [key, deg] : h.degree_index(i))
        if (deg > best.value) {  // keys ascend, so the first maximum is the least subset
            best.value = deg;
            best.witness = unpack_key(key, i);
        }
    return best;
}

// ---------------------------------------------------------------------------

struct ConstructionConstants {
    double T = 8.0;            // minimum n / q
    double tau_b = 0.25;       // richness threshold tau_b * n / q
    double tau_split = 1.0;    // heavy lines: n_K >= tau_split * n / q^(2/3)
    double eps_dense = 0.02;   // dense when |S_4(U)| >= eps_dense * n^4
    double c_samp = 0.25;      // sampling probability multiplier
    // Frozen by `fqgp calibrate --q 5 7 --seeds 10 --seed 2026`: half the
    // smallest observed ρ₀, twice the largest ρ_i, rounded outwards.
    double c1 = 0.0095;
    double C1 = 0.18, C2 = 0.29, C3 = 0.36;
    int retries = 16;

    void validate() const {
        if (!(T > 0 && tau_b > 0 && tau_split > 0 && c_samp > 0 && c1 >= 0 && C1 >= 0 && C2 >= 0 && C3 >= 0))
            throw std::invalid_argument("construction constants must be positive");
        if (!(eps_dense > 0 && eps_dense < 1)) throw std::invalid_argument("eps_dense must lie in (0, 1)");
        if (retries < 1) throw std::invalid_argument("retries must be at least 1");
    }
};

enum class Case { Dense, Case1, Case21, Case22 };

inline const char* case_name(Case c) {
    switch (c) {
        case Case::Dense: return "DENSE";
        case Case::Case1: return "CASE1";
        case Case::Case21: return "CASE21";
        case Case::Case22: return "CASE22";
    }
    return "?";
}

inline Case parse_case(const std::string& s) {
    for (Case c : {Case::Dense, Case::Case1, Case::Case21, Case::Case22})
        if (s == case_name(c)) return c;
    throw std::invalid_argument("unknown case '" + s + "'");
}

struct BoundsReport {
    std::uint32_t q = 0;
    int d = 3;
    std::uint64_t n = 0;
    Case kase = Case::Dense;
    std::uint64_t edges = 0;
    std::array<DegreeMax, 3> delta{};
    std::array<double, 4> rho{};
    bool size_ok = false;
    std::array<bool, 3> degree_ok{};
    bool pass = false;
    int attempts = 0;
    std::uint64_t seed = 0;
};

/// ρ₀ = |H| q / n^4 and ρ_i = Δ_i q^(1-(i-1)/3) / n^(4-i), with the pass flags.
inline void fill_ratios(BoundsReport& r, const ConstructionConstants& k) {
    const double n = static_cast<double>(r.n), q = static_cast<double>(r.q);
    r.rho[0] = r.n ? static_cast<double>(r.edges) * q / std::pow(n, 4) : 0.0;
    for (int i = 1; i <= 3; ++i)
        r.rho[i] = r.n ? static_cast<double>(r.delta[i - 1].value) * std::pow(q, 1.0 - (i - 1) / 3.0) / std::pow(n, 4 - i) : 0.0;
    r.size_ok = r.edges > 0 && r.rho[0] >= k.c1;
    const double caps[3] = {k.C1, k.C2, k.C3};
    for (int i = 0; i < 3; ++i) r.degree_ok[i] = r.rho[i + 1] <= caps[i];
    r.pass = r.size_ok && r.degree_ok[0] && r.degree_ok[1] && r.degree_ok[2];
}

inline BoundsReport verify_bounds(const SupersatHypergraph& h, const ConstructionConstants& k) {
    BoundsReport r;
    r.q = h.base().q();
    r.d = h.base().d();
    r.n = h.base().size();
    r.edges = h.size();
    for (int i = 1; i <= 3; ++i) r.delta[i - 1] = degree_profile(h, i);
    fill_ratios(r, k);
    return r;
}

// ---------------------------------------------------------------------------
// Dump: header "q d n |H|", n point lines, then |H| lines of four positions.

inline void write_hypergraph(std::ostream& os, const SupersatHypergraph& h) {
    const PointSet& u = h.base();
    os << u.q() << ' ' << u.d() << ' ' << u.size() << ' ' << h.size() << '\n';
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec v = u.space().coords(u.id(i));
        for (int j = 0; j < u.d(); ++j) os << (j ? " " : "") << v[j];
        os << '\n';
    }
    std::string line;
    for (const Quad& e : h.edges()) {
        line.clear();
        for (int j = 0; j < 4; ++j) {
            if (j) line += ' ';
            line += std::to_string(e[j]);
        }
        line += '\n';
        os << line;
    }
}

inline SupersatHypergraph read_hypergraph(std::istream& is) {
    long long q, d, n, m;
    if (!(is >> q >> d >> n >> m) || q < 2 || q > kMaxModulus || n < 0 || m < 0)
        throw std::runtime_error("hypergraph: bad header");
    require_prime_modulus(static_cast<std::uint32_t>(q));
    require_dimension(static_cast<int>(d));
    AffineSpace sp(static_cast<std::uint32_t>(q), static_cast<int>(d));
    std::vector<PointId> ids;
    ids.reserve(n);
    for (long long i = 0; i < n; ++i) {
        Vec v{};
        for (int j = 0; j < d; ++j) {
            long long c;
            if (!(is >> c) || c < 0 || c >= q) throw std::runtime_error("hypergraph: bad point " + std::to_string(i));
            v[j] = static_cast<std::uint32_t>(c);
        }
        ids.push_back(sp.id(v));
    }
    if (!std::is_sorted(ids.begin(), ids.end())) throw std::runtime_error("hypergraph: point table not in ascending order");
    PointSet u(sp.q(), sp.d(), std::move(ids));
    std::vector<Quad> edges;
    edges.reserve(m);
    for (long long i = 0; i < m; ++i) {
        Quad e;
        for (int j = 0; j < 4; ++j) {
            long long x;
            if (!(is >> x) || x < 0 || x >= n) throw std::runtime_error("hypergraph: bad edge " + std::to_string(i));
            e[j] = static_cast<std::uint32_t>(x);
        }
        edges.push_back(e);
    }
    return SupersatHypergraph(std::move(u), std::move(edges));
}

}  // namespace fqgp
