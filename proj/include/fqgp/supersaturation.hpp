#pragma once

/**
 * @file supersaturation.hpp
 * @brief Randomized balanced-supersaturation construction for coplanar
 *        4-sets of a point set U ⊆ F_q^3.
 *
 * Every edge that contains a non-collinear triple lies in exactly one plane,
 * and four collinear points are assigned to one designated plane through
 * their line. The builders therefore work plane by plane: each plane
 * collects its sampled quadruples in a local set (which also deduplicates
 * edges produced by several seeds), then folds them into the degree
 * counters. Every seed draws from its own stream derive_seed(seed, ...), so
 * the result does not depend on the plane order or the number of workers.
 */

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

#include "hypergraph.hpp"
#include "rng.hpp"

namespace fqgp {

inline std::uint64_t binom(std::uint64_t n, int k) {
    if (n < static_cast<std::uint64_t>(k)) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Per-plane and per-line point counts of U (d = 3).
class UGeometry {
public:
    explicit UGeometry(const PointSet& u) : u_(u), inc_(incidence(u.q(), u.d())) {
        if (u.d() != 3) throw std::invalid_argument("supersaturation: only d = 3 is supported");
        plane_members_.assign(inc_.num_hyperplanes(), {});
        line_count_.assign(inc_.num_lines(), 0);
        for (std::uint32_t i = 0; i < u.size(); ++i) {
            const PointId x = u.id(i);
            for (std::uint32_t k = 0; k < inc_.num_normals(); ++k) {
                plane_members_[inc_.hyperplane(k, x)].push_back(i);
                ++line_count_[inc_.line_through(x, k)];
            }
        }
    }

    const PointSet& u() const { return u_; }
    const Incidence& inc() const { return inc_; }
    std::uint64_t n() const { return u_.size(); }
    std::uint32_t num_planes() const { return inc_.num_hyperplanes(); }
    const std::vector<std::uint32_t>& members(std::uint32_t plane) const { return plane_members_[plane]; }
    std::uint32_t plane_count(std::uint32_t plane) const { return static_cast<std::uint32_t>(plane_members_[plane].size()); }
    std::uint32_t line_count(std::uint32_t line) const { return line_count_[line]; }
    const std::vector<std::uint32_t>& line_counts() const { return line_count_; }

    /// |S_4(U)| = Σ_P C(n_P,4) − q Σ_L C(n_L,4): a collinear 4-set lies in q+1 planes.
    std::uint64_t s4() const {
        std::uint64_t planes = 0, lines = 0;
        for (const auto& m : plane_members_) planes += binom(m.size(), 4);
        for (std::uint32_t c : line_count_) lines += binom(c, 4);
        return planes - static_cast<std::uint64_t>(u_.q()) * lines;
    }

    /// Lowest plane id through a line; collinear 4-sets are assigned to it.
    std::uint32_t designated_plane(std::uint32_t line, PointId on_line) const {
        std::uint32_t best = ~0u;
        inc_.for_each_plane_through_line(line, on_line, [&](std::uint32_t h) { best = std::min(best, h); });
        return best;
    }

private:
    const PointSet& u_;
    const Incidence& inc_;
    std::vector<std::vector<std::uint32_t>> plane_members_;
    std::vector<std::uint32_t> line_count_;
};

/// Lines of U restricted to one plane, with local point indices 0..m-1.
class LocalPlane {
public:
    LocalPlane(const UGeometry& g, std::uint32_t plane) : plane_(plane), g_(&g.members(plane)), m_(static_cast<std::uint32_t>(g_->size())) {
        const Incidence& inc = g.inc();
        const PointSet& u = g.u();
        lid_.assign(static_cast<std::size_t>(m_) * m_, kNone);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> row;
        for (std::uint32_t a = 0; a < m_; ++a) {
            row.clear();
            for (std::uint32_t b = a + 1; b < m_; ++b)
                if (lid_[a * m_ + b] == kNone) row.emplace_back(inc.line_id(u.id(gid(a)), u.id(gid(b))), b);
            std::sort(row.begin(), row.end());
            for (std::size_t i = 0; i < row.size();) {
                std::size_t j = i;
                while (j < row.size() && row[j].first == row[i].first) ++j;
                const std::uint32_t L = static_cast<std::uint32_t>(line_gid_.size());
                line_gid_.push_back(row[i].first);
                std::vector<std::uint32_t> pts{a};
                for (std::size_t t = i; t < j; ++t) pts.push_back(row[t].second);
                for (std::uint32_t x : pts)
                    for (std::uint32_t y : pts)
                        if (x != y) lid_[x * m_ + y] = L;
                line_members_.push_back(std::move(pts));
                i = j;
            }
        }
    }

    std::uint32_t plane() const { return plane_; }
    std::uint32_t m() const { return m_; }
    std::uint32_t gid(std::uint32_t a) const { return (*g_)[a]; }
    std::uint32_t line(std::uint32_t a, std::uint32_t b) const { return lid_[a * m_ + b]; }
    std::uint32_t num_lines() const { return static_cast<std::uint32_t>(line_gid_.size()); }
    std::uint32_t line_size(std::uint32_t l) const { return static_cast<std::uint32_t>(line_members_[l].size()); }
    std::uint32_t line_gid(std::uint32_t l) const { return line_gid_[l]; }
    const std::vector<std::uint32_t>& line_members(std::uint32_t l) const { return line_members_[l]; }
    bool collinear(std::uint32_t a, std::uint32_t b, std::uint32_t c) const { return line(a, b) == line(a, c); }
    /// w lies on the line through a and b.
    bool on_line(std::uint32_t w, std::uint32_t a, std::uint32_t b) const { return w == a || w == b || line(a, w) == line(a, b); }

    /// n_{K°_B} for a non-collinear local triple: the plane minus its three lines.
    std::int64_t punctured_count(std::uint32_t a, std::uint32_t b, std::uint32_t c) const {
        return static_cast<std::int64_t>(m_) - line_size(line(a, b)) - line_size(line(a, c)) - line_size(line(b, c)) + 3;
    }

private:
    static constexpr std::uint32_t kNone = ~0u;
    std::uint32_t plane_;
    const std::vector<std::uint32_t>* g_;
    std::uint32_t m_;
    std::vector<std::uint32_t> lid_;
    std::vector<std::uint32_t> line_gid_;
    std::vector<std::vector<std::uint32_t>> line_members_;
};

// ---------------------------------------------------------------------------
// Case selection

using Triple = std::array<std::uint32_t, 3>;
using Pair = std::array<std::uint32_t, 2>;

struct CasePlan {
    Case kase = Case::Dense;
    std::uint64_t n = 0;
    std::uint32_t q = 0;
    double threshold = 0;  // tau_b * n / q
    double heavy = 0;      // tau_split * n / q^(2/3)
    std::uint64_t s4 = 0;
    std::uint64_t family_b = 0, a3 = 0, a2 = 0, a2_heavy = 0;
    // Seeds given explicitly (positions into U, ascending). When unset the
    // builders select seeds by the rule of the chosen case.
    bool explicit_seeds = false;
    std::vector<Triple> triples;
    std::vector<Pair> pairs;
};

namespace detail {

struct TripleClass {
    bool in_b = false;
    bool in_a3 = false;
};

/// Membership of a non-collinear local triple in the family B and in A_3.
inline TripleClass classify_triple(const LocalPlane& lp, std::uint32_t a, std::uint32_t b, std::uint32_t c, double n, double thr) {
    TripleClass t;
    if (lp.m() > n / 2) return t;  // U concentrated on this plane
    const std::int64_t l1 = lp.line_size(lp.line(a, b)), l2 = lp.line_size(lp.line(a, c)), l3 = lp.line_size(lp.line(b, c));
    const std::int64_t m = lp.m();
    if (static_cast<double>(m - std::min({l1, l2, l3})) < thr) return t;
    t.in_b = true;
    // f(B): the largest of {x},{y},{z},K°_xy,K°_xz,K°_yz,K°_B; earlier parts win ties.
    const std::int64_t kb = m - l1 - l2 - l3 + 3;
    t.in_a3 = kb > std::max({std::int64_t{1}, l1 - 2, l2 - 2, l3 - 2});
    return t;
}

inline void require_regime(const PointSet& u, const ConstructionConstants& k) {
    if (u.d() != 3) throw std::invalid_argument("supersaturation: only d = 3 is supported");
    if (static_cast<double>(u.size()) < k.T * u.q())
        throw std::invalid_argument("supersaturation: need n >= T*q (n=" + std::to_string(u.size()) + ")");
}

}  // namespace detail

/// The family B (as ascending position triples), deduplicated and sorted.
inline std::vector<Triple> scan_family_B(const PointSet& u, const ConstructionConstants& k) {
    detail::require_regime(u, k);
    UGeometry g(u);
    const double n = static_cast<double>(u.size()), thr = k.tau_b * n / u.q();
    std::vector<Triple> out;
    for (std::uint32_t h = 0; h < g.num_planes(); ++h) {
        if (g.plane_count(h) < 3) continue;
        LocalPlane lp(g, h);
        for (std::uint32_t c = 2; c < lp.m(); ++c)
            for (std::uint32_t b = 1; b < c; ++b)
                for (std::uint32_t a = 0; a < b; ++a)
                    if (!lp.collinear(a, b, c) && detail::classify_triple(lp, a, b, c, n, thr).in_b)
                        out.push_back({lp.gid(a), lp.gid(b), lp.gid(c)});
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline CasePlan choose_case(const PointSet& u, const ConstructionConstants& k) {
    k.validate();
    detail::require_regime(u, k);
    UGeometry g(u);
    CasePlan plan;
    plan.n = u.size();
    plan.q = u.q();
    const double n = static_cast<double>(u.size()), q = u.q();
    plan.threshold = k.tau_b * n / q;
    plan.heavy = k.tau_split * n / std::cbrt(q * q);
    plan.s4 = g.s4();
    if (static_cast<double>(plan.s4) >= k.eps_dense * n * n * n * n) {
        plan.kase = Case::Dense;
        return plan;
    }
    for (std::uint32_t h = 0; h < g.num_planes(); ++h) {
        if (g.plane_count(h) < 3) continue;
        LocalPlane lp(g, h);
        for (std::uint32_t c = 2; c < lp.m(); ++c)
            for (std::uint32_t b = 1; b < c; ++b)
                for (std::uint32_t a = 0; a < b; ++a) {
                    if (lp.collinear(a, b, c)) continue;
                    const auto t = detail::classify_triple(lp, a, b, c, n, plan.threshold);
                    plan.family_b += t.in_b;
                    plan.a3 += t.in_a3;
                }
    }
    if (plan.family_b == 0) throw std::domain_error("supersaturation: U is below the construction regime (family B is empty)");
    if (14 * plan.a3 >= plan.family_b) {
        plan.kase = Case::Case1;
        return plan;
    }
    for (std::uint32_t c : g.line_counts()) {
        if (static_cast<double>(c) < plan.threshold) continue;
        plan.a2 += binom(c, 2);
        if (static_cast<double>(c) >= plan.heavy) plan.a2_heavy += binom(c, 2);
    }
    plan.kase = 2 * plan.a2_heavy >= plan.a2 && plan.a2 > 0 ? Case::Case22 : Case::Case21;
    return plan;
}

// ---------------------------------------------------------------------------
// Per-plane quadruple sets and degree accumulation

namespace detail {

/// Binomial tables for colex ranks of local subsets.
struct Ranks {
    std::vector<std::uint64_t> c2, c3, c4;
    explicit Ranks(std::uint32_t m = 0) { grow(m); }
    void grow(std::uint32_t m) {
        if (c2.size() > m) return;
        c2.resize(m + 1), c3.resize(m + 1), c4.resize(m + 1);
        for (std::uint64_t x = 0; x <= m; ++x) c2[x] = binom(x, 2), c3[x] = binom(x, 3), c4[x] = binom(x, 4);
    }
    std::uint64_t r3(std::uint32_t a, std::uint32_t b, std::uint32_t c) const { return a + c2[b] + c3[c]; }
    std::uint64_t r4(Quad s) const {
        std::sort(s.begin(), s.end());
        return s[0] + c2[s[1]] + c3[s[2]] + c4[s[3]];
    }
    /// Largest x < hi with table[x] <= r.
    static std::uint32_t top(const std::vector<std::uint64_t>& t, std::uint32_t hi, std::uint64_t r) {
        return static_cast<std::uint32_t>(std::upper_bound(t.begin(), t.begin() + hi, r) - t.begin()) - 1;
    }
    Quad unrank4(std::uint64_t r, std::uint32_t m) const {
        Quad s;
        s[3] = top(c4, m, r), r -= c4[s[3]];
        s[2] = top(c3, s[3], r), r -= c3[s[2]];
        s[1] = top(c2, s[2], r), r -= c2[s[1]];
        s[0] = static_cast<std::uint32_t>(r);
        return s;
    }
    Pair unrank2(std::uint64_t r, std::uint32_t m) const {
        const std::uint32_t b = top(c2, m, r);
        return {static_cast<std::uint32_t>(r - c2[b]), b};
    }
};

/// Set of local quadruples of one plane: a rank list that turns into a
/// bitmap once it gets dense.
class QuadSet {
public:
    void reset(std::uint32_t m, const Ranks& rk) {
        m_ = m;
        total_ = rk.c4[m];
        ranks_.clear();
        bits_.clear();
        dense_ = false;
    }
    void add(std::uint64_t r) {
        if (dense_) {
            bits_[r >> 6] |= 1ull << (r & 63);
            return;
        }
        ranks_.push_back(r);
        if (ranks_.size() > total_ / 64 + 1024) {
            bits_.assign((total_ + 63) / 64, 0);
            for (std::uint64_t x : ranks_) bits_[x >> 6] |= 1ull << (x & 63);
            ranks_.clear();
            ranks_.shrink_to_fit();
            dense_ = true;
        }
    }
    /// Calls fn(a, b, c, d) with a < b < c < d once per member, ascending by rank.
    template <class Fn>
    void for_each(const Ranks& rk, Fn&& fn) {
        if (dense_) {
            std::uint64_t r = 0;
            for (std::uint32_t d = 3; d < m_; ++d)
                for (std::uint32_t c = 2; c < d; ++c)
                    for (std::uint32_t b = 1; b < c; ++b) {
                        const std::uint64_t* w = bits_.data();
                        for (std::uint32_t a = 0; a < b; ++a, ++r)
                            if (w[r >> 6] >> (r & 63) & 1) fn(a, b, c, d);
                    }
            return;
        }
        std::sort(ranks_.begin(), ranks_.end());
        ranks_.erase(std::unique(ranks_.begin(), ranks_.end()), ranks_.end());
        for (std::uint64_t r : ranks_) {
            const Quad s = rk.unrank4(r, m_);
            fn(s[0], s[1], s[2], s[3]);
        }
    }

private:
    std::uint32_t m_ = 0;
    std::uint64_t total_ = 0;
    bool dense_ = false;
    std::vector<std::uint64_t> ranks_, bits_;
};

inline bool lex_less(const std::array<std::uint32_t, 3>& a, const std::array<std::uint32_t, 3>& b, int k) {
    return std::lexicographical_compare(a.begin(), a.begin() + k, b.begin(), b.begin() + k);
}

inline void offer(DegreeMax& best, std::uint64_t value, const std::array<std::uint32_t, 3>& w, int k) {
    if (value > best.value || (value == best.value && value > 0 && lex_less(w, best.witness, k))) {
        best.value = value;
        best.witness = w;
    }
}

/// Global degree counters of one worker.
struct Accumulator {
    std::uint64_t n = 0;
    std::uint64_t edges = 0;
    std::vector<std::uint64_t> vdeg;
    std::vector<std::uint32_t> pdeg;  // triangular, index v(v-1)/2 + u for u < v
    DegreeMax tri;                    // over non-collinear triples (final per plane)
    std::vector<std::pair<std::uint64_t, std::uint64_t>> collinear;  // (key, partial degree)
    bool keep_edges = false;
    std::vector<Quad> out;

    Accumulator(std::uint64_t n_, bool keep) : n(n_), vdeg(n_, 0), pdeg(n_ * (n_ - (n_ ? 1 : 0)) / 2, 0), keep_edges(keep) {}

    void merge(Accumulator&& o) {
        edges += o.edges;
        for (std::size_t i = 0; i < vdeg.size(); ++i) vdeg[i] += o.vdeg[i];
        for (std::size_t i = 0; i < pdeg.size(); ++i) pdeg[i] += o.pdeg[i];
        offer(tri, o.tri.value, o.tri.witness, 3);
        collinear.insert(collinear.end(), o.collinear.begin(), o.collinear.end());
        out.insert(out.end(), o.out.begin(), o.out.end());
        o.out.clear();
    }

    std::array<DegreeMax, 3> finish() {
        std::array<DegreeMax, 3> r{};
        for (std::uint32_t v = 0; v < n; ++v) offer(r[0], vdeg[v], {v, 0, 0}, 1);
        for (std::uint32_t v = 1; v < n; ++v) {
            const std::uint32_t* row = pdeg.data() + static_cast<std::uint64_t>(v) * (v - 1) / 2;
            for (std::uint32_t u = 0; u < v; ++u)
                if (row[u] >= r[1].value) offer(r[1], row[u], {u, v, 0}, 2);
        }
        r[2] = tri;
        std::sort(collinear.begin(), collinear.end());
        for (std::size_t i = 0; i < collinear.size();) {
            std::size_t j = i;
            std::uint64_t s = 0;
            while (j < collinear.size() && collinear[j].first == collinear[i].first) s += collinear[j++].second;
            offer(r[2], s, unpack_key(collinear[i].first, 3), 3);
            i = j;
        }
        return r;
    }
};

/// Scratch for folding one plane's quadruples into an Accumulator.
class PlaneFolder {
public:
    void fold(const LocalPlane& lp, QuadSet& qs, const Ranks& rk, Accumulator& acc) {
        const std::uint32_t m = lp.m();
        lv_.assign(m, 0);
        lpair_.assign(static_cast<std::size_t>(m) * m, 0);
        lt_.assign(rk.c3[m], 0);
        std::uint64_t count = 0;
        qs.for_each(rk, [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
            ++count;
            ++lv_[a], ++lv_[b], ++lv_[c], ++lv_[d];
            ++lpair_[a * m + b], ++lpair_[a * m + c], ++lpair_[a * m + d];
            ++lpair_[b * m + c], ++lpair_[b * m + d], ++lpair_[c * m + d];
            ++lt_[rk.r3(a, b, c)], ++lt_[rk.r3(a, b, d)], ++lt_[rk.r3(a, c, d)], ++lt_[rk.r3(b, c, d)];
            if (acc.keep_edges) acc.out.push_back({lp.gid(a), lp.gid(b), lp.gid(c), lp.gid(d)});
        });
        if (count == 0) return;
        acc.edges += count;
        for (std::uint32_t a = 0; a < m; ++a) acc.vdeg[lp.gid(a)] += lv_[a];
        for (std::uint32_t a = 0; a < m; ++a)
            for (std::uint32_t b = a + 1; b < m; ++b)
                if (const std::uint32_t x = lpair_[a * m + b]) {
                    const std::uint64_t gb = lp.gid(b);
                    acc.pdeg[gb * (gb - 1) / 2 + lp.gid(a)] += x;
                }
        std::uint64_t r = 0;
        for (std::uint32_t c = 2; c < m; ++c)
            for (std::uint32_t b = 1; b < c; ++b)
                for (std::uint32_t a = 0; a < b; ++a, ++r) {
                    if (!lt_[r]) continue;
                    const std::array<std::uint32_t, 3> w{lp.gid(a), lp.gid(b), lp.gid(c)};
                    if (lp.collinear(a, b, c))
                        acc.collinear.emplace_back(subset_key(w.data(), 3), lt_[r]);
                    else
                        offer(acc.tri, lt_[r], w, 3);
                }
    }

private:
    std::vector<std::uint32_t> lv_, lpair_, lt_;
};

inline double clamp_p(double p) { return std::min(1.0, p); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Builders

struct BuildOptions {
    int jobs = 1;
    bool materialize = false;  // keep the edge list (needed for dumps and rechecks)
};

struct BuildResult {
    BoundsReport report;
    std::optional<SupersatHypergraph> graph;
};

namespace detail {

/// Explicit seeds bucketed by plane (triples) and by line (pairs).
struct SeedIndex {
    std::unordered_map<std::uint32_t, std::vector<Triple>> by_plane;
    std::unordered_map<std::uint32_t, std::vector<Pair>> by_line;

    SeedIndex(const UGeometry& g, const CasePlan& plan) {
        if (!plan.explicit_seeds) return;
        const Incidence& inc = g.inc();
        const PointSet& u = g.u();
        auto check = [&](std::uint32_t x) {
            if (x >= u.size()) throw std::invalid_argument("seed position outside U");
        };
        for (Triple t : plan.triples) {
            for (auto x : t) check(x);
            std::sort(t.begin(), t.end());
            if (t[0] == t[1] || t[1] == t[2] || inc.collinear(u.id(t[0]), u.id(t[1]), u.id(t[2])))
                throw std::invalid_argument("case-1 seed must be a non-collinear triple");
            by_plane[inc.plane_through(u.id(t[0]), u.id(t[1]), u.id(t[2]))].push_back(t);
        }
        for (Pair p : plan.pairs) {
            for (auto x : p) check(x);
            if (p[0] > p[1]) std::swap(p[0], p[1]);
            if (p[0] == p[1]) throw std::invalid_argument("pair seed needs two distinct points");
            by_line[inc.line_id(u.id(p[0]), u.id(p[1]))].push_back(p);
        }
    }
};

class PlaneBuilder {
public:
    PlaneBuilder(const UGeometry& g, const CasePlan& plan, const ConstructionConstants& k, std::uint64_t seed, const SeedIndex& seeds)
        : g_(g), plan_(plan), k_(k), seed_(seed), seeds_(seeds), n_(static_cast<double>(g.n())), q_(g.u().q()) {}

    void run(std::uint32_t h, Accumulator& acc) {
        if (g_.plane_count(h) < 3) return;
        LocalPlane lp(g_, h);
        rk_.grow(lp.m());
        qs_.reset(lp.m(), rk_);
        switch (plan_.kase) {
            case Case::Dense: dense(lp); break;
            case Case::Case1: case1(lp); break;
            case Case::Case21: case21(lp); break;
            case Case::Case22: case22(lp); break;
        }
        folder_.fold(lp, qs_, rk_, acc);
    }

private:
    void add(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) { qs_.add(rk_.r4({a, b, c, d})); }

    void dense(const LocalPlane& lp) {
        const double p = 1.0 / q_;
        const std::uint32_t m = lp.m();
        if (m >= 4) {
            Rng rng(derive_seed(seed_, {4, lp.plane()}));
            for_each_bernoulli(rk_.c4[m], p, rng, [&](std::uint64_t r) {
                const Quad s = rk_.unrank4(r, m);
                if (!(lp.collinear(s[0], s[1], s[2]) && lp.collinear(s[0], s[1], s[3]))) qs_.add(r);
            });
        }
        for (std::uint32_t l = 0; l < lp.num_lines(); ++l) {
            const auto& pts = lp.line_members(l);
            if (pts.size() < 4) continue;
            const PointId x = g_.u().id(lp.gid(pts[0]));
            if (g_.designated_plane(lp.line_gid(l), x) != lp.plane()) continue;
            Rng rng(derive_seed(seed_, {5, lp.line_gid(l)}));
            for_each_bernoulli(rk_.c4[pts.size()], p, rng, [&](std::uint64_t r) {
                const Quad s = rk_.unrank4(r, static_cast<std::uint32_t>(pts.size()));
                add(pts[s[0]], pts[s[1]], pts[s[2]], pts[s[3]]);
            });
        }
    }

    void case1_seed(const LocalPlane& lp, std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        const std::int64_t kb = lp.punctured_count(a, b, c);
        if (kb <= 0) throw std::invalid_argument("case-1 seed with empty punctured plane");
        const double p = clamp_p(k_.c_samp * n_ / (q_ * static_cast<double>(kb)));
        Rng rng(derive_seed(seed_, {1, lp.gid(a), lp.gid(b), lp.gid(c)}));
        // Thinning every point of the plane and keeping those in K°_A samples
        // each element of F_A independently with probability p.
        for_each_bernoulli(lp.m(), p, rng, [&](std::uint64_t wi) {
            const auto w = static_cast<std::uint32_t>(wi);
            if (lp.on_line(w, a, b) || lp.on_line(w, a, c) || lp.on_line(w, b, c)) return;
            add(a, b, c, w);
        });
    }

    void case1(const LocalPlane& lp) {
        if (plan_.explicit_seeds) {
            auto it = seeds_.by_plane.find(lp.plane());
            if (it == seeds_.by_plane.end()) return;
            for (const Triple& t : it->second) {
                const auto a = local(lp, t[0]), b = local(lp, t[1]), c = local(lp, t[2]);
                case1_seed(lp, a, b, c);
            }
            return;
        }
        for (std::uint32_t c = 2; c < lp.m(); ++c)
            for (std::uint32_t b = 1; b < c; ++b)
                for (std::uint32_t a = 0; a < b; ++a)
                    if (!lp.collinear(a, b, c) && classify_triple(lp, a, b, c, n_, plan_.threshold).in_a3) case1_seed(lp, a, b, c);
    }

    /// Seed pairs on local line l, by explicit list or by the rule `keep(n_K)`.
    template <class Keep, class Fn>
    void pairs_on_line(const LocalPlane& lp, std::uint32_t l, Keep&& keep, Fn&& fn) {
        const auto& pts = lp.line_members(l);
        if (plan_.explicit_seeds) {
            auto it = seeds_.by_line.find(lp.line_gid(l));
            if (it == seeds_.by_line.end()) return;
            for (const Pair& p : it->second) fn(local(lp, p[0]), local(lp, p[1]));
            return;
        }
        if (!keep(static_cast<double>(pts.size()))) return;
        std::vector<std::uint32_t> s = pts;
        std::sort(s.begin(), s.end());
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) fn(s[i], s[j]);
    }

    static std::vector<std::uint32_t> off_line(const LocalPlane& lp, std::uint32_t l) {
        std::vector<std::uint8_t> on(lp.m(), 0);
        for (std::uint32_t x : lp.line_members(l)) on[x] = 1;
        std::vector<std::uint32_t> out;
        for (std::uint32_t x = 0; x < lp.m(); ++x)
            if (!on[x]) out.push_back(x);
        return out;
    }

    void case21(const LocalPlane& lp) {
        for (std::uint32_t l = 0; l < lp.num_lines(); ++l) {
            const double nk = lp.line_size(l);
            const double rest = lp.m() - nk;  // n_{P \ K_A}
            if (rest < plan_.threshold || rest < 2) continue;
            const auto off = off_line(lp, l);
            const double p = clamp_p(k_.c_samp * n_ / (q_ * rest));
            const auto keep = [&](double c) { return c >= plan_.threshold && c < plan_.heavy && c >= 3; };
            pairs_on_line(lp, l, keep, [&](std::uint32_t a, std::uint32_t b) {
                Rng rng(derive_seed(seed_, {2, lp.gid(a), lp.gid(b), lp.plane()}));
                for_each_bernoulli(rk_.c2[off.size()], p, rng, [&](std::uint64_t r) {
                    const Pair xy = rk_.unrank2(r, static_cast<std::uint32_t>(off.size()));
                    const std::uint32_t x = off[xy[0]], y = off[xy[1]];
                    if (lp.on_line(a, x, y) || lp.on_line(b, x, y)) return;  // collinear triple
                    add(a, b, x, y);
                });
            });
        }
    }

    void case22(const LocalPlane& lp) {
        for (std::uint32_t l = 0; l < lp.num_lines(); ++l) {
            const auto& pts = lp.line_members(l);
            if (pts.size() < 3 || pts.size() == lp.m()) continue;
            const auto off = off_line(lp, l);
            const auto keep = [&](double c) { return c >= plan_.heavy; };
            const double kin = static_cast<double>(pts.size()) - 2;  // n_{K°_A}
            const double p = clamp_p(k_.c_samp * n_ / (q_ * kin));
            pairs_on_line(lp, l, keep, [&](std::uint32_t a, std::uint32_t b) {
                std::vector<std::uint32_t> inner;
                for (std::uint32_t x : pts)
                    if (x != a && x != b) inner.push_back(x);
                std::sort(inner.begin(), inner.end());
                Rng rng(derive_seed(seed_, {3, lp.gid(a), lp.gid(b), lp.plane()}));
                for_each_bernoulli(inner.size() * off.size(), p, rng, [&](std::uint64_t r) {
                    add(a, b, inner[r / off.size()], off[r % off.size()]);
                });
            });
        }
    }

    std::uint32_t local(const LocalPlane& lp, std::uint32_t pos) const {
        const auto& mem = g_.members(lp.plane());
        return static_cast<std::uint32_t>(std::lower_bound(mem.begin(), mem.end(), pos) - mem.begin());
    }

    const UGeometry& g_;
    const CasePlan& plan_;
    const ConstructionConstants& k_;
    std::uint64_t seed_;
    const SeedIndex& seeds_;
    double n_, q_;
    Ranks rk_;
    QuadSet qs_;
    PlaneFolder folder_;
};

inline BuildResult build_with(const UGeometry& g, const CasePlan& plan, const ConstructionConstants& k, std::uint64_t seed,
                              const BuildOptions& opt) {
    const SeedIndex seeds(g, plan);
    const int jobs = std::max(1, opt.jobs);
    std::atomic<std::uint32_t> next{0};
    std::vector<Accumulator> accs;
    for (int j = 0; j < jobs; ++j) accs.emplace_back(g.n(), opt.materialize);
    auto work = [&](int j) {
        PlaneBuilder pb(g, plan, k, seed, seeds);
        for (std::uint32_t h; (h = next.fetch_add(1)) < g.num_planes();) pb.run(h, accs[j]);
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (int j = 0; j < jobs; ++j) threads.emplace_back(work, j);
        for (auto& t : threads) t.join();
    }
    for (int j = 1; j < jobs; ++j) accs[0].merge(std::move(accs[j]));
    Accumulator& acc = accs[0];
    BuildResult res;
    BoundsReport& r = res.report;
    r.q = g.u().q();
    r.d = 3;
    r.n = g.n();
    r.kase = plan.kase;
    r.edges = acc.edges;
    r.delta = acc.finish();
    fill_ratios(r, k);
    if (opt.materialize) res.graph.emplace(g.u(), std::move(acc.out));
    return res;
}

}  // namespace detail

/// One sampling pass of the plan's construction.
inline BuildResult build_once(const PointSet& u, const CasePlan& plan, const ConstructionConstants& k, std::uint64_t seed,
                              BuildOptions opt = {}) {
    UGeometry g(u);
    return detail::build_with(g, plan, k, seed, opt);
}

namespace detail {
inline SupersatHypergraph build_case(const PointSet& u, const CasePlan& plan, Case want, const ConstructionConstants& k,
                                     std::uint64_t seed) {
    if (plan.kase != want) throw std::invalid_argument(std::string("plan is not ") + case_name(want));
    return std::move(*build_once(u, plan, k, seed, {1, true}).graph);
}
}  // namespace detail

inline SupersatHypergraph build_dense(const PointSet& u, const CasePlan& plan, const ConstructionConstants& k, std::uint64_t seed) {
    return detail::build_case(u, plan, Case::Dense, k, seed);
}
inline SupersatHypergraph build_case1(const PointSet& u, const CasePlan& plan, const ConstructionConstants& k, std::uint64_t seed) {
    return detail::build_case(u, plan, Case::Case1, k, seed);
}
inline SupersatHypergraph build_case21(const PointSet& u, const CasePlan& plan, const ConstructionConstants& k, std::uint64_t seed) {
    return detail::build_case(u, plan, Case::Case21, k, seed);
}
inline SupersatHypergraph build_case22(const PointSet& u, const CasePlan& plan, const ConstructionConstants& k, std::uint64_t seed) {
    return detail::build_case(u, plan, Case::Case22, k, seed);
}

struct SupersatResult {
    CasePlan plan;
    BoundsReport report;  // the passing attempt, or the best by ρ₀
    std::optional<SupersatHypergraph> graph;
    std::vector<BoundsReport> attempts;
};

/// Chooses the case and rebuilds with fresh streams until the bounds hold,
/// at most k.retries times. Attempt t uses derive_seed(seed, {t}).
inline SupersatResult build_supersat(const PointSet& u, const ConstructionConstants& k, std::uint64_t seed, BuildOptions opt = {}) {
    SupersatResult out;
    out.plan = choose_case(u, k);
    UGeometry g(u);
    std::optional<BuildResult> best;
    for (int t = 0; t < k.retries; ++t) {
        BuildResult r = detail::build_with(g, out.plan, k, derive_seed(seed, {static_cast<std::uint64_t>(t)}), opt);
        out.attempts.push_back(r.report);
        const bool better = !best || r.report.pass || r.report.rho[0] > best->report.rho[0];
        if (better) best = std::move(r);
        if (best->report.pass) break;
    }
    out.report = best->report;
    out.report.attempts = static_cast<int>(out.attempts.size());
    out.report.seed = seed;
    out.graph = std::move(best->graph);
    return out;
}

}  // namespace fqgp
