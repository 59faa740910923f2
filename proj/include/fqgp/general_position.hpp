#pragma once

/**
 * @file general_position.hpp
 * @brief General-position predicates, subset classification, the moment
 *        curve, and maximum general-position search.
 *
 * A set is in general position when no d + 1 of its points lie in a common
 * hyperplane. Every search below tracks, for each hyperplane, how many chosen
 * points it holds; a hyperplane holding d chosen points blocks all of its
 * other points.
 */

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "point_set.hpp"
#include "rng.hpp"

namespace fqgp {

/// Dimension of the affine span of a set of point ids.
inline int span_dim(const AffineSpace& sp, std::span<const PointId> pts) { return affine_span(sp, pts).dim; }

inline bool is_general_position(const PointSet& s) {
    const int d = s.d();
    if (s.size() <= static_cast<std::size_t>(d)) return true;
    const Incidence& inc = incidence(s.q(), d);
    std::vector<std::uint32_t> count(inc.num_hyperplanes(), 0);
    for (PointId x : s.ids())
        for (std::uint32_t k = 0; k < inc.num_normals(); ++k)
            if (++count[inc.hyperplane(k, x)] > static_cast<std::uint32_t>(d)) return false;
    return true;
}

/// i-subsets of U split by whether they span an (i-1)-flat. Entries are
/// positions into U.ids(), ascending; unused slots are zero.
struct SubsetClassification {
    int i = 0;
    std::vector<std::array<std::uint32_t, 4>> general;
    std::vector<std::array<std::uint32_t, 4>> degenerate;
};

inline SubsetClassification classify_subsets(const PointSet& u, int i) {
    if (i < 1 || i > u.d() + 1 || i > 4) throw std::invalid_argument("classify_subsets: i must be in [1, d+1]");
    SubsetClassification out;
    out.i = i;
    const std::uint32_t n = static_cast<std::uint32_t>(u.size());
    if (n < static_cast<std::uint32_t>(i)) return out;
    std::array<std::uint32_t, 4> idx{};
    for (int k = 0; k < i; ++k) idx[k] = k;
    std::array<PointId, 4> pts{};
    for (;;) {
        for (int k = 0; k < i; ++k) pts[k] = u.id(idx[k]);
        const int dim = span_dim(u.space(), std::span<const PointId>(pts.data(), i));
        (dim == i - 1 ? out.general : out.degenerate).push_back(idx);
        int k = i - 1;
        while (k >= 0 && idx[k] == n - i + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int j = k + 1; j < i; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

/// The moment curve {(x, x^2, ..., x^d)}.
inline PointSet moment_curve(std::uint32_t q, int d) {
    require_prime_modulus(q);
    require_dimension(d);
    if (q < static_cast<std::uint32_t>(d)) throw std::invalid_argument("moment_curve: q must be at least d");
    AffineSpace sp(q, d);
    std::vector<PointId> ids;
    for (std::uint32_t x = 0; x < q; ++x) {
        Vec v{};
        std::uint32_t p = 1;
        for (int i = 0; i < d; ++i) {
            p = mul_mod(p, x, q);
            v[i] = p;
        }
        ids.push_back(sp.id(v));
    }
    return PointSet(q, d, std::move(ids));
}

// ---------------------------------------------------------------------------

namespace detail {

/// Incremental hyperplane-counter state over the points of U.
class Packing {
public:
    explicit Packing(const PointSet& u) : u_(u), d_(u.d()) {
        const Incidence& inc = incidence(u.q(), u.d());
        nn_ = inc.num_normals();
        const std::size_t n = u.size();
        hp_.resize(n * nn_);
        std::vector<std::int32_t> local(inc.num_hyperplanes(), -1);
        for (std::size_t v = 0; v < n; ++v)
            for (std::uint32_t k = 0; k < nn_; ++k) {
                const std::uint32_t h = inc.hyperplane(k, u.id(v));
                if (local[h] < 0) {
                    local[h] = static_cast<std::int32_t>(members_.size());
                    members_.emplace_back();
                }
                hp_[v * nn_ + k] = static_cast<std::uint32_t>(local[h]);
                members_[local[h]].push_back(static_cast<std::uint32_t>(v));
            }
        count_.assign(members_.size(), 0);
        blocked_.assign(n, 0);
        chosen_.assign(n, 0);
    }

    std::size_t n() const { return u_.size(); }
    int d() const { return d_; }
    std::uint32_t num_normals() const { return nn_; }
    bool allowed(std::uint32_t v) const { return !chosen_[v] && blocked_[v] == 0; }
    bool chosen(std::uint32_t v) const { return chosen_[v]; }
    std::uint32_t hyperplane_of(std::uint32_t v, std::uint32_t k) const { return hp_[v * nn_ + k]; }
    std::uint32_t count(std::uint32_t local_h) const { return count_[local_h]; }

    void add(std::uint32_t v) {
        chosen_[v] = 1;
        for (std::uint32_t k = 0; k < nn_; ++k) {
            const std::uint32_t h = hp_[v * nn_ + k];
            if (++count_[h] == static_cast<std::uint32_t>(d_))
                for (std::uint32_t w : members_[h]) ++blocked_[w];
        }
    }
    void remove(std::uint32_t v) {
        chosen_[v] = 0;
        for (std::uint32_t k = 0; k < nn_; ++k) {
            const std::uint32_t h = hp_[v * nn_ + k];
            if (count_[h]-- == static_cast<std::uint32_t>(d_))
                for (std::uint32_t w : members_[h]) --blocked_[w];
        }
    }

private:
    const PointSet& u_;
    int d_;
    std::uint32_t nn_ = 0;
    std::vector<std::uint32_t> hp_;
    std::vector<std::vector<std::uint32_t>> members_;
    std::vector<std::uint32_t> count_;
    std::vector<std::uint32_t> blocked_;
    std::vector<std::uint8_t> chosen_;
};

inline PointSet witness_from_positions(const PointSet& u, const std::vector<std::uint32_t>& pos) {
    std::vector<PointId> ids;
    for (std::uint32_t p : pos) ids.push_back(u.id(p));
    return PointSet(u.q(), u.d(), std::move(ids));
}

}  // namespace detail

struct SearchResult {
    std::size_t size = 0;
    PointSet witness;
    bool optimal = false;
    std::uint64_t nodes = 0;
};

struct ExactBudget {
    std::uint64_t node_limit = 5'000'000;
};

/// Branch and bound over hyperplane counters. Returns the best set found; the
/// optimal flag is set only when the search ran to completion.
inline SearchResult max_general_position_exact(const PointSet& u, ExactBudget budget = {}) {
    const int d = u.d();
    const std::size_t n = u.size();
    SearchResult res{0, PointSet(u.q(), d), false, 0};
    if (n <= static_cast<std::size_t>(d) + 1) {
        if (n <= static_cast<std::size_t>(d) || span_dim(u.space(), u.ids()) == d) {
            res.size = n;
            res.witness = u;
        } else {
            std::vector<PointId> first(u.ids().begin(), u.ids().begin() + d);
            res.size = d;
            res.witness = PointSet(u.q(), d, first);
        }
        res.optimal = true;
        return res;
    }

    detail::Packing pk(u);
    const std::uint32_t classes = std::min<std::uint32_t>(pk.num_normals(), 8);
    std::vector<std::uint32_t> chosen, best;
    std::uint64_t nodes = 0;
    bool aborted = false;

    auto partition_bound = [&](std::span<const std::uint32_t> cand) {
        std::size_t bound = cand.size();
        for (std::uint32_t k = 0; k < classes; ++k) {
            std::size_t b = 0;
            // Each candidate lies in exactly one hyperplane of this parallel class.
            std::vector<std::uint32_t> hs;
            hs.reserve(cand.size());
            for (std::uint32_t v : cand) hs.push_back(pk.hyperplane_of(v, k));
            std::sort(hs.begin(), hs.end());
            for (std::size_t i = 0; i < hs.size();) {
                std::size_t j = i;
                while (j < hs.size() && hs[j] == hs[i]) ++j;
                const std::size_t room = static_cast<std::size_t>(d) - pk.count(hs[i]);
                b += std::min(room, j - i);
                i = j;
            }
            bound = std::min(bound, b);
        }
        return bound;
    };

    auto dfs = [&](auto&& self, std::vector<std::uint32_t>& cand) -> void {
        if (++nodes > budget.node_limit) {
            aborted = true;
            return;
        }
        if (chosen.size() > best.size()) best = chosen;
        if (chosen.size() + cand.size() <= best.size()) return;
        if (chosen.size() + partition_bound(cand) <= best.size()) return;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (chosen.size() + (cand.size() - i) <= best.size()) return;
            const std::uint32_t v = cand[i];
            pk.add(v);
            chosen.push_back(v);
            std::vector<std::uint32_t> next;
            next.reserve(cand.size() - i - 1);
            for (std::size_t j = i + 1; j < cand.size(); ++j)
                if (pk.allowed(cand[j])) next.push_back(cand[j]);
            self(self, next);
            chosen.pop_back();
            pk.remove(v);
            if (aborted) return;
        }
    };

    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0u);
    dfs(dfs, all);

    std::sort(best.begin(), best.end());
    res.size = best.size();
    res.witness = detail::witness_from_positions(u, best);
    res.optimal = !aborted;
    res.nodes = nodes;
    return res;
}

struct HeuristicResult {
    std::size_t size = 0;
    PointSet witness;
};

/// Randomized greedy insertion with remove-one/add-two local search.
/// Round 0 starts from `hint` (points of U, in order), round 1 from the
/// moment curve's points inside U; later rounds use random orders.
inline HeuristicResult max_general_position_heuristic(const PointSet& u, std::uint64_t seed, int rounds = 20,
                                                      std::span<const PointId> hint = {}) {
    const std::size_t n = u.size();
    HeuristicResult best{0, PointSet(u.q(), u.d())};
    if (n == 0) return best;
    detail::Packing pk(u);
    std::vector<std::uint32_t> best_set;
    std::vector<std::uint32_t> seeded_curve;
    if (u.q() >= static_cast<std::uint32_t>(u.d()))
        for (PointId x : moment_curve(u.q(), u.d()).ids())
            if (u.contains(x)) seeded_curve.push_back(static_cast<std::uint32_t>(u.index_of(x)));

    for (int round = 0; round < std::max(rounds, 1); ++round) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(round)}));
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::uint32_t> front;
        if (round == 0)
            for (PointId x : hint)
                if (u.contains(x)) front.push_back(static_cast<std::uint32_t>(u.index_of(x)));
        if (round == 1) front = seeded_curve;
        if (!front.empty()) {
            std::vector<std::uint8_t> seen(n, 0);
            for (std::uint32_t v : front) seen[v] = 1;
            std::vector<std::uint32_t> rest;
            for (std::uint32_t v : order)
                if (!seen[v]) rest.push_back(v);
            order = front;
            order.insert(order.end(), rest.begin(), rest.end());
        }

        std::vector<std::uint32_t> cur;
        for (std::uint32_t v : order)
            if (pk.allowed(v)) {
                pk.add(v);
                cur.push_back(v);
            }

        bool improved = true;
        while (improved) {
            improved = false;
            std::vector<std::uint32_t> trial = cur;
            std::shuffle(trial.begin(), trial.end(), rng);
            for (std::uint32_t w : trial) {
                pk.remove(w);
                std::vector<std::uint32_t> free;
                for (std::uint32_t v = 0; v < n; ++v)
                    if (v != w && pk.allowed(v)) free.push_back(v);
                std::shuffle(free.begin(), free.end(), rng);
                std::vector<std::uint32_t> added;
                for (std::uint32_t v : free)
                    if (pk.allowed(v)) {
                        pk.add(v);
                        added.push_back(v);
                    }
                if (added.size() >= 2) {
                    cur.erase(std::find(cur.begin(), cur.end(), w));
                    cur.insert(cur.end(), added.begin(), added.end());
                    improved = true;
                    break;
                }
                for (std::uint32_t v : added) pk.remove(v);
                pk.add(w);
            }
        }

        if (cur.size() > best_set.size()) best_set = cur;
        for (std::uint32_t v : cur) pk.remove(v);
    }
    std::sort(best_set.begin(), best_set.end());
    best.size = best_set.size();
    best.witness = detail::witness_from_positions(u, best_set);
    return best;
}

}  // namespace fqgp
