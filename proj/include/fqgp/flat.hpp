#pragma once

/**
 * @file flat.hpp
 * @brief Canonical affine flats of F_q^d.
 *
 * A flat is stored as (lexicographically least point, reduced echelon basis of
 * its direction space). Two flats compare equal as records exactly when they
 * are equal as point sets, so flats can be used directly as map keys.
 */

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "space.hpp"

namespace fqgp {

struct Flat {
    std::uint32_t q = 0;
    int d = 0;
    int dim = 0;
    Vec base{};                        // zero at every pivot column of `dirs`
    std::array<Vec, kMaxDim> dirs{};   // rows [0, dim) in reduced echelon form

    std::uint64_t size() const {
        std::uint64_t s = 1;
        for (int i = 0; i < dim; ++i) s *= q;
        return s;
    }
    std::span<const Vec> directions() const { return {dirs.data(), static_cast<std::size_t>(dim)}; }

    friend bool operator==(const Flat&, const Flat&) = default;
    friend auto operator<=>(const Flat&, const Flat&) = default;
};

namespace detail {

inline int leading(const Vec& v, int d) {
    for (int i = 0; i < d; ++i)
        if (v[i]) return i;
    return -1;
}

/// Reduced echelon basis of span(vs); returns the number of rows kept.
inline int echelon_basis(const AffineSpace& sp, std::span<const Vec> vs, std::array<Vec, kMaxDim>& out) {
    const int d = sp.d();
    const std::uint32_t q = sp.q();
    std::vector<Vec> rows(vs.begin(), vs.end());
    int r = 0;
    for (int c = 0; c < d && r < static_cast<int>(rows.size()); ++c) {
        int piv = -1;
        for (int i = r; i < static_cast<int>(rows.size()); ++i)
            if (rows[i][c]) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[piv], rows[r]);
        rows[r] = sp.scale(rows[r], inv_mod(rows[r][c], q));
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            rows[i] = sp.sub(rows[i], sp.scale(rows[r], rows[i][c]));
        }
        ++r;
    }
    out = {};
    for (int i = 0; i < r; ++i) out[i] = rows[i];
    return r;
}

/// Reduce v modulo the echelon rows (zeroes v at every pivot column).
inline Vec reduce(const AffineSpace& sp, Vec v, std::span<const Vec> rows) {
    for (const Vec& row : rows) {
        const int p = leading(row, sp.d());
        if (v[p]) v = sp.sub(v, sp.scale(row, v[p]));
    }
    return v;
}

inline bool is_zero(const Vec& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

}  // namespace detail

/// Canonical flat through `base` with direction space span(directions).
inline Flat make_flat(const AffineSpace& sp, const Vec& base, std::span<const Vec> directions) {
    Flat f;
    f.q = sp.q();
    f.d = sp.d();
    f.dim = detail::echelon_basis(sp, directions, f.dirs);
    f.base = detail::reduce(sp, base, f.directions());
    return f;
}

/// Smallest flat containing every point of A.
inline Flat affine_span(const AffineSpace& sp, std::span<const PointId> a) {
    if (a.empty()) throw std::invalid_argument("affine_span of an empty set");
    const Vec b = sp.coords(a[0]);
    std::vector<Vec> diffs;
    diffs.reserve(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) diffs.push_back(sp.sub(sp.coords(a[i]), b));
    return make_flat(sp, b, diffs);
}

inline Flat affine_span(const AffineSpace& sp, std::initializer_list<PointId> a) {
    return affine_span(sp, std::span<const PointId>(a.begin(), a.size()));
}

inline Flat affine_span(const AffineSpace& sp, std::span<const Point> pts) {
    std::vector<PointId> ids;
    for (const Point& p : pts) ids.push_back(sp.id(p));
    return affine_span(sp, ids);
}

inline bool contains(const AffineSpace& sp, const Flat& f, PointId x) {
    return detail::is_zero(detail::reduce(sp, sp.sub(sp.coords(x), f.base), f.directions()));
}

/// Point ids of f in ascending order.
inline std::vector<PointId> points_of(const AffineSpace& sp, const Flat& f) {
    std::vector<PointId> out;
    out.reserve(f.size());
    std::array<std::uint32_t, kMaxDim> t{};
    for (std::uint64_t k = 0; k < f.size(); ++k) {
        Vec v = f.base;
        for (int i = 0; i < f.dim; ++i) v = sp.add(v, sp.scale(f.dirs[i], t[i]));
        out.push_back(sp.id(v));
        for (int i = 0; i < f.dim; ++i) {
            if (++t[i] < f.q) break;
            t[i] = 0;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Normalized (first nonzero coordinate 1) vectors that vanish on `zero_cols`.
inline std::vector<Vec> normalized_vectors(const AffineSpace& sp, const std::vector<bool>& zero_cols) {
    const int d = sp.d();
    const std::uint32_t q = sp.q();
    std::vector<int> free;
    for (int c = 0; c < d; ++c)
        if (!zero_cols[c]) free.push_back(c);
    std::vector<Vec> out;
    for (std::size_t lead = 0; lead < free.size(); ++lead) {
        const std::size_t rest = free.size() - lead - 1;
        std::uint64_t combos = 1;
        for (std::size_t i = 0; i < rest; ++i) combos *= q;
        for (std::uint64_t k = 0; k < combos; ++k) {
            Vec v{};
            v[free[lead]] = 1;
            std::uint64_t t = k;
            for (std::size_t i = free.size(); i-- > lead + 1;) {
                v[free[i]] = static_cast<std::uint32_t>(t % q);
                t /= q;
            }
            out.push_back(v);
        }
    }
    return out;
}

/// Every i-flat containing K (dim K must be i - 1), canonical and sorted.
inline std::vector<Flat> flats_through(const AffineSpace& sp, const Flat& k, int i) {
    if (i < 1 || i > sp.d() || k.dim != i - 1)
        throw std::invalid_argument("flats_through: need 1 <= i <= d and dim(K) = i - 1");
    std::vector<bool> pivot(sp.d(), false);
    for (const Vec& r : k.directions()) pivot[detail::leading(r, sp.d())] = true;
    std::vector<Flat> out;
    for (const Vec& v : normalized_vectors(sp, pivot)) {
        std::vector<Vec> dirs(k.directions().begin(), k.directions().end());
        dirs.push_back(v);
        out.push_back(make_flat(sp, k.base, dirs));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Every i-flat of F_q^d exactly once, sorted.
inline std::vector<Flat> enumerate_flats(const AffineSpace& sp, int i) {
    const int d = sp.d();
    const std::uint32_t q = sp.q();
    if (i < 0 || i > d) throw std::invalid_argument("enumerate_flats: dimension out of range");
    std::vector<Flat> out;
    // Pivot sets as bitmasks of size i.
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        if (__builtin_popcount(mask) != i) continue;
        std::vector<int> piv;
        for (int c = 0; c < d; ++c)
            if (mask >> c & 1) piv.push_back(c);
        // Free echelon entries: row r, column c > piv[r], c not a pivot.
        std::vector<std::pair<int, int>> slots;
        for (int r = 0; r < i; ++r)
            for (int c = piv[r] + 1; c < d; ++c)
                if (!(mask >> c & 1)) slots.emplace_back(r, c);
        std::vector<int> base_cols;
        for (int c = 0; c < d; ++c)
            if (!(mask >> c & 1)) base_cols.push_back(c);
        std::uint64_t n_dirs = 1, n_base = 1;
        for (std::size_t s = 0; s < slots.size(); ++s) n_dirs *= q;
        for (std::size_t s = 0; s < base_cols.size(); ++s) n_base *= q;
        for (std::uint64_t kd = 0; kd < n_dirs; ++kd) {
            Flat f;
            f.q = q;
            f.d = d;
            f.dim = i;
            for (int r = 0; r < i; ++r) f.dirs[r][piv[r]] = 1;
            std::uint64_t t = kd;
            for (auto [r, c] : slots) {
                f.dirs[r][c] = static_cast<std::uint32_t>(t % q);
                t /= q;
            }
            for (std::uint64_t kb = 0; kb < n_base; ++kb) {
                f.base = {};
                std::uint64_t u = kb;
                for (int c : base_cols) {
                    f.base[c] = static_cast<std::uint32_t>(u % q);
                    u /= q;
                }
                out.push_back(f);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// K minus the spans of every proper nonempty subset of A (|A| in {2, 3}).
inline std::vector<PointId> punctured_flat(const AffineSpace& sp, std::span<const PointId> a) {
    if (a.size() < 2 || a.size() > 3) throw std::invalid_argument("punctured_flat needs 2 or 3 points");
    const Flat k = affine_span(sp, a);
    if (k.dim != static_cast<int>(a.size()) - 1) throw std::invalid_argument("punctured_flat: degenerate point set");
    std::vector<Flat> holes;
    const unsigned full = (1u << a.size()) - 1;
    for (unsigned m = 1; m < full; ++m) {
        std::vector<PointId> sub;
        for (std::size_t j = 0; j < a.size(); ++j)
            if (m >> j & 1) sub.push_back(a[j]);
        holes.push_back(affine_span(sp, sub));
    }
    std::vector<PointId> out;
    for (PointId x : points_of(sp, k)) {
        bool hit = false;
        for (const Flat& h : holes)
            if (contains(sp, h, x)) {
                hit = true;
                break;
            }
        if (!hit) out.push_back(x);
    }
    return out;
}

inline std::vector<PointId> punctured_flat(const AffineSpace& sp, std::initializer_list<PointId> a) {
    return punctured_flat(sp, std::span<const PointId>(a.begin(), a.size()));
}

}  // namespace fqgp
