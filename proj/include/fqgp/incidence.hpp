#pragma once

// Integer-indexed incidence structure of F_q^d.
//
// Hyperplanes are numbered  normal_index * q + c  for the hyperplane a.x = c,
// where a runs over normalized normals (first nonzero coordinate 1).
// Lines are numbered  direction_index * q^(d-1) + code(base), where base is
// the line's point with a zero at the direction's leading coordinate and
// code() packs the remaining d-1 coordinates.
//
// One instance per (q, d) is built on first use and then shared read-only.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "flat.hpp"

namespace fqgp {

class Incidence {
public:
    Incidence(std::uint32_t q, int d) : sp_(q, d) {
        n_points_ = sp_.size();
        coords_.resize(static_cast<std::size_t>(n_points_) * kMaxDim);
        for (PointId x = 0; x < n_points_; ++x) {
            const Vec v = sp_.coords(x);
            for (int i = 0; i < kMaxDim; ++i) coords_[x * kMaxDim + i] = static_cast<std::uint16_t>(v[i]);
        }
        normals_ = normalized_vectors(sp_, std::vector<bool>(d, false));
        std::uint32_t off = 0;
        for (int l = 0; l < d; ++l) {
            lead_offset_[l] = off;
            std::uint32_t c = 1;
            for (int i = l + 1; i < d; ++i) c *= q;
            off += c;
        }
        qpow_d1_ = 1;
        for (int i = 1; i < d; ++i) qpow_d1_ *= q;
    }

    const AffineSpace& space() const { return sp_; }
    std::uint32_t q() const { return sp_.q(); }
    int d() const { return sp_.d(); }
    std::uint32_t num_points() const { return n_points_; }
    std::uint32_t num_normals() const { return static_cast<std::uint32_t>(normals_.size()); }
    std::uint32_t num_hyperplanes() const { return num_normals() * q(); }
    std::uint32_t num_lines() const { return num_normals() * qpow_d1_; }
    const Vec& normal(std::uint32_t k) const { return normals_[k]; }

    std::uint32_t coord(PointId x, int i) const { return coords_[x * kMaxDim + i]; }

    std::uint32_t dot_normal(std::uint32_t k, PointId x) const {
        const Vec& a = normals_[k];
        std::uint64_t s = 0;
        for (int i = 0; i < d(); ++i) s += static_cast<std::uint64_t>(a[i]) * coord(x, i);
        return static_cast<std::uint32_t>(s % q());
    }
    std::uint32_t hyperplane(std::uint32_t normal_k, PointId x) const { return normal_k * q() + dot_normal(normal_k, x); }

    /// Index of a normalized vector (leading coordinate 1).
    std::uint32_t normal_index(const Vec& v) const {
        const int l = detail::leading(v, d());
        std::uint32_t code = 0;
        for (int i = l + 1; i < d(); ++i) code = code * q() + v[i];
        return lead_offset_[l] + code;
    }

    std::uint32_t line_id(PointId x, PointId y) const {
        const std::uint32_t qq = q();
        Vec dir{};
        int l = -1;
        for (int i = 0; i < d(); ++i) {
            dir[i] = sub_mod(coord(y, i), coord(x, i), qq);
            if (l < 0 && dir[i]) l = i;
        }
        const std::uint32_t s = inv_mod(dir[l], qq);
        std::uint32_t code = 0, idx = 0;
        const std::uint32_t t = coord(x, l);  // base = x - t * dir (after normalizing dir)
        for (int i = 0; i < d(); ++i) {
            dir[i] = mul_mod(dir[i], s, qq);
            if (i == l) continue;
            code = code * qq + sub_mod(coord(x, i), mul_mod(t, dir[i], qq), qq);
        }
        for (int i = l + 1; i < d(); ++i) idx = idx * qq + dir[i];
        return (lead_offset_[l] + idx) * qpow_d1_ + code;
    }
    std::uint32_t line_direction(std::uint32_t line) const { return line / qpow_d1_; }

    /// The line through x with direction normals_[k].
    std::uint32_t line_through(PointId x, std::uint32_t k) const {
        const std::uint32_t qq = q();
        const Vec& dir = normals_[k];
        const int l = detail::leading(dir, d());
        const std::uint32_t t = coord(x, l);
        std::uint32_t code = 0;
        for (int i = 0; i < d(); ++i)
            if (i != l) code = code * qq + sub_mod(coord(x, i), mul_mod(t, dir[i], qq), qq);
        return k * qpow_d1_ + code;
    }

    /// Hyperplane id of the plane through three non-collinear points (d = 3).
    std::uint32_t plane_through(PointId a, PointId b, PointId c) const {
        const std::uint32_t qq = q();
        std::uint32_t u[3], v[3];
        for (int i = 0; i < 3; ++i) {
            u[i] = sub_mod(coord(b, i), coord(a, i), qq);
            v[i] = sub_mod(coord(c, i), coord(a, i), qq);
        }
        Vec nrm{sub_mod(mul_mod(u[1], v[2], qq), mul_mod(u[2], v[1], qq), qq),
                sub_mod(mul_mod(u[2], v[0], qq), mul_mod(u[0], v[2], qq), qq),
                sub_mod(mul_mod(u[0], v[1], qq), mul_mod(u[1], v[0], qq), qq)};
        const int l = detail::leading(nrm, 3);
        if (l < 0) throw std::invalid_argument("plane_through: collinear points");
        const std::uint32_t s = inv_mod(nrm[l], qq);
        for (auto& x : nrm) x = mul_mod(x, s, qq);
        return hyperplane(normal_index(nrm), a);
    }

    /// Hyperplane ids through a line (d = 3): the q + 1 planes containing it.
    template <class Fn>
    void for_each_plane_through_line(std::uint32_t line, PointId on_line, Fn&& fn) const {
        for (std::uint32_t k : normals_perp()[line_direction(line)]) fn(hyperplane(k, on_line));
    }

    /// For each direction, the normals orthogonal to it (q + 1 of them when d = 3).
    const std::vector<std::vector<std::uint32_t>>& normals_perp() const {
        std::call_once(perp_once_, [this] {
            normals_perp_.resize(normals_.size());
            for (std::uint32_t k = 0; k < normals_.size(); ++k)
                for (std::uint32_t j = 0; j < normals_.size(); ++j)
                    if (sp_.dot(normals_[k], normals_[j]) == 0) normals_perp_[k].push_back(j);
        });
        return normals_perp_;
    }

    bool collinear(PointId a, PointId b, PointId c) const { return line_id(a, b) == line_id(a, c); }

    Flat hyperplane_flat(std::uint32_t h) const {
        const Vec& a = normals_[h / q()];
        const std::uint32_t c = h % q();
        std::vector<Vec> dirs;
        std::vector<bool> none(d(), false);
        for (const Vec& v : normalized_vectors(sp_, none))
            if (sp_.dot(a, v) == 0) dirs.push_back(v);
        const int l = detail::leading(a, d());
        Vec base{};
        base[l] = c;  // a[l] = 1
        return make_flat(sp_, base, dirs);
    }

    Flat line_flat(std::uint32_t line) const {
        const Vec& dir = normals_[line_direction(line)];
        const int l = detail::leading(dir, d());
        std::uint32_t code = line % qpow_d1_;
        Vec base{};
        for (int i = d() - 1; i >= 0; --i) {
            if (i == l) continue;
            base[i] = code % q();
            code /= q();
        }
        const Vec dirs[1] = {dir};
        return make_flat(sp_, base, dirs);
    }

    std::uint32_t hyperplane_id(const Flat& f) const {
        if (f.dim != d() - 1) throw std::invalid_argument("hyperplane_id: not a hyperplane");
        // Normal: the normalized vector orthogonal to every direction.
        for (std::uint32_t k = 0; k < num_normals(); ++k) {
            bool ok = true;
            for (const Vec& v : f.directions())
                if (sp_.dot(normals_[k], v) != 0) {
                    ok = false;
                    break;
                }
            if (ok) return k * q() + sp_.dot(normals_[k], f.base);
        }
        throw std::logic_error("hyperplane without normal");
    }

    /// Ascending point ids of every hyperplane; built on first call.
    const std::vector<std::vector<PointId>>& hyperplane_points() const {
        std::call_once(hp_once_, [this] {
            hp_points_.assign(num_hyperplanes(), {});
            for (auto& v : hp_points_) v.reserve(n_points_ / q());
            for (PointId x = 0; x < n_points_; ++x)
                for (std::uint32_t k = 0; k < num_normals(); ++k) hp_points_[hyperplane(k, x)].push_back(x);
        });
        return hp_points_;
    }

private:
    AffineSpace sp_;
    std::uint32_t n_points_ = 0;
    std::uint32_t qpow_d1_ = 1;
    std::vector<std::uint16_t> coords_;
    std::vector<Vec> normals_;
    std::array<std::uint32_t, kMaxDim> lead_offset_{};
    mutable std::once_flag perp_once_;
    mutable std::vector<std::vector<std::uint32_t>> normals_perp_;
    mutable std::once_flag hp_once_;
    mutable std::vector<std::vector<PointId>> hp_points_;
};

/// Shared incidence structure for (q, d).
inline const Incidence& incidence(std::uint32_t q, int d) {
    static std::mutex mu;
    static std::map<std::pair<std::uint32_t, int>, std::unique_ptr<Incidence>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{q, d}];
    if (!slot) slot = std::make_unique<Incidence>(q, d);
    return *slot;
}

}  // namespace fqgp
