#pragma once

// Points of the affine space F_q^d, d in {2, 3}.
//
// A point is identified by the integer id sum_i c_i q^(d-1-i). Ids therefore
// increase with the lexicographic order of the coordinate tuple, and that
// order is the one used for every tie-break in the library.

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "field.hpp"

namespace fqgp {

inline constexpr int kMaxDim = 3;

using Vec = std::array<std::uint32_t, kMaxDim>;
using PointId = std::uint32_t;

inline void require_dimension(int d) {
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("dimension " + std::to_string(d) + " not in {2, 3}");
}

/// A point of F_q^d. Unused trailing coordinates are zero.
class Point {
public:
    Point(std::uint32_t q, int d, Vec coords) : q_(q), d_(d), c_{} {
        require_prime_modulus(q);
        require_dimension(d);
        for (int i = 0; i < d; ++i) c_[i] = coords[i] % q;
    }

    std::uint32_t modulus() const { return q_; }
    int dim() const { return d_; }
    const Vec& coords() const { return c_; }
    FieldElement coord(int i) const { return PrimeField(q_)(c_.at(i)); }

    friend bool operator==(const Point&, const Point&) = default;
    friend std::strong_ordering operator<=>(const Point& a, const Point& b) {
        if (a.q_ != b.q_ || a.d_ != b.d_) throw std::invalid_argument("comparing points of different spaces");
        return a.c_ <=> b.c_;
    }

private:
    std::uint32_t q_;
    int d_;
    Vec c_;
};

/// Coordinate bookkeeping for F_q^d.
class AffineSpace {
public:
    AffineSpace(std::uint32_t q, int d) : q_(q), d_(d) {
        require_prime_modulus(q);
        require_dimension(d);
        std::uint64_t n = 1;
        for (int i = 0; i < d; ++i) n *= q;
        if (n > (1ull << 26)) throw std::invalid_argument("ambient space too large to index");
        size_ = static_cast<std::uint32_t>(n);
    }

    std::uint32_t q() const { return q_; }
    int d() const { return d_; }
    std::uint32_t size() const { return size_; }

    PointId id(const Vec& v) const {
        PointId r = 0;
        for (int i = 0; i < d_; ++i) r = r * q_ + v[i];
        return r;
    }
    PointId id(const Point& p) const {
        check(p);
        return id(p.coords());
    }
    Vec coords(PointId id) const {
        Vec v{};
        for (int i = d_ - 1; i >= 0; --i) {
            v[i] = id % q_;
            id /= q_;
        }
        return v;
    }
    Point point(PointId id) const { return Point(q_, d_, coords(id)); }

    Vec sub(const Vec& a, const Vec& b) const {
        Vec r{};
        for (int i = 0; i < d_; ++i) r[i] = sub_mod(a[i], b[i], q_);
        return r;
    }
    Vec add(const Vec& a, const Vec& b) const {
        Vec r{};
        for (int i = 0; i < d_; ++i) r[i] = add_mod(a[i], b[i], q_);
        return r;
    }
    Vec scale(const Vec& a, std::uint32_t s) const {
        Vec r{};
        for (int i = 0; i < d_; ++i) r[i] = mul_mod(a[i], s, q_);
        return r;
    }
    std::uint32_t dot(const Vec& a, const Vec& b) const {
        std::uint64_t s = 0;
        for (int i = 0; i < d_; ++i) s += static_cast<std::uint64_t>(a[i]) * b[i];
        return static_cast<std::uint32_t>(s % q_);
    }

    void check(const Point& p) const {
        if (p.modulus() != q_ || p.dim() != d_) throw std::invalid_argument("point belongs to a different space");
    }

    friend bool operator==(const AffineSpace&, const AffineSpace&) = default;

private:
    std::uint32_t q_;
    int d_;
    std::uint32_t size_;
};

}  // namespace fqgp
