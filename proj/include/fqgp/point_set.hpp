#pragma once

// Explicit point sets U of F_q^d with O(1) membership, their text format,
// and the point-count queries n_S = |U ∩ S|.

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "incidence.hpp"

namespace fqgp {

class PointSet {
public:
    PointSet(std::uint32_t q, int d) : sp_(q, d), index_(sp_.size(), -1) {}

    /// Throws on duplicates or ids outside the space.
    PointSet(std::uint32_t q, int d, std::vector<PointId> ids) : PointSet(q, d) {
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw std::invalid_argument("point set contains a duplicate point");
        if (!ids.empty() && ids.back() >= sp_.size()) throw std::invalid_argument("point id outside the space");
        ids_ = std::move(ids);
        for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = static_cast<std::int32_t>(i);
    }

    static PointSet full(std::uint32_t q, int d) {
        AffineSpace sp(q, d);
        std::vector<PointId> ids(sp.size());
        for (PointId x = 0; x < sp.size(); ++x) ids[x] = x;
        return PointSet(q, d, std::move(ids));
    }

    static PointSet from_points(std::uint32_t q, int d, const std::vector<Point>& pts) {
        AffineSpace sp(q, d);
        std::vector<PointId> ids;
        ids.reserve(pts.size());
        for (const Point& p : pts) ids.push_back(sp.id(p));
        return PointSet(q, d, std::move(ids));
    }

    const AffineSpace& space() const { return sp_; }
    std::uint32_t q() const { return sp_.q(); }
    int d() const { return sp_.d(); }
    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }

    /// Member ids in ascending (lexicographic) order.
    const std::vector<PointId>& ids() const { return ids_; }
    PointId id(std::size_t i) const { return ids_[i]; }
    Point point(std::size_t i) const { return sp_.point(ids_[i]); }

    bool contains(PointId x) const { return x < sp_.size() && index_[x] >= 0; }
    bool contains(const Point& p) const { return contains(sp_.id(p)); }
    /// Position of x in ids(), or -1.
    std::int32_t index_of(PointId x) const { return x < sp_.size() ? index_[x] : -1; }

    PointSet subset(const std::vector<std::size_t>& positions) const {
        std::vector<PointId> out;
        out.reserve(positions.size());
        for (std::size_t i : positions) out.push_back(ids_[i]);
        return PointSet(q(), d(), std::move(out));
    }

    friend bool operator==(const PointSet& a, const PointSet& b) { return a.sp_ == b.sp_ && a.ids_ == b.ids_; }

private:
    AffineSpace sp_;
    std::vector<PointId> ids_;
    std::vector<std::int32_t> index_;
};

inline std::size_t count_in(const PointSet& u, std::span<const PointId> s) {
    std::size_t n = 0;
    for (PointId x : s) n += u.contains(x);
    return n;
}

inline std::size_t count_in(const PointSet& u, const Flat& f) {
    if (f.q != u.q() || f.d != u.d()) throw std::invalid_argument("count_in: flat from a different space");
    if (f.size() <= u.size()) return count_in(u, points_of(u.space(), f));
    std::size_t n = 0;
    for (PointId x : u.ids()) n += contains(u.space(), f, x);
    return n;
}

/// The q + 1 pairs (P, P \ K) over planes P containing the line K (d = 3).
inline std::vector<std::pair<Flat, std::vector<PointId>>> partition_complement_by_planes(const AffineSpace& sp,
                                                                                          const Flat& line) {
    if (sp.d() != 3 || line.dim != 1) throw std::invalid_argument("partition_complement_by_planes: need a line in F_q^3");
    const std::vector<PointId> on_line = points_of(sp, line);
    std::vector<std::pair<Flat, std::vector<PointId>>> out;
    for (const Flat& p : flats_through(sp, line, 2)) {
        std::vector<PointId> rest;
        for (PointId x : points_of(sp, p))
            if (!std::binary_search(on_line.begin(), on_line.end(), x)) rest.push_back(x);
        out.emplace_back(p, std::move(rest));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format: first line "q d", then one point per line as residues.

inline void write_point_set(std::ostream& os, const PointSet& u) {
    os << u.q() << ' ' << u.d() << '\n';
    for (PointId x : u.ids()) {
        const Vec v = u.space().coords(x);
        for (int i = 0; i < u.d(); ++i) os << (i ? " " : "") << v[i];
        os << '\n';
    }
}

inline std::string to_text(const PointSet& u) {
    std::ostringstream os;
    write_point_set(os, u);
    return os.str();
}

inline PointSet read_point_set(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    auto next = [&](std::string& out) {
        while (std::getline(is, out)) {
            ++lineno;
            if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next(line)) throw std::runtime_error("point set: missing header");
    std::istringstream hs(line);
    long long q = 0, d = 0;
    if (!(hs >> q >> d) || q < 2 || q > kMaxModulus) throw std::runtime_error("point set: bad header '" + line + "'");
    require_prime_modulus(static_cast<std::uint32_t>(q));
    require_dimension(static_cast<int>(d));
    AffineSpace sp(static_cast<std::uint32_t>(q), static_cast<int>(d));
    std::vector<PointId> ids;
    while (next(line)) {
        std::istringstream ls(line);
        Vec v{};
        for (int i = 0; i < d; ++i) {
            long long c;
            if (!(ls >> c) || c < 0 || c >= q)
                throw std::runtime_error("point set: bad point on line " + std::to_string(lineno));
            v[i] = static_cast<std::uint32_t>(c);
        }
        std::string extra;
        if (ls >> extra) throw std::runtime_error("point set: extra field on line " + std::to_string(lineno));
        ids.push_back(sp.id(v));
    }
    return PointSet(sp.q(), sp.d(), std::move(ids));
}

inline PointSet from_text(const std::string& text) {
    std::istringstream is(text);
    return read_point_set(is);
}

}  // namespace fqgp
