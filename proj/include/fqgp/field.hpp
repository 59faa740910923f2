#pragma once

/**
 * @file field.hpp
 * @brief Prime field arithmetic and linear algebra over F_q.
 *
 * Elements carry their modulus so that mixing elements of different fields
 * is caught at runtime. The modulus is capped at 2^16, which keeps every
 * product inside 32-bit arithmetic.
 */

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fqgp {

inline constexpr std::uint32_t kMaxModulus = 1u << 16;

constexpr bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint32_t k = 3; k * k <= n; k += 2)
        if (n % k == 0) return false;
    return true;
}

/// Throws std::invalid_argument unless q is a prime in [2, 2^16].
inline void require_prime_modulus(std::uint32_t q) {
    if (q < 2 || q > kMaxModulus)
        throw std::invalid_argument("modulus " + std::to_string(q) + " outside [2, 65536]");
    if (!is_prime(q))
        throw std::invalid_argument("modulus " + std::to_string(q) + " is not prime");
}

// Raw residue arithmetic used by the hot loops. Callers guarantee a, b < q.
constexpr std::uint32_t add_mod(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
    std::uint32_t s = a + b;
    return s >= q ? s - q : s;
}
constexpr std::uint32_t sub_mod(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
    return a >= b ? a - b : a + q - b;
}
constexpr std::uint32_t mul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) % q);
}
constexpr std::uint32_t pow_mod(std::uint32_t a, std::uint64_t e, std::uint32_t q) {
    std::uint32_t r = 1 % q;
    while (e) {
        if (e & 1) r = mul_mod(r, a, q);
        a = mul_mod(a, a, q);
        e >>= 1;
    }
    return r;
}
/// Inverse by Fermat; q prime, a != 0.
inline std::uint32_t inv_mod(std::uint32_t a, std::uint32_t q) {
    if (a % q == 0) throw std::domain_error("inverse of zero requested");
    return pow_mod(a, q - 2, q);
}

class FieldElement {
public:
    /// Validates that the modulus is prime; the value is reduced mod q.
    FieldElement(std::uint32_t value, std::uint32_t modulus) : value_(0), q_(modulus) {
        require_prime_modulus(modulus);
        value_ = value % modulus;
    }

    std::uint32_t value() const { return value_; }
    std::uint32_t modulus() const { return q_; }
    bool is_zero() const { return value_ == 0; }

    friend FieldElement operator+(FieldElement a, FieldElement b) {
        check_same(a, b);
        return {Unchecked{}, add_mod(a.value_, b.value_, a.q_), a.q_};
    }
    friend FieldElement operator-(FieldElement a, FieldElement b) {
        check_same(a, b);
        return {Unchecked{}, sub_mod(a.value_, b.value_, a.q_), a.q_};
    }
    friend FieldElement operator*(FieldElement a, FieldElement b) {
        check_same(a, b);
        return {Unchecked{}, mul_mod(a.value_, b.value_, a.q_), a.q_};
    }
    FieldElement operator-() const { return {Unchecked{}, sub_mod(0, value_, q_), q_}; }

    FieldElement inverse() const { return {Unchecked{}, inv_mod(value_, q_), q_}; }
    FieldElement pow(std::uint64_t e) const { return {Unchecked{}, pow_mod(value_, e, q_), q_}; }

    friend bool operator==(const FieldElement&, const FieldElement&) = default;

    friend std::ostream& operator<<(std::ostream& os, const FieldElement& x) { return os << x.value_; }

private:
    struct Unchecked {};
    FieldElement(Unchecked, std::uint32_t value, std::uint32_t modulus) : value_(value), q_(modulus) {}
    friend class PrimeField;

    static void check_same(const FieldElement& a, const FieldElement& b) {
        if (a.q_ != b.q_) throw std::invalid_argument("field element modulus mismatch");
    }

    std::uint32_t value_;
    std::uint32_t q_;
};

inline FieldElement field_add(FieldElement a, FieldElement b) { return a + b; }
inline FieldElement field_mul(FieldElement a, FieldElement b) { return a * b; }
inline FieldElement field_inv(FieldElement a) { return a.inverse(); }

/// Factory for elements of a fixed, verified prime field.
class PrimeField {
public:
    explicit PrimeField(std::uint32_t q) : q_(q) { require_prime_modulus(q); }

    std::uint32_t order() const { return q_; }
    FieldElement operator()(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(q_);
        if (r < 0) r += q_;
        return {FieldElement::Unchecked{}, static_cast<std::uint32_t>(r), q_};
    }
    FieldElement zero() const { return (*this)(0); }
    FieldElement one() const { return (*this)(1); }

private:
    std::uint32_t q_;
};

// ---------------------------------------------------------------------------
// Dense matrices over F_q

class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, std::uint32_t q) : rows_(rows), cols_(cols), q_(q), a_(rows * cols, 0) {
        require_prime_modulus(q);
    }
    Matrix(std::uint32_t q, const std::vector<std::vector<std::uint32_t>>& rows)
        : Matrix(rows.size(), rows.empty() ? 0 : rows.front().size(), q) {
        for (std::size_t i = 0; i < rows_; ++i) {
            if (rows[i].size() != cols_) throw std::invalid_argument("ragged matrix rows");
            for (std::size_t j = 0; j < cols_; ++j) at(i, j) = rows[i][j] % q_;
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint32_t modulus() const { return q_; }

    std::uint32_t& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    std::uint32_t at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_, cols_;
    std::uint32_t q_;
    std::vector<std::uint32_t> a_;
};

struct Echelon {
    Matrix reduced;
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
    std::size_t rank() const { return pivots.size(); }
};

/// Reduced row echelon form. Zero rows are moved to the bottom.
inline Echelon row_reduce(Matrix m) {
    const std::uint32_t q = m.modulus();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t piv = r;
        while (piv < m.rows() && m.at(piv, c) == 0) ++piv;
        if (piv == m.rows()) continue;
        if (piv != r)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(piv, j), m.at(r, j));
        const std::uint32_t inv = inv_mod(m.at(r, c), q);
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(r, j) = mul_mod(m.at(r, j), inv, q);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m.at(i, c) == 0) continue;
            const std::uint32_t f = m.at(i, c);
            for (std::size_t j = 0; j < m.cols(); ++j)
                m.at(i, j) = sub_mod(m.at(i, j), mul_mod(f, m.at(r, j), q), q);
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Matrix& m) { return row_reduce(m).rank(); }

/// Solution set of A x = b: empty, or particular + span(kernel).
struct LinearSolution {
    std::size_t rank = 0;
    std::optional<std::vector<std::uint32_t>> particular;  // free variables set to zero
    std::vector<std::vector<std::uint32_t>> kernel;        // one vector per free column, ascending
    bool consistent() const { return particular.has_value(); }
};

inline LinearSolution solve_linear(const Matrix& a, const std::vector<std::uint32_t>& rhs) {
    if (rhs.size() != a.rows()) throw std::invalid_argument("rhs length does not match matrix rows");
    const std::uint32_t q = a.modulus();
    const std::size_t n = a.cols();
    Matrix aug(a.rows(), n + 1, q);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, n) = rhs[i] % q;
    }
    Echelon e = row_reduce(std::move(aug));

    LinearSolution out;
    std::vector<std::size_t> coef_pivots;
    bool inconsistent = false;
    for (std::size_t p : e.pivots) {
        if (p == n) inconsistent = true;
        else coef_pivots.push_back(p);
    }
    out.rank = coef_pivots.size();

    std::vector<bool> is_pivot(n, false);
    for (std::size_t p : coef_pivots) is_pivot[p] = true;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<std::uint32_t> v(n, 0);
        v[f] = 1;
        for (std::size_t r = 0; r < coef_pivots.size(); ++r)
            v[coef_pivots[r]] = sub_mod(0, e.reduced.at(r, f), q);
        out.kernel.push_back(std::move(v));
    }
    if (!inconsistent) {
        std::vector<std::uint32_t> x(n, 0);
        for (std::size_t r = 0; r < coef_pivots.size(); ++r) x[coef_pivots[r]] = e.reduced.at(r, n);
        out.particular = std::move(x);
    }
    return out;
}

}  // namespace fqgp
