#include <gtest/gtest.h>

#include <fqgp/field.hpp>
#include <fqgp/rng.hpp>

using namespace fqgp;

TEST(Field, AddExamples) {
    PrimeField f5(5);
    EXPECT_EQ(field_add(f5(3), f5(4)).value(), 2u);
    for (int x = 0; x < 5; ++x) EXPECT_EQ(field_add(f5(0), f5(x)), f5(x));
    for (std::uint32_t q : {2u, 3u, 7u, 65521u}) {
        PrimeField f(q);
        EXPECT_TRUE(field_add(f(q - 1), f(1)).is_zero());
    }
}

TEST(Field, InverseExamples) {
    EXPECT_EQ(field_inv(PrimeField(5)(2)).value(), 3u);
    EXPECT_EQ(field_inv(PrimeField(11)(1)).value(), 1u);
    EXPECT_EQ(field_inv(PrimeField(7)(4)).value(), 2u);
}

// Inverse table by exhaustive search, independent of the Fermat route.
TEST(Field, InverseTableExhaustive) {
    for (std::uint32_t q = 2; q <= 31; ++q) {
        if (!is_prime(q)) continue;
        PrimeField f(q);
        for (std::uint32_t a = 1; a < q; ++a) {
            std::uint32_t found = 0;
            for (std::uint32_t b = 1; b < q; ++b)
                if ((a * b) % q == 1) found = b;
            EXPECT_EQ(field_inv(f(a)).value(), found) << "q=" << q << " a=" << a;
        }
    }
}

TEST(Field, Errors) {
    EXPECT_THROW(PrimeField(4), std::invalid_argument);
    EXPECT_THROW(PrimeField(1), std::invalid_argument);
    EXPECT_THROW(PrimeField(65537), std::invalid_argument);  // prime but above the cap
    EXPECT_THROW(FieldElement(1, 9), std::invalid_argument);
    EXPECT_THROW(field_inv(PrimeField(7)(0)), std::domain_error);
    EXPECT_THROW(field_add(PrimeField(5)(1), PrimeField(7)(1)), std::invalid_argument);
}

TEST(Field, AxiomsExhaustiveSmallFields) {
    for (std::uint32_t q : {2u, 3u, 5u, 7u, 11u, 13u}) {
        PrimeField f(q);
        for (std::uint32_t a = 0; a < q; ++a)
            for (std::uint32_t b = 0; b < q; ++b) {
                const auto x = f(a), y = f(b);
                EXPECT_EQ(x + y, y + x);
                EXPECT_EQ(x * y, y * x);
                EXPECT_EQ((x - y) + y, x);
                if (!y.is_zero()) { EXPECT_EQ(x * y * y.inverse(), x); }
                for (std::uint32_t c = 0; c < q; ++c) {
                    const auto z = f(c);
                    EXPECT_EQ((x + y) + z, x + (y + z));
                    EXPECT_EQ((x * y) * z, x * (y * z));
                    EXPECT_EQ(x * (y + z), x * y + x * z);
                }
            }
    }
}

TEST(SolveLinear, IdentitySystem) {
    Matrix id(5, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    auto s = solve_linear(id, {1, 2, 3});
    ASSERT_TRUE(s.consistent());
    EXPECT_EQ(s.rank, 3u);
    EXPECT_EQ(*s.particular, (std::vector<std::uint32_t>{1, 2, 3}));
    EXPECT_TRUE(s.kernel.empty());
}

TEST(SolveLinear, ZeroSystem) {
    Matrix z(3, {{0, 0}, {0, 0}});
    auto s = solve_linear(z, {0, 0});
    EXPECT_EQ(s.rank, 0u);
    EXPECT_EQ(s.kernel.size(), 2u);
    EXPECT_TRUE(s.consistent());
    EXPECT_FALSE(solve_linear(z, {1, 0}).consistent());
}

TEST(SolveLinear, KernelVectorsSolveHomogeneousSystem) {
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        const std::uint32_t q = 7;
        std::vector<std::vector<std::uint32_t>> rows(3, std::vector<std::uint32_t>(4));
        for (auto& r : rows)
            for (auto& x : r) x = static_cast<std::uint32_t>(rng.below(3) == 0 ? 0 : rng.below(q));
        Matrix m(q, rows);
        std::vector<std::uint32_t> rhs = {static_cast<std::uint32_t>(rng.below(q)), static_cast<std::uint32_t>(rng.below(q)),
                                          static_cast<std::uint32_t>(rng.below(q))};
        auto s = solve_linear(m, rhs);
        EXPECT_EQ(s.rank + s.kernel.size(), 4u);
        for (const auto& k : s.kernel)
            for (std::size_t i = 0; i < 3; ++i) {
                std::uint64_t acc = 0;
                for (std::size_t j = 0; j < 4; ++j) acc += std::uint64_t(m.at(i, j)) * k[j];
                EXPECT_EQ(acc % q, 0u);
            }
        if (s.consistent())
            for (std::size_t i = 0; i < 3; ++i) {
                std::uint64_t acc = 0;
                for (std::size_t j = 0; j < 4; ++j) acc += std::uint64_t(m.at(i, j)) * (*s.particular)[j];
                EXPECT_EQ(acc % q, rhs[i]);
            }
    }
}

// Vandermonde rows (1, x, x^2, x^3) for distinct x: the determinant is the
// product of differences, nonzero in a field, so the rank is 4.
TEST(SolveLinear, VandermondeFullRank) {
    const std::uint32_t q = 7;
    for (std::uint32_t a = 0; a < q; ++a)
        for (std::uint32_t b = a + 1; b < q; ++b)
            for (std::uint32_t c = b + 1; c < q; ++c)
                for (std::uint32_t e = c + 1; e < q; ++e) {
                    std::vector<std::vector<std::uint32_t>> rows;
                    for (std::uint32_t x : {a, b, c, e}) rows.push_back({1, x, x * x % q, x * x * x % q});
                    std::uint64_t det = 1;
                    const std::uint32_t xs[4] = {a, b, c, e};
                    for (int i = 0; i < 4; ++i)
                        for (int j = i + 1; j < 4; ++j) det = det * ((xs[j] + q - xs[i]) % q) % q;
                    ASSERT_NE(det, 0u);
                    EXPECT_EQ(rank(Matrix(q, rows)), 4u);
                }
}

TEST(RowReduce, Idempotent) {
    Rng rng(11);
    for (int t = 0; t < 300; ++t) {
        const std::uint32_t q = 5;
        std::vector<std::vector<std::uint32_t>> rows(3, std::vector<std::uint32_t>(4));
        for (auto& r : rows)
            for (auto& x : r) x = static_cast<std::uint32_t>(rng.below(q));
        auto once = row_reduce(Matrix(q, rows));
        auto twice = row_reduce(once.reduced);
        EXPECT_EQ(once.reduced, twice.reduced);
        EXPECT_EQ(once.pivots, twice.pivots);
    }
}

TEST(Rng, BernoulliSkipMatchesRate) {
    Rng rng(3);
    std::uint64_t kept = 0;
    const std::uint64_t n = 1'000'000;
    for_each_bernoulli(n, 0.01, rng, [&](std::uint64_t) { ++kept; });
    // mean 10^4, sd ~ 99.5
    EXPECT_NEAR(static_cast<double>(kept), 10000.0, 5 * 99.5);
    std::uint64_t last = 0, cnt = 0;
    bool ordered = true;
    for_each_bernoulli(1000, 0.1, rng, [&](std::uint64_t i) {
        if (cnt++ && i <= last) ordered = false;
        last = i;
    });
    EXPECT_TRUE(ordered);
    EXPECT_LT(last, 1000u);
}

TEST(Rng, DeriveSeedIsKeySensitive) {
    EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
    EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
    Rng a(5), b(5);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}
