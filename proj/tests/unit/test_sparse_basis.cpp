#include <gtest/gtest.h>

#include <gmpxx.h>

#include "fibreg/int_linalg.hpp"
#include "oracles.hpp"

using namespace fibreg;

namespace {

/// Rank over Q by textbook Gaussian elimination on rationals.
std::size_t rational_rank(std::vector<std::vector<mpq_class>> a) {
    std::size_t rank = 0;
    const std::size_t cols = a.empty() ? 0 : a[0].size();
    for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
        std::size_t piv = rank;
        while (piv < a.size() && a[piv][c] == 0) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[piv], a[rank]);
        for (std::size_t r = rank + 1; r < a.size(); ++r) {
            if (a[r][c] == 0) continue;
            const mpq_class f = a[r][c] / a[rank][c];
            for (std::size_t j = c; j < cols; ++j) a[r][j] -= f * a[rank][j];
        }
        ++rank;
    }
    return rank;
}

std::vector<std::vector<mpq_class>> to_rational(const std::vector<std::vector<i64>>& dense) {
    std::vector<std::vector<mpq_class>> out;
    for (const auto& row : dense) {
        std::vector<mpq_class> r;
        for (i64 x : row) r.emplace_back(static_cast<long>(x));
        out.push_back(std::move(r));
    }
    return out;
}

/// Random rows, some of them integer combinations of earlier rows.
std::vector<std::vector<i64>> random_family(std::mt19937_64& rng, std::size_t rows, std::size_t cols, i64 range) {
    std::vector<std::vector<i64>> out;
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<i64> row(cols, 0);
        if (r >= 2 && oracle::uniform(rng, 0, 2) == 0) {
            const auto& x = out[oracle::uniform(rng, 0, r - 1)];
            const auto& y = out[oracle::uniform(rng, 0, r - 1)];
            const i64 a = static_cast<i64>(oracle::uniform(rng, 0, 6)) - 3;
            const i64 b = static_cast<i64>(oracle::uniform(rng, 0, 6)) - 3;
            for (std::size_t c = 0; c < cols; ++c) row[c] = a * x[c] + b * y[c];
        } else {
            for (auto& x : row)
                if (oracle::uniform(rng, 0, 2) == 0)
                    x = static_cast<i64>(oracle::uniform(rng, 0, 2 * static_cast<u64>(range))) - range;
        }
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

TEST(IntMatrix, ProductAndIdentity) {
    const IntMatrix a(2, 3, {1, 2, 3, 4, 5, 6});
    const IntMatrix b(3, 2, {7, 8, 9, 10, 11, 12});
    EXPECT_EQ(a * b, IntMatrix(2, 2, {58, 64, 139, 154}));
    EXPECT_EQ(IntMatrix::identity(2) * a, a);
    EXPECT_THROW(a * a, std::invalid_argument);
    EXPECT_THROW(IntMatrix(2, 2, {1, 2, 3}), std::invalid_argument);
}

TEST(IntMatrix, ProductOverflowIsDetected) {
    const i64 big = i64{1} << 40;
    const IntMatrix a(1, 1, {big});
    EXPECT_THROW(a * a, std::overflow_error);
}

TEST(Hermite, SmallExample) {
    MpzMatrix m{{2, 4}, {1, 3}};
    auto [form, rank] = hermite_normal_form(m);
    EXPECT_EQ(rank, 2u);
    EXPECT_EQ(form, (MpzMatrix{{1, 1}, {0, 2}}));
}

TEST(Hermite, ShapeAndRankProperty) {
    auto rng = oracle::property_rng();
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = oracle::uniform(rng, 1, 7), cols = oracle::uniform(rng, 1, 7);
        const auto dense = random_family(rng, rows, cols, 20);
        MpzMatrix m;
        for (const auto& row : dense) {
            std::vector<mpz_class> r;
            for (i64 x : row) r.emplace_back(static_cast<long>(x));
            m.push_back(std::move(r));
        }
        auto [form, rank] = hermite_normal_form(m);
        ASSERT_EQ(rank, rational_rank(to_rational(dense)));
        std::size_t last_pivot = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            std::size_t c = 0;
            while (c < cols && form[r][c] == 0) ++c;
            if (r >= rank) {
                ASSERT_EQ(c, cols) << "row below rank must vanish";
                continue;
            }
            ASSERT_LT(c, cols);
            ASSERT_GT(form[r][c], 0);
            if (r > 0) {
                ASSERT_GT(c, last_pivot);
            }
            for (std::size_t above = 0; above < r; ++above) {
                ASSERT_GE(form[above][c], 0);
                ASSERT_LT(form[above][c], form[r][c]);
            }
            last_pivot = c;
        }
    }
}

TEST(Sparse, NormalizeAndCombine) {
    SparseVector<i64> v{{1, -4}, {3, 6}, {7, 10}};
    normalize(v);
    EXPECT_EQ(v, (SparseVector<i64>{{1, 2}, {3, -3}, {7, -5}}));
    const SparseVector<i64> x{{0, 1}, {2, 3}};
    const SparseVector<i64> y{{0, 2}, {1, 1}, {2, 6}};
    EXPECT_EQ(combine<i64>(2, x, 1, y), (SparseVector<i64>{{1, -1}}));
    EXPECT_EQ(sparse_from_dense<i64>({0, 5, 0, -1}), (SparseVector<i64>{{1, 5}, {3, -1}}));
}

TEST(EchelonBasis, RankMatchesRationalOracle) {
    auto rng = oracle::property_rng();
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t rows = oracle::uniform(rng, 1, 12), cols = oracle::uniform(rng, 1, 40);
        const auto dense = random_family(rng, rows, cols, 50);
        std::vector<SparseVector<i64>> sparse;
        EchelonBasis<i64> b64;
        EchelonBasis<mpz_class> bz;
        for (const auto& row : dense) {
            sparse.push_back(sparse_from_dense(row));
            b64.insert(sparse.back());
            bz.insert(convert_sparse<mpz_class>(sparse.back()));
        }
        const std::size_t expected = rational_rank(to_rational(dense));
        ASSERT_EQ(b64.rank(), expected);
        ASSERT_EQ(bz.rank(), expected);
        ASSERT_EQ(exact_rank(sparse), expected);
        for (const auto& v : sparse) ASSERT_TRUE(b64.in_span(v));
        auto pivots = b64.pivots();
        std::sort(pivots.begin(), pivots.end());
        ASSERT_TRUE(std::adjacent_find(pivots.begin(), pivots.end()) == pivots.end());
    }
}

TEST(EchelonBasis, InsertReportsIndependence) {
    EchelonBasis<i64> b;
    EXPECT_TRUE(b.insert({{0, 1}, {1, 1}}));
    EXPECT_TRUE(b.insert({{1, 1}, {2, 1}}));
    EXPECT_FALSE(b.insert({{0, 2}, {1, 4}, {2, 2}}));
    EXPECT_FALSE(b.insert({}));
    EXPECT_EQ(b.rank(), 2u);
    EXPECT_FALSE(b.in_span({{2, 1}}));
}

TEST(EchelonBasis, OverflowFallsBackToArbitraryPrecision) {
    auto rng = oracle::property_rng();
    const i64 big = i64{1} << 40;
    for (int trial = 0; trial < 30; ++trial) {
        const auto dense = random_family(rng, 8, 10, big);
        std::vector<SparseVector<i64>> sparse;
        for (const auto& row : dense) sparse.push_back(sparse_from_dense(row));
        EXPECT_EQ(exact_rank(sparse), rational_rank(to_rational(dense)));
    }
    // Leading entries are coprime, so the first elimination step multiplies them.
    EchelonBasis<i64> b;
    b.insert({{0, big + 1}, {1, 1}});
    EXPECT_THROW(b.insert({{0, big - 1}, {1, 1}}), elimination_overflow);
    EXPECT_EQ(exact_rank({{{0, big + 1}, {1, 1}}, {{0, big - 1}, {1, 1}}}), 2u);
}
