#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fibreg/fib_core.hpp"

namespace fibreg {

// ---------------------------------------------------------------------------
// Dense integer matrices (small, exact)
// ---------------------------------------------------------------------------

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
    IntMatrix(std::size_t rows, std::size_t cols, std::vector<i64> row_major)
        : rows_(rows), cols_(cols), data_(std::move(row_major)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("IntMatrix: data size does not match shape");
    }

    static IntMatrix identity(std::size_t n) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    i64& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    i64 operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<i64>& row_major() const { return data_; }

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("IntMatrix: shape mismatch in product");
        IntMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const i64 x = a(i, k);
                if (x == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    i64 term = 0;
                    if (__builtin_mul_overflow(x, b(k, j), &term) ||
                        __builtin_add_overflow(out(i, j), term, &out(i, j)))
                        throw std::overflow_error("IntMatrix: overflow in product");
                }
            }
        return out;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<i64> data_;
};

using MpzMatrix = std::vector<std::vector<mpz_class>>;

/// Row-style Hermite normal form by unimodular row operations: pivots
/// positive, entries below each pivot zero, entries above reduced into
/// [0, pivot). Returns the form and the number of nonzero rows.
inline std::pair<MpzMatrix, std::size_t> hermite_normal_form(MpzMatrix a) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < cols && pivot_row < rows; ++c) {
        // Euclid down the column until only the pivot row is nonzero.
        for (;;) {
            std::size_t best = rows;
            for (std::size_t r = pivot_row; r < rows; ++r)
                if (a[r][c] != 0 && (best == rows || abs(a[r][c]) < abs(a[best][c]))) best = r;
            if (best == rows) break;
            std::swap(a[pivot_row], a[best]);
            bool done = true;
            for (std::size_t r = pivot_row + 1; r < rows; ++r) {
                if (a[r][c] == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), a[r][c].get_mpz_t(), a[pivot_row][c].get_mpz_t());
                for (std::size_t j = c; j < cols; ++j) a[r][j] -= q * a[pivot_row][j];
                if (a[r][c] != 0) done = false;
            }
            if (done) break;
        }
        if (a[pivot_row][c] == 0) continue;
        if (a[pivot_row][c] < 0)
            for (auto& x : a[pivot_row]) x = -x;
        for (std::size_t r = 0; r < pivot_row; ++r) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), a[r][c].get_mpz_t(), a[pivot_row][c].get_mpz_t());
            if (q == 0) continue;
            for (std::size_t j = c; j < cols; ++j) a[r][j] -= q * a[pivot_row][j];
        }
        ++pivot_row;
    }
    return {std::move(a), pivot_row};
}

// ---------------------------------------------------------------------------
// Sparse integer vectors and an incremental echelon basis
// ---------------------------------------------------------------------------

/// Thrown by 64-bit elimination when an intermediate value would overflow.
class elimination_overflow : public std::overflow_error {
public:
    elimination_overflow() : std::overflow_error("integer elimination overflow") {}
};

namespace detail {

inline i64 checked_mul(i64 a, i64 b) {
    i64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw elimination_overflow();
    return r;
}
inline i64 checked_sub(i64 a, i64 b) {
    i64 r;
    if (__builtin_sub_overflow(a, b, &r)) throw elimination_overflow();
    return r;
}
inline mpz_class checked_mul(const mpz_class& a, const mpz_class& b) { return a * b; }
inline mpz_class checked_sub(const mpz_class& a, const mpz_class& b) { return a - b; }

inline i64 gcd_of(i64 a, i64 b) { return std::gcd(a, b); }
inline mpz_class gcd_of(const mpz_class& a, const mpz_class& b) { return gcd(a, b); }
inline i64 exact_div(i64 a, i64 b) { return a / b; }
inline mpz_class exact_div(const mpz_class& a, const mpz_class& b) {
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}
inline bool is_negative(i64 a) { return a < 0; }
inline bool is_negative(const mpz_class& a) { return a < 0; }

}  // namespace detail

template <class Scalar>
struct SparseEntry {
    std::size_t index;
    Scalar value;
    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Nonzero entries in strictly increasing index order.
template <class Scalar>
using SparseVector = std::vector<SparseEntry<Scalar>>;

template <class To, class From>
SparseVector<To> convert_sparse(const SparseVector<From>& v) {
    SparseVector<To> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if constexpr (std::is_same_v<To, mpz_class>)
            out.push_back({e.index, mpz_class(static_cast<long>(e.value))});
        else
            out.push_back({e.index, static_cast<To>(e.value)});
    }
    return out;
}

template <class Scalar>
SparseVector<Scalar> sparse_from_dense(const std::vector<Scalar>& dense) {
    SparseVector<Scalar> out;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i] != 0) out.push_back({i, dense[i]});
    return out;
}

/// Divide out the content and make the leading entry positive.
template <class Scalar>
void normalize(SparseVector<Scalar>& v) {
    if (v.empty()) return;
    Scalar g = 0;
    for (const auto& e : v) {
        g = detail::gcd_of(g, e.value);
        if (g == 1) break;
    }
    if (detail::is_negative(v.front().value)) g = -g;
    if (g == 1) return;
    for (auto& e : v) e.value = detail::exact_div(e.value, g);
}

/// a*x - b*y over sparse vectors.
template <class Scalar>
SparseVector<Scalar> combine(const Scalar& a, const SparseVector<Scalar>& x, const Scalar& b,
                             const SparseVector<Scalar>& y) {
    SparseVector<Scalar> out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].index < y[j].index)) {
            out.push_back({x[i].index, detail::checked_mul(a, x[i].value)});
            ++i;
        } else if (i == x.size() || y[j].index < x[i].index) {
            out.push_back({y[j].index, detail::checked_sub(Scalar(0), detail::checked_mul(b, y[j].value))});
            ++j;
        } else {
            Scalar v = detail::checked_sub(detail::checked_mul(a, x[i].value), detail::checked_mul(b, y[j].value));
            if (v != 0) out.push_back({x[i].index, std::move(v)});
            ++i;
            ++j;
        }
    }
    return out;
}

/**
 * Echelon basis over Q kept as primitive integer vectors with distinct
 * leading indices. Reduction is fraction-free: v <- (b_lead/g) v - (v_lead/g) b,
 * followed by content removal, so every vector stays integral and exact.
 * With Scalar = i64 any overflow throws elimination_overflow.
 */
template <class Scalar>
class EchelonBasis {
public:
    std::size_t rank() const { return rows_.size(); }
    const std::vector<SparseVector<Scalar>>& rows() const { return rows_; }

    /// Leading index of each stored row, in insertion order.
    std::vector<std::size_t> pivots() const {
        std::vector<std::size_t> out;
        out.reserve(rows_.size());
        for (const auto& r : rows_) out.push_back(r.front().index);
        return out;
    }

    /// Remainder of v after elimination; empty iff v is in the span.
    SparseVector<Scalar> reduce(SparseVector<Scalar> v) const {
        normalize(v);
        while (!v.empty()) {
            auto it = by_pivot_.find(v.front().index);
            if (it == by_pivot_.end()) break;
            const auto& b = rows_[it->second];
            const Scalar g = detail::gcd_of(b.front().value, v.front().value);
            const Scalar a = detail::exact_div(b.front().value, g);
            const Scalar c = detail::exact_div(v.front().value, g);
            v = combine(a, v, c, b);
            normalize(v);
        }
        return v;
    }

    bool in_span(const SparseVector<Scalar>& v) const { return reduce(v).empty(); }

    /// Inserts v if it is independent of the current rows.
    bool insert(const SparseVector<Scalar>& v) {
        auto r = reduce(v);
        if (r.empty()) return false;
        by_pivot_.emplace(r.front().index, rows_.size());
        rows_.push_back(std::move(r));
        return true;
    }

private:
    std::vector<SparseVector<Scalar>> rows_;
    std::unordered_map<std::size_t, std::size_t> by_pivot_;
};

/// Rank over Q of a family of integer vectors, exact. Tries 64-bit
/// elimination first and repeats in arbitrary precision on overflow.
inline std::size_t exact_rank(const std::vector<SparseVector<i64>>& vectors) {
    try {
        EchelonBasis<i64> basis;
        for (const auto& v : vectors) basis.insert(v);
        return basis.rank();
    } catch (const elimination_overflow&) {
        EchelonBasis<mpz_class> basis;
        for (const auto& v : vectors) basis.insert(convert_sparse<mpz_class>(v));
        return basis.rank();
    }
}

}  // namespace fibreg
