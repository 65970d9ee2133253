#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "fibreg/fib_core.hpp"

namespace fibreg {

namespace detail {

/// nu_p(F_n) read off F_n mod p^k, doubling k until the residue is nonzero.
inline unsigned valuation_by_residue(u64 p, u64 n, unsigned k) {
    if (n == 0) throw std::domain_error("valuation of F_0 = 0 is undefined");
    k = std::max(k, 1u);
    for (;;) {
        mpz_class modulus;
        mpz_ui_pow_ui(modulus.get_mpz_t(), p, k);
        mpz_class residue;
        if (modulus <= mpz_class((u64{1} << 62))) {
            residue = static_cast<unsigned long>(fib_pair_mod(n, modulus.get_ui()).first);
        } else {
            residue = fib_pair_mod(n, modulus).first;
        }
        if (residue != 0) return nu(p, residue);
        k *= 2;
    }
}

inline i64 floor_mod(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

/// Inverse of a modulo m, gcd(a, m) = 1, m >= 1.
inline i64 inverse_mod(i64 a, i64 m) {
    i64 old_r = floor_mod(a, m), r = m, old_s = 1, s = 0;
    while (r != 0) {
        i64 q = old_r / r;
        std::tie(old_r, r) = std::pair{r, old_r - q * r};
        std::tie(old_s, s) = std::pair{s, old_s - q * s};
    }
    return floor_mod(old_s, m);
}

}  // namespace detail

/**
 * Closed form for nu_p(F_m):
 *
 *   p = 2:  nu_2(m) + 2 if m = 0 mod 6, 1 if m = 3 mod 6, else 0
 *   p = 5:  nu_5(m)
 *   else:   nu_p(m) + nu_p(F_alpha(p)) if alpha(p) | m, else 0
 *
 * alpha(p) and nu_p(F_alpha(p)) are computed once at construction, so each
 * term costs one division and (on the support) one valuation.
 */
class FibValuation {
public:
    explicit FibValuation(u64 p) : p_(p) {
        if (!is_prime(p)) throw std::invalid_argument("FibValuation: " + std::to_string(p) + " is not prime");
        alpha_ = restricted_period(p);
        val_at_alpha_ = detail::valuation_by_residue(p, alpha_, 3);
    }

    u64 prime() const { return p_; }
    u64 alpha() const { return alpha_; }
    unsigned val_at_alpha() const { return val_at_alpha_; }

    unsigned operator()(u64 m) const {
        if (m == 0) throw std::domain_error("lengyel_valuation: n must be >= 1");
        if (p_ == 2) {
            switch (m % 6) {
                case 0: return nu(2, m) + 2;
                case 3: return 1;
                default: return 0;
            }
        }
        if (p_ == 5) return nu(5, m);
        if (m % alpha_ != 0) return 0;
        return nu(p_, m) + val_at_alpha_;
    }

    /// Calls f(t, value) for every t < count with value = nu_p(F_{first + stride t}) != 0,
    /// in increasing t. Every nonzero term has alpha(p) | index (for p = 2, 5 as well),
    /// so only that residue class is visited.
    template <class F>
    void for_each_nonzero(u64 first, u64 stride, u64 count, F&& f) const {
        if (count == 0) return;
        u64 last = 0;
        if (__builtin_mul_overflow(stride, count - 1, &last) || __builtin_add_overflow(last, first, &last))
            throw std::overflow_error("FibValuation: progression index exceeds 64 bits");
        if (first == 0) throw std::domain_error("FibValuation: progression starts at F_0");
        // Solve first + stride t = 0 (mod alpha).
        const i64 a = static_cast<i64>(alpha_);
        const i64 s = static_cast<i64>(stride % alpha_);
        const i64 target = detail::floor_mod(-static_cast<i64>(first % alpha_), a);
        const i64 g = std::gcd(s, a);
        if (target % g != 0) return;
        const i64 period = a / g;
        const i64 t0 = period == 1 ? 0
                                   : detail::floor_mod((target / g) * detail::inverse_mod(s / g, period), period);
        for (u64 t = static_cast<u64>(t0); t < count; t += static_cast<u64>(period)) {
            unsigned v = (*this)(first + stride * t);
            if (v != 0) f(t, v);
        }
    }

private:
    u64 p_;
    u64 alpha_ = 0;
    unsigned val_at_alpha_ = 0;
};

inline unsigned lengyel_valuation(u64 p, u64 n) {
    if (n == 0) throw std::domain_error("lengyel_valuation: n must be >= 1");
    return FibValuation(p)(n);
}

/**
 * Independent oracle: nu_p(F_n) from F_n mod p^K with
 * K = nu_p(n) + nu_p(F_alpha(p)) + 4, escalating K if the residue vanishes.
 * The predicted exponent only sizes the modulus; correctness comes from the
 * residue itself.
 */
class DirectValuation {
public:
    explicit DirectValuation(u64 p) : p_(p) {
        if (!is_prime(p)) throw std::invalid_argument("DirectValuation: " + std::to_string(p) + " is not prime");
        slack_ = detail::valuation_by_residue(p, restricted_period(p), 3) + 4;
    }

    unsigned operator()(u64 n) const {
        if (n == 0) throw std::domain_error("direct_valuation: n must be >= 1");
        return detail::valuation_by_residue(p_, n, nu(p_, n) + slack_);
    }

private:
    u64 p_;
    unsigned slack_ = 4;
};

inline unsigned direct_valuation(u64 p, u64 n) {
    if (n == 0) throw std::domain_error("direct_valuation: n must be >= 1");
    return DirectValuation(p)(n);
}

// ---------------------------------------------------------------------------
// Digit-sum invariance
// ---------------------------------------------------------------------------

class precondition_violation : public std::invalid_argument {
public:
    precondition_violation(const std::string& what, std::vector<std::string> failed)
        : std::invalid_argument(what), failed_(std::move(failed)) {}
    const std::vector<std::string>& failed_hypotheses() const { return failed_; }

private:
    std::vector<std::string> failed_;
};

/// For p = 1,4 mod 5: nu_p(F_n) depends only on s_p(n) mod alpha(p) and the
/// number of trailing base-p zeros. Checks both hypotheses for (n, m), then
/// that the valuations agree, and returns the common value.
inline unsigned digit_sum_invariance_check(u64 p, u64 n, u64 m) {
    std::vector<std::string> failed;
    if (!is_prime(p)) throw std::invalid_argument("digit_sum_invariance_check: p is not prime");
    if (n == 0 || m == 0) throw std::domain_error("digit_sum_invariance_check: n and m must be >= 1");
    if (classify_prime(p) != PrimeClass::OneFourMod5) failed.push_back("p is not congruent to 1 or 4 mod 5");

    const FibValuation val(p);
    const Digits dn = to_digits(n, p);
    const Digits dm = to_digits(m, p);
    const u64 sn = dn.digit_sum() % val.alpha();
    const u64 sm = dm.digit_sum() % val.alpha();
    if (sn != sm)
        failed.push_back("digit sums differ mod alpha(p) = " + std::to_string(val.alpha()) + ": " +
                         std::to_string(sn) + " vs " + std::to_string(sm));
    if (dn.trailing_zero_count() != dm.trailing_zero_count())
        failed.push_back("trailing zero counts differ: " + std::to_string(dn.trailing_zero_count()) + " vs " +
                         std::to_string(dm.trailing_zero_count()));
    if (!failed.empty()) {
        std::string msg = "digit_sum_invariance_check: hypotheses not met:";
        for (const auto& f : failed) msg += " [" + f + "]";
        throw precondition_violation(msg, std::move(failed));
    }

    const unsigned vn = val(n);
    const unsigned vm = val(m);
    if (vn != vm)
        throw std::logic_error("digit-sum invariance violated for p=" + std::to_string(p) + ", n=" +
                               std::to_string(n) + ", m=" + std::to_string(m));
    return vn;
}

// ---------------------------------------------------------------------------
// Wall's question
// ---------------------------------------------------------------------------

struct WallReport {
    u64 p = 0;
    u64 alpha = 0;
    unsigned val_at_alpha = 0;  // nu_p(F_alpha(p))
    u64 pi_p = 0;
    u64 pi_p2 = 0;
    bool wall_negative = false;  // nu_p(F_alpha(p)) == 1

    /// wall_negative <=> pi(p^2) != pi(p)
    bool consistent() const { return val_at_alpha >= 1 && wall_negative == (pi_p2 != pi_p); }
};

inline WallReport wall_check(u64 p) {
    if (!is_prime(p)) throw std::invalid_argument("wall_check: " + std::to_string(p) + " is not prime");
    WallReport r;
    r.p = p;
    r.alpha = restricted_period(p);
    r.val_at_alpha = detail::valuation_by_residue(p, r.alpha, 3);
    r.pi_p = pisano_period(p);
    r.pi_p2 = pisano_period_of_prime_square(p, r.pi_p);
    r.wall_negative = r.val_at_alpha == 1;
    return r;
}

}  // namespace fibreg
