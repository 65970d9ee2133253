#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fibreg {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

static_assert(sizeof(unsigned long) == sizeof(u64), "GMP ui entry points must take 64-bit arguments");

// ---------------------------------------------------------------------------
// Exact Fibonacci numbers
// ---------------------------------------------------------------------------

/// F_n with F_0 = 0, F_1 = F_2 = 1.
inline mpz_class fib(u64 n) {
    mpz_class out;
    mpz_fib_ui(out.get_mpz_t(), n);
    return out;
}

namespace detail {

struct U64Modulus {
    u64 m;

    u64 reduce(u64 a) const { return a % m; }
    u64 add(u64 a, u64 b) const {
        u64 s = a + b;  // m < 2^63, so no wrap
        return s >= m ? s - m : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + (m - b); }
    u64 mul(u64 a, u64 b) const { return static_cast<u64>((static_cast<u128>(a) * b) % m); }
    u64 zero() const { return 0; }
    u64 one() const { return 1 % m; }
};

struct MpzModulus {
    mpz_class m;

    mpz_class reduce(const mpz_class& a) const {
        mpz_class r;
        mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
        return r;
    }
    mpz_class add(const mpz_class& a, const mpz_class& b) const { return reduce(a + b); }
    mpz_class sub(const mpz_class& a, const mpz_class& b) const { return reduce(a - b); }
    mpz_class mul(const mpz_class& a, const mpz_class& b) const { return reduce(a * b); }
    mpz_class zero() const { return 0; }
    mpz_class one() const { return reduce(mpz_class(1)); }
};

// Fast doubling:
//   F(2k)   = F(k) * (2 F(k+1) - F(k))
//   F(2k+1) = F(k)^2 + F(k+1)^2
template <class Ring>
auto fast_doubling(u64 n, const Ring& ring) {
    auto a = ring.zero();  // F(k)
    auto b = ring.one();   // F(k+1)
    for (int bit = 63; bit >= 0; --bit) {
        auto c = ring.mul(a, ring.sub(ring.add(b, b), a));
        auto d = ring.add(ring.mul(a, a), ring.mul(b, b));
        if ((n >> bit) & 1u) {
            a = d;
            b = ring.add(c, d);
        } else {
            a = c;
            b = d;
        }
    }
    return std::pair{a, b};
}

}  // namespace detail

/// (F_n mod m, F_{n+1} mod m) in O(log n) modular steps.
inline std::pair<u64, u64> fib_pair_mod(u64 n, u64 m) {
    if (m < 2) throw std::invalid_argument("fib_pair_mod: modulus must be >= 2");
    if (m > (u64{1} << 62)) throw std::invalid_argument("fib_pair_mod: modulus too large for 64-bit path");
    return detail::fast_doubling(n, detail::U64Modulus{m});
}

inline std::pair<mpz_class, mpz_class> fib_pair_mod(u64 n, const mpz_class& m) {
    if (m < 2) throw std::invalid_argument("fib_pair_mod: modulus must be >= 2");
    return detail::fast_doubling(n, detail::MpzModulus{m});
}

// ---------------------------------------------------------------------------
// Valuations
// ---------------------------------------------------------------------------

/// Largest e with k^e | n.
inline unsigned nu(u64 k, u64 n) {
    if (k < 2) throw std::invalid_argument("nu: base must be >= 2");
    if (n == 0) throw std::domain_error("nu: valuation of 0 is undefined");
    unsigned e = 0;
    while (n % k == 0) {
        n /= k;
        ++e;
    }
    return e;
}

inline unsigned nu(u64 k, const mpz_class& n) {
    if (k < 2) throw std::invalid_argument("nu: base must be >= 2");
    if (n == 0) throw std::domain_error("nu: valuation of 0 is undefined");
    mpz_class q = n;
    unsigned e = 0;
    while (mpz_divisible_ui_p(q.get_mpz_t(), k)) {
        mpz_divexact_ui(q.get_mpz_t(), q.get_mpz_t(), k);
        ++e;
    }
    return e;
}

// ---------------------------------------------------------------------------
// Base-k digits
// ---------------------------------------------------------------------------

struct Digits {
    u64 base = 2;
    std::vector<u64> digits;  // least significant first; empty for 0
    u64 value = 0;

    u64 digit_sum() const { return std::accumulate(digits.begin(), digits.end(), u64{0}); }

    /// Length of the trailing block of zeros (0 for the value 0).
    std::size_t trailing_zero_count() const {
        std::size_t z = 0;
        while (z < digits.size() && digits[z] == 0) ++z;
        return z;
    }

    std::size_t length() const { return digits.size(); }
};

inline Digits to_digits(u64 n, u64 base) {
    if (base < 2) throw std::invalid_argument("to_digits: base must be >= 2");
    Digits d{base, {}, n};
    while (n != 0) {
        d.digits.push_back(n % base);
        n /= base;
    }
    return d;
}

/// Inverse of to_digits. Trailing most-significant zeros are accepted and dropped.
inline u64 from_digits(u64 base, std::span<const u64> digits) {
    if (base < 2) throw std::invalid_argument("from_digits: base must be >= 2");
    u64 value = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (*it >= base) throw std::invalid_argument("from_digits: digit out of range");
        if (__builtin_mul_overflow(value, base, &value) || __builtin_add_overflow(value, *it, &value))
            throw std::overflow_error("from_digits: value exceeds 64 bits");
    }
    return value;
}

// ---------------------------------------------------------------------------
// Periods
// ---------------------------------------------------------------------------

struct PeriodData {
    u64 modulus = 2;
    u64 pisano = 0;      // pi(m)
    u64 restricted = 0;  // alpha(m)

    bool restricted_divides_pisano() const { return restricted != 0 && pisano % restricted == 0; }
};

namespace detail {
inline void require_scan_modulus(u64 m, const char* what) {
    if (m < 2) throw std::invalid_argument(std::string(what) + ": modulus must be >= 2");
    if (m > (u64{1} << 62)) throw std::invalid_argument(std::string(what) + ": modulus too large");
}
}  // namespace detail

/// alpha(m): the smallest n >= 1 with m | F_n, by linear scan.
inline u64 restricted_period(u64 m) {
    detail::require_scan_modulus(m, "restricted_period");
    u64 a = 0, b = 1, n = 0;
    do {
        u64 s = a + b;
        a = b;
        b = s >= m ? s - m : s;
        ++n;
    } while (a != 0);
    return n;
}

/// pi(m): the smallest t >= 1 with (F_t, F_{t+1}) = (0, 1) mod m, by linear scan.
inline u64 pisano_period(u64 m) {
    detail::require_scan_modulus(m, "pisano_period");
    u64 a = 0, b = 1, n = 0;
    do {
        u64 s = a + b;
        a = b;
        b = s >= m ? s - m : s;
        ++n;
    } while (a != 0 || b != 1);
    return n;
}

/// pi(p^2) from pi(p). Any period mod p^2 is a multiple of pi(p), and
/// Q^{pi(p)} = I + pA (mod p^2) gives Q^{p pi(p)} = I, so pi(p^2) is pi(p)
/// or p * pi(p); one fast-doubling evaluation decides which.
inline u64 pisano_period_of_prime_square(u64 p, u64 pisano_p) {
    if (p < 2 || p > (u64{1} << 31)) throw std::invalid_argument("pisano_period_of_prime_square: p out of range");
    auto [f, g] = fib_pair_mod(pisano_p, p * p);
    if (f == 0 && g == 1) return pisano_p;
    return p * pisano_p;
}

inline PeriodData period_data(u64 m) { return PeriodData{m, pisano_period(m), restricted_period(m)}; }

// ---------------------------------------------------------------------------
// Primes
// ---------------------------------------------------------------------------

namespace detail {
inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) * b) % m); }

inline u64 powmod(u64 base, u64 exp, u64 m) {
    u64 r = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1u) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}
}  // namespace detail

/// Deterministic Miller-Rabin. The first thirteen primes as witnesses are
/// exact below 3.3e24, which covers every 64-bit input.
inline bool is_prime(u64 n) {
    constexpr u64 witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    if (n < 2) return false;
    for (u64 w : witnesses) {
        if (n == w) return true;
        if (n % w == 0) return false;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1u) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 w : witnesses) {
        u64 x = detail::powmod(w, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = detail::mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

inline std::vector<u64> primes_up_to(u64 limit) {
    std::vector<u64> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (u64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prime classes
// ---------------------------------------------------------------------------

enum class PrimeClass { Two, Five, OneFourMod5, ThirteenSeventeenMod20, ThreeSevenMod20 };

inline std::string_view to_string(PrimeClass c) {
    switch (c) {
        case PrimeClass::Two: return "Two";
        case PrimeClass::Five: return "Five";
        case PrimeClass::OneFourMod5: return "OneFourMod5";
        case PrimeClass::ThirteenSeventeenMod20: return "ThirteenSeventeenMod20";
        case PrimeClass::ThreeSevenMod20: return "ThreeSevenMod20";
    }
    return "?";
}

inline PrimeClass classify_prime(u64 p) {
    if (!is_prime(p)) throw std::invalid_argument("classify_prime: " + std::to_string(p) + " is not prime");
    if (p == 2) return PrimeClass::Two;
    if (p == 5) return PrimeClass::Five;
    switch (p % 5) {
        case 1:
        case 4: return PrimeClass::OneFourMod5;
        default: break;
    }
    u64 r = p % 20;
    if (r == 13 || r == 17) return PrimeClass::ThirteenSeventeenMod20;
    return PrimeClass::ThreeSevenMod20;
}

/// The Legendre symbol (5/p) for an odd prime p != 5, via quadratic reciprocity (p mod 5).
inline int legendre_five(u64 p) {
    if (p == 5) return 0;
    u64 r = p % 5;
    return (r == 1 || r == 4) ? 1 : -1;
}

}  // namespace fibreg
