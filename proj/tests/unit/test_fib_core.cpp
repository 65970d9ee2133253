#include <gtest/gtest.h>

#include <stdexcept>

#include "fibreg/fib_core.hpp"
#include "oracles.hpp"

using namespace fibreg;

TEST(Fib, SmallAndLargeValues) {
    EXPECT_EQ(fib(0), 0);
    EXPECT_EQ(fib(1), 1);
    EXPECT_EQ(fib(12), 144);
    EXPECT_EQ(fib(100), mpz_class("354224848179261915075"));
}

TEST(FibPairMod, FrozenValues) {
    EXPECT_EQ(fib_pair_mod(12, 1000), (std::pair<u64, u64>{144, 233}));
    EXPECT_EQ(fib_pair_mod(10, 11), (std::pair<u64, u64>{0, 1}));
    EXPECT_EQ(fib_pair_mod(0, 7), (std::pair<u64, u64>{0, 1}));
}

TEST(FibPairMod, AgreesWithIterationForRandomModuli) {
    auto rng = oracle::property_rng();
    for (int trial = 0; trial < 40; ++trial) {
        const u64 m = oracle::uniform(rng, 2, trial < 20 ? 1000 : (u64{1} << 62));
        u64 a = 0, b = 1;
        for (u64 n = 0; n < 600; ++n) {
            ASSERT_EQ(fib_pair_mod(n, m), (std::pair<u64, u64>{a, b})) << "m=" << m << " n=" << n;
            const u64 s = static_cast<u64>((static_cast<u128>(a) + b) % m);
            a = b;
            b = s;
        }
    }
}

TEST(FibPairMod, MpzOverloadMatchesExactFibonacci) {
    const mpz_class m = mpz_class("1000000000000000000000007");
    for (u64 n : {0ull, 1ull, 50ull, 131ull, 400ull}) {
        auto [f, g] = fib_pair_mod(n, m);
        EXPECT_EQ(f, mpz_class(fib(n) % m));
        EXPECT_EQ(g, mpz_class(fib(n + 1) % m));
    }
}

TEST(FibPairMod, RejectsBadModulus) {
    EXPECT_THROW(fib_pair_mod(5, 1), std::invalid_argument);
    EXPECT_THROW(fib_pair_mod(5, (u64{1} << 62) + 1), std::invalid_argument);
}

TEST(Nu, FrozenValues) {
    EXPECT_EQ(nu(3, 162), 4u);
    EXPECT_EQ(nu(10, 100), 2u);
    EXPECT_EQ(nu(3, 54), 3u);
    EXPECT_EQ(nu(7, 1), 0u);
    EXPECT_EQ(nu(2, mpz_class(1) << 200), 200u);
}

TEST(Nu, ZeroIsRejected) {
    EXPECT_THROW(nu(3, 0), std::domain_error);
    EXPECT_THROW(nu(3, mpz_class(0)), std::domain_error);
}

TEST(Nu, DefinitionProperty) {
    auto rng = oracle::property_rng();
    for (int trial = 0; trial < 2000; ++trial) {
        const u64 k = oracle::uniform(rng, 2, 30);
        const u64 n = oracle::uniform(rng, 1, 1'000'000);
        const unsigned v = nu(k, n);
        u64 kv = 1;
        for (unsigned i = 0; i < v; ++i) kv *= k;
        ASSERT_EQ(n % kv, 0u);
        ASSERT_NE((n / kv) % k, 0u);
    }
}

TEST(Digits, RoundTripAndStatistics) {
    auto rng = oracle::property_rng();
    for (int trial = 0; trial < 2000; ++trial) {
        const u64 base = oracle::uniform(rng, 2, 300);
        const u64 n = oracle::uniform(rng, 0, u64{1} << 50);
        const Digits d = to_digits(n, base);
        ASSERT_EQ(d.value, n);
        ASSERT_EQ(from_digits(base, d.digits), n);
        u64 sum = 0;
        for (u64 x : d.digits) {
            ASSERT_LT(x, base);
            sum += x;
        }
        ASSERT_EQ(d.digit_sum(), sum);
        if (n != 0) {
            ASSERT_EQ(d.trailing_zero_count(), nu(base, n));
            ASSERT_NE(d.digits.back(), 0u);
        }
    }
}

TEST(Digits, Examples) {
    const Digits d = to_digits(13310, 11);  // 10 * 11^3
    EXPECT_EQ(d.digits, (std::vector<u64>{0, 0, 0, 10}));
    EXPECT_EQ(d.trailing_zero_count(), 3u);
    EXPECT_EQ(d.digit_sum(), 10u);
    EXPECT_EQ(to_digits(1670, 11).digits, (std::vector<u64>{9, 8, 2, 1}));
    EXPECT_TRUE(to_digits(0, 7).digits.empty());
}

TEST(Periods, FrozenValues) {
    struct Row {
        u64 m, alpha, pi;
    };
    for (auto r : {Row{2, 3, 3}, Row{5, 5, 20}, Row{7, 8, 16}, Row{11, 10, 10}, Row{47, 16, 32}, Row{2209, 752, 1504},
                   Row{121, 110, 110}, Row{10, 15, 60}}) {
        EXPECT_EQ(restricted_period(r.m), r.alpha) << r.m;
        EXPECT_EQ(pisano_period(r.m), r.pi) << r.m;
    }
    EXPECT_EQ(restricted_period(113), 19u);
    EXPECT_EQ(restricted_period(233), 13u);
    EXPECT_EQ(restricted_period(29), 14u);
}

TEST(Periods, ScanAgreesWithDefinition) {
    for (u64 m = 2; m <= 200; ++m) {
        const u64 a = restricted_period(m);
        const u64 p = pisano_period(m);
        EXPECT_EQ(fib_pair_mod(a, m).first, 0u);
        for (u64 n = 1; n < a; ++n) ASSERT_NE(fib_pair_mod(n, m).first, 0u);
        EXPECT_EQ(fib_pair_mod(p, m), (std::pair<u64, u64>{0, 1}));
    }
}

TEST(Periods, RestrictedDividesPisano) {
    for (u64 m = 2; m <= 500; ++m) EXPECT_TRUE(period_data(m).restricted_divides_pisano()) << m;
}

TEST(Periods, RestrictedDividesPMinusLegendre) {
    for (u64 p : primes_up_to(5000)) {
        if (p == 2 || p == 5) continue;
        const i64 target = static_cast<i64>(p) - legendre_five(p);
        EXPECT_EQ(target % static_cast<i64>(restricted_period(p)), 0) << p;
    }
}

TEST(Periods, PisanoDividesClassModulus) {
    for (u64 p : primes_up_to(5000)) {
        if (p == 2 || p == 5) continue;
        const u64 pi = pisano_period(p);
        if (legendre_five(p) == 1)
            EXPECT_EQ((p - 1) % pi, 0u) << p;
        else
            EXPECT_EQ((2 * (p + 1)) % pi, 0u) << p;
    }
}

TEST(Periods, FourAlphaEqualsPiForThirteenSeventeenMod20) {
    std::size_t checked = 0;
    for (u64 p : primes_up_to(10000)) {
        if (p % 20 != 13 && p % 20 != 17) continue;
        EXPECT_EQ(4 * restricted_period(p), pisano_period(p)) << p;
        ++checked;
    }
    EXPECT_GT(checked, 300u);
}

TEST(Periods, PrimeSquareLiftMatchesScan) {
    for (u64 p : primes_up_to(200)) EXPECT_EQ(pisano_period_of_prime_square(p, pisano_period(p)), pisano_period(p * p)) << p;
}

TEST(Periods, RejectSmallModulus) {
    EXPECT_THROW(restricted_period(1), std::invalid_argument);
    EXPECT_THROW(pisano_period(0), std::invalid_argument);
}

TEST(Primes, MillerRabinAgreesWithSieve) {
    const auto primes = primes_up_to(100000);
    std::vector<bool> sieve(100001, false);
    for (u64 p : primes) sieve[p] = true;
    for (u64 n = 0; n <= 100000; ++n) ASSERT_EQ(is_prime(n), sieve[n]) << n;
    EXPECT_EQ(primes.size(), 9592u);
}

TEST(Primes, LargeCases) {
    EXPECT_TRUE(is_prime(18446744073709551557ull));  // largest 64-bit prime
    EXPECT_TRUE(is_prime((u64{1} << 61) - 1));
    EXPECT_FALSE(is_prime(3215031751ull));  // strong pseudoprime to bases 2, 3, 5, 7
    EXPECT_FALSE(is_prime(3825123056546413051ull));  // strong pseudoprime to bases 2..23
    EXPECT_FALSE(is_prime(u64{1} << 61));
}

TEST(Primes, Classification) {
    EXPECT_EQ(classify_prime(2), PrimeClass::Two);
    EXPECT_EQ(classify_prime(5), PrimeClass::Five);
    EXPECT_EQ(classify_prime(11), PrimeClass::OneFourMod5);
    EXPECT_EQ(classify_prime(29), PrimeClass::OneFourMod5);
    EXPECT_EQ(classify_prime(13), PrimeClass::ThirteenSeventeenMod20);
    EXPECT_EQ(classify_prime(113), PrimeClass::ThirteenSeventeenMod20);
    EXPECT_EQ(classify_prime(3), PrimeClass::ThreeSevenMod20);
    EXPECT_EQ(classify_prime(47), PrimeClass::ThreeSevenMod20);
    EXPECT_THROW(classify_prime(4), std::invalid_argument);
    EXPECT_THROW(classify_prime(1), std::invalid_argument);
}

TEST(Primes, LegendreFiveByEulerCriterion) {
    for (u64 p : primes_up_to(2000)) {
        if (p == 2 || p == 5) continue;
        const u64 e = detail::powmod(5, (p - 1) / 2, p);
        EXPECT_EQ(legendre_five(p), e == 1 ? 1 : -1) << p;
    }
}
