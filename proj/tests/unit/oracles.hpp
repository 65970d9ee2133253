#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <random>
#include <string>

#include "fibreg/fib_core.hpp"

namespace fibreg::oracle {

/// nu_p(F_n) from the exact Fibonacci number.
inline unsigned exact_valuation(u64 p, u64 n) { return nu(p, fib(n)); }

/// Property-test RNG. FIBREG_TEST_SEED overrides the fixed default seed.
inline std::mt19937_64 property_rng() {
    u64 seed = 20240601;
    if (const char* env = std::getenv("FIBREG_TEST_SEED")) seed = std::stoull(env);
    return std::mt19937_64(seed);
}

inline u64 uniform(std::mt19937_64& rng, u64 lo, u64 hi) {
    return std::uniform_int_distribution<u64>(lo, hi)(rng);
}

}  // namespace fibreg::oracle
