#include <gtest/gtest.h>

#include <stdexcept>

#include "fibreg/linear_rep.hpp"
#include "fibreg/representations.hpp"
#include "oracles.hpp"

using namespace fibreg;

TEST(LinearRep, ValidateRejectsInconsistentShapes) {
    LinearRep rep = build_nu_k(3);
    EXPECT_NO_THROW(rep.validate());
    LinearRep bad = rep;
    bad.matrices.pop_back();
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = rep;
    bad.kappa.push_back(0);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = rep;
    bad.matrices[0] = IntMatrix(3, 3);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(LinearRep, NuKMatricesAreTheTwoByTwoPattern) {
    for (u64 k = 2; k <= 10; ++k) {
        const LinearRep rep = build_nu_k(k);
        EXPECT_EQ(rep.dimension, 2u);
        for (u64 i = 0; i + 1 < k; ++i) EXPECT_EQ(rep.matrices[i], IntMatrix(2, 2, {0, 0, -1, 1}));
        EXPECT_EQ(rep.matrices[k - 1], IntMatrix(2, 2, {0, 1, -1, 2}));
        EXPECT_EQ(rep.lambda, (std::vector<i64>{1, 0}));
        EXPECT_EQ(rep.kappa, (std::vector<i64>{0, 1}));
    }
}

TEST(LinearRep, NuKEvaluatesValuationOfSuccessor) {
    for (u64 k = 2; k <= 12; ++k) {
        const LinearRep rep = build_nu_k(k);
        const RepEvaluator ev(rep);
        for (u64 n = 0; n <= 3000; ++n) ASSERT_EQ(ev(n), nu(k, n + 1)) << "k=" << k << " n=" << n;
    }
}

TEST(LinearRep, LeadingZeroDigitsDoNotChangeValue) {
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 29ull}) {
        const LinearRep rep = build_for_prime(p);
        const RepEvaluator ev(rep);
        auto rng = oracle::property_rng();
        for (int trial = 0; trial < 200; ++trial) {
            auto d = to_digits(oracle::uniform(rng, 0, 1'000'000), p).digits;
            const mpz_class base = ev.evaluate_digits(d);
            for (int pad = 0; pad < 3; ++pad) {
                d.push_back(0);
                ASSERT_EQ(ev.evaluate_digits(d), base) << "p=" << p;
            }
        }
    }
}

TEST(LinearRep, GeneratorValuesMatchTheirDefinitions) {
    // p = 2 generators: nu_2(F_{n+1}), nu_2(F_{2n+1}), nu_2(F_{2n+2}), nu_2(F_{4n+1}), nu_2(F_{4n+3}).
    const LinearRep rep = build_p2();
    const RepEvaluator ev(rep);
    const FibValuation v(2);
    for (u64 n = 0; n <= 2000; ++n) {
        const auto g = ev.generator_values(n);
        ASSERT_EQ(g[0], v(n + 1));
        ASSERT_EQ(g[1], v(2 * n + 1));
        ASSERT_EQ(g[2], v(2 * n + 2));
        ASSERT_EQ(g[3], v(4 * n + 1));
        ASSERT_EQ(g[4], v(4 * n + 3));
    }
}

TEST(LinearRep, RejectsOutOfRangeDigit) {
    const LinearRep rep = build_nu_k(3);
    const RepEvaluator ev(rep);
    const std::vector<u64> digits{0, 3};
    EXPECT_THROW(ev.evaluate_digits(digits), std::invalid_argument);
}

TEST(LinearRepJson, RoundTripPreservesEverything) {
    for (u64 p : {2ull, 5ull, 3ull, 11ull, 13ull, 47ull}) {
        const LinearRep rep = build_for_prime(p);
        const auto text = to_json(rep).dump();
        const LinearRep back = linear_rep_from_json(nlohmann::json::parse(text));
        EXPECT_EQ(back, rep) << p;
        const RepEvaluator a(rep), b(back);
        for (u64 n = 0; n <= 1000; ++n) ASSERT_EQ(a(n), b(n)) << p;
    }
}

TEST(LinearRepJson, SchemaKeys) {
    const auto j = to_json(build_p2());
    EXPECT_EQ(j.at("p"), 2);
    EXPECT_EQ(j.at("rank"), 5);
    EXPECT_EQ(j.at("matrices").size(), 2u);
    EXPECT_EQ(j.at("matrices")[0].size(), 25u);
    EXPECT_EQ(j.at("provenance"), "PrimeTwo");
}

TEST(LinearRepJson, MalformedInputIsRejected) {
    auto j = to_json(build_nu_k(3));
    j["provenance"] = "NoSuchThing";
    EXPECT_THROW(linear_rep_from_json(j), std::invalid_argument);
    j = to_json(build_nu_k(3));
    j["lambda"] = std::vector<i64>{1};
    EXPECT_THROW(linear_rep_from_json(j), std::invalid_argument);
    j = to_json(build_nu_k(3));
    j.erase("kappa");
    EXPECT_ANY_THROW(linear_rep_from_json(j));
}

TEST(Provenance, StringRoundTrip) {
    for (auto p : {Provenance::NuKPlusOne, Provenance::PrimeTwo, Provenance::PrimeFive, Provenance::OneFourMod5,
                   Provenance::ThirteenSeventeenMod20, Provenance::TwoThreeMod5, Provenance::ResidueIndicator,
                   Provenance::DirectSum, Provenance::Empirical})
        EXPECT_EQ(provenance_from_string(to_string(p)), p);
}
