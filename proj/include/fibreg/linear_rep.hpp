#pragma once

#include <gmpxx.h>

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fibreg/fib_core.hpp"
#include "fibreg/int_linalg.hpp"

namespace fibreg {

enum class Provenance {
    NuKPlusOne,
    PrimeTwo,
    PrimeFive,
    OneFourMod5,
    ThirteenSeventeenMod20,
    TwoThreeMod5,
    ResidueIndicator,
    DirectSum,
    Empirical,
};

inline std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::NuKPlusOne: return "NuKPlusOne";
        case Provenance::PrimeTwo: return "PrimeTwo";
        case Provenance::PrimeFive: return "PrimeFive";
        case Provenance::OneFourMod5: return "OneFourMod5";
        case Provenance::ThirteenSeventeenMod20: return "ThirteenSeventeenMod20";
        case Provenance::TwoThreeMod5: return "TwoThreeMod5";
        case Provenance::ResidueIndicator: return "ResidueIndicator";
        case Provenance::DirectSum: return "DirectSum";
        case Provenance::Empirical: return "Empirical";
    }
    return "?";
}

inline Provenance provenance_from_string(std::string_view s) {
    for (auto p : {Provenance::NuKPlusOne, Provenance::PrimeTwo, Provenance::PrimeFive, Provenance::OneFourMod5,
                   Provenance::ThirteenSeventeenMod20, Provenance::TwoThreeMod5, Provenance::ResidueIndicator,
                   Provenance::DirectSum,
                   Provenance::Empirical})
        if (to_string(p) == s) return p;
    throw std::invalid_argument("unknown provenance: " + std::string(s));
}

/**
 * A base-k linear representation
 *
 *     a(n) = lambda * M_{n_0} * M_{n_1} * ... * M_{n_l} * kappa
 *
 * over the least-significant-first digits n_0..n_l of n. Row r of M_i holds
 * the coefficients expressing the i-th subsequence of generator r in terms
 * of the generators, and kappa holds the first term of each generator.
 */
struct LinearRep {
    u64 base = 2;
    std::size_t dimension = 0;
    std::vector<IntMatrix> matrices;  // one per digit 0..base-1
    std::vector<i64> lambda;
    std::vector<i64> kappa;
    Provenance provenance = Provenance::Empirical;

    void validate() const {
        if (base < 2) throw std::invalid_argument("LinearRep: base must be >= 2");
        if (matrices.size() != base) throw std::invalid_argument("LinearRep: need one matrix per digit");
        for (const auto& m : matrices)
            if (m.rows() != dimension || m.cols() != dimension)
                throw std::invalid_argument("LinearRep: matrix shape does not match dimension");
        if (lambda.size() != dimension || kappa.size() != dimension)
            throw std::invalid_argument("LinearRep: lambda/kappa length does not match dimension");
    }

    friend bool operator==(const LinearRep&, const LinearRep&) = default;
};

/// Evaluates a LinearRep with arbitrary-precision accumulation. Matrix rows
/// are stored sparsely, so cost per digit is the number of nonzero entries.
/// The representation must outlive the evaluator.
class RepEvaluator {
public:
    explicit RepEvaluator(LinearRep&&) = delete;
    explicit RepEvaluator(const LinearRep& rep) : rep_(&rep) {
        rep.validate();
        sparse_.resize(rep.base);
        for (u64 d = 0; d < rep.base; ++d) {
            auto& rows = sparse_[d];
            rows.resize(rep.dimension);
            for (std::size_t r = 0; r < rep.dimension; ++r)
                for (std::size_t c = 0; c < rep.dimension; ++c)
                    if (i64 x = rep.matrices[d](r, c); x != 0) rows[r].push_back({c, x});
        }
    }

    /// Column vector M_{d_0} ... M_{d_l} kappa: the value of every generator at n.
    std::vector<mpz_class> generator_values_digits(std::span<const u64> digits) const {
        std::vector<mpz_class> v(rep_->kappa.begin(), rep_->kappa.end());
        std::vector<mpz_class> next(v.size());
        for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
            if (*it >= rep_->base) throw std::invalid_argument("RepEvaluator: digit out of range");
            const auto& rows = sparse_[*it];
            for (std::size_t r = 0; r < rows.size(); ++r) {
                next[r] = 0;
                for (const auto& e : rows[r])
                    if (v[e.index] != 0) next[r] += e.value * v[e.index];
            }
            std::swap(v, next);
        }
        return v;
    }

    std::vector<mpz_class> generator_values(u64 n) const {
        return generator_values_digits(to_digits(n, rep_->base).digits);
    }

    mpz_class evaluate_digits(std::span<const u64> digits) const {
        const auto v = generator_values_digits(digits);
        mpz_class out = 0;
        for (std::size_t r = 0; r < v.size(); ++r)
            if (rep_->lambda[r] != 0) out += rep_->lambda[r] * v[r];
        return out;
    }

    mpz_class operator()(u64 n) const { return evaluate_digits(to_digits(n, rep_->base).digits); }

private:
    const LinearRep* rep_;
    std::vector<std::vector<SparseVector<i64>>> sparse_;
};

inline mpz_class evaluate(const LinearRep& rep, u64 n) { return RepEvaluator(rep)(n); }

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const LinearRep& rep) {
    nlohmann::json j;
    j["p"] = rep.base;
    j["rank"] = rep.dimension;
    auto mats = nlohmann::json::array();
    for (const auto& m : rep.matrices) mats.push_back(m.row_major());
    j["matrices"] = std::move(mats);
    j["lambda"] = rep.lambda;
    j["kappa"] = rep.kappa;
    j["provenance"] = std::string(to_string(rep.provenance));
    return j;
}

inline LinearRep linear_rep_from_json(const nlohmann::json& j) {
    LinearRep rep;
    rep.base = j.at("p").get<u64>();
    rep.dimension = j.at("rank").get<std::size_t>();
    for (const auto& m : j.at("matrices"))
        rep.matrices.emplace_back(rep.dimension, rep.dimension, m.get<std::vector<i64>>());
    rep.lambda = j.at("lambda").get<std::vector<i64>>();
    rep.kappa = j.at("kappa").get<std::vector<i64>>();
    rep.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    rep.validate();
    return rep;
}

}  // namespace fibreg
