#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fibreg/fib_core.hpp"
#include "fibreg/lengyel.hpp"

namespace fibreg {

/// The index map n -> scale * n + offset.
struct AffineIndex {
    u64 scale = 1;
    u64 offset = 0;

    u64 at(u64 n) const {
        u64 r;
        if (__builtin_mul_overflow(scale, n, &r) || __builtin_add_overflow(r, offset, &r))
            throw std::overflow_error("AffineIndex: index exceeds 64 bits");
        return r;
    }
    friend bool operator==(const AffineIndex&, const AffineIndex&) = default;
};

/// coeff * base(index(n)), where base is the valuation sequence m -> nu(F_m) (or nu_k(m)).
struct Term {
    i64 coeff = 1;
    AffineIndex index;
};

/// base(lhs(n)) = sum of rhs terms, for all n >= 0. An empty rhs means 0.
struct RelationInstance {
    std::string label;
    AffineIndex lhs;
    std::vector<Term> rhs;
};

struct RelationFamily {
    std::string id;
    std::vector<RelationInstance> instances;
};

struct RelationFailure {
    u64 n = 0;
    std::string instance;
    i64 lhs = 0;
    i64 rhs = 0;
};

struct RelationReport {
    std::string id;
    u64 n_min = 0;
    u64 n_max = 0;
    std::size_t instances = 0;
    std::size_t failure_count = 0;
    std::vector<RelationFailure> failures;  // first few, capped

    bool verified() const { return failure_count == 0; }
};

// ---------------------------------------------------------------------------
// Relation families. In every family the index m of nu_p(F_m) is written as
// an affine function of n; for example nu_p(F_{p(pn+i)+j+1}) is
// AffineIndex{p^2, p*i + j + 1}.
// ---------------------------------------------------------------------------

namespace relations {

inline std::string ij(u64 i, u64 j) { return "i=" + std::to_string(i) + ",j=" + std::to_string(j); }
inline std::string ii(u64 i) { return "i=" + std::to_string(i); }

/// nu_k(n+1) generated by nu_k(n+1) and nu_k(k(n+1)); base is m -> nu_k(m).
/// Also serves p = 5, where nu_5(F_m) = nu_5(m).
inline std::vector<RelationFamily> nu_k(u64 k) {
    RelationFamily first{"nu_k.first_level", {}};
    RelationFamily second{"nu_k.second_level", {}};
    for (u64 i = 0; i < k; ++i) {
        // nu_k(kn + i + 1)
        RelationInstance a{ii(i), {k, i + 1}, {}};
        if (i == k - 1) a.rhs = {{1, {k, k}}};
        first.instances.push_back(a);
        // nu_k(k(kn + i + 1))
        RelationInstance b{ii(i), {k * k, k * i + k}, {}};
        if (i + 2 <= k)
            b.rhs = {{-1, {1, 1}}, {1, {k, k}}};
        else
            b.rhs = {{-1, {1, 1}}, {2, {k, k}}};
        second.instances.push_back(b);
    }
    return {first, second};
}

/// The ten relations behind the rank-5 representation for p = 2.
inline std::vector<RelationFamily> prime_two() {
    auto one = [](std::string id, AffineIndex lhs, std::vector<Term> rhs) {
        return RelationFamily{std::move(id), {RelationInstance{"", lhs, std::move(rhs)}}};
    };
    return {
        one("prime_two.1", {2, 1}, {{1, {2, 1}}}),
        one("prime_two.2", {2, 2}, {{1, {2, 2}}}),
        one("prime_two.3", {4, 1}, {{1, {4, 1}}}),
        one("prime_two.4", {4, 3}, {{1, {4, 3}}}),
        one("prime_two.5", {4, 2}, {{3, {2, 1}}}),
        one("prime_two.6", {4, 4}, {{1, {4, 1}}, {1, {2, 2}}}),
        one("prime_two.7", {8, 1}, {{1, {2, 1}}}),
        one("prime_two.8", {8, 5}, {{1, {4, 1}}}),
        one("prime_two.9", {8, 3}, {{1, {4, 3}}}),
        one("prime_two.10", {8, 7}, {{1, {2, 1}}}),
    };
}

/// p = 1,4 mod 5.
inline std::vector<RelationFamily> one_four_mod5(u64 p) {
    RelationFamily first{"one_four.first_level", {}};
    for (u64 i = 0; i < p; ++i) {
        if (i + 1 < p)
            first.instances.push_back({ii(i), {p, i + 1}, {{1, {p, i + 1}}}});
        else
            first.instances.push_back({ii(i), {p, p}, {{1, {1, 1}}, {1, {p, 1}}}});
    }
    RelationFamily second{"one_four.second_level", {}};
    for (u64 i = 0; i < p; ++i)
        for (u64 j = 0; j + 1 < p; ++j)
            second.instances.push_back({ij(i, j), {p * p, p * i + j + 1}, {{1, {p, (i + j) % (p - 1) + 1}}}});
    return {first, second};
}

/// p = 13,17 mod 20.
inline std::vector<RelationFamily> thirteen_seventeen_mod20(u64 p) {
    const u64 h = (p + 1) / 2;
    RelationFamily first{"thirteen_seventeen.first_level", {}};
    for (u64 i = 0; i < p; ++i) {
        if (i + 1 < p)
            first.instances.push_back({ii(i), {p, i + 1}, {{1, {p, i % h + 1}}}});
        else
            first.instances.push_back({ii(i), {p, p}, {{1, {1, 1}}, {1, {p, (p - 3) / 2 + 1}}}});
    }
    RelationFamily second{"thirteen_seventeen.second_level", {}};
    for (u64 i = 0; i < p; ++i)
        for (u64 j = 0; j <= (p - 1) / 2; ++j) {
            // (i - j + (p-3)/2) mod (p+1)/2, kept nonnegative
            const u64 r = (i + (p - 3) / 2 + h * p - j) % h;
            second.instances.push_back({ij(i, j), {p * p, p * i + j + 1}, {{1, {p, r + 1}}}});
        }
    return {first, second};
}

/// Odd p = 2,3 mod 5.
inline std::vector<RelationFamily> two_three_mod5(u64 p) {
    RelationFamily first{"two_three.first_level", {}};
    for (u64 i = 0; i < p; ++i) first.instances.push_back({ii(i), {p, i + 1}, {{1, {p, i + 1}}}});

    RelationFamily second_a{"two_three.second_level_a", {}};
    for (u64 i = 0; i < p; ++i)
        for (u64 j = 0; j + 1 < p; ++j) {
            RelationInstance r{ij(i, j), {p * p, p * i + j + 1}, {}};
            if (i + 1 <= j)
                r.rhs = {{1, {p, i + p - 1 - j + 1}}};
            else if (i == j)
                r.rhs = {{-1, {1, 1}}, {1, {p, p}}};
            else if (i == j + 1)
                r.rhs = {{1, {p * p, p + 1}}};
            else
                r.rhs = {{1, {p, i - j - 2 + 1}}};
            second_a.instances.push_back(r);
        }

    RelationFamily second_b{"two_three.second_level_b", {}};
    for (u64 i = 0; i < p; ++i) {
        RelationInstance r{ii(i), {p * p, p * i + p}, {}};
        if (i + 1 < p)
            r.rhs = {{2, {p, i + 1}}};
        else
            r.rhs = {{-1, {1, 1}}, {2, {p, p}}};
        second_b.instances.push_back(r);
    }

    RelationFamily third{"two_three.third_level", {}};
    for (u64 i = 0; i < p; ++i) {
        RelationInstance r{ii(i), {p * p * p, p * p * i + p + 1}, {}};
        if (i == 0)
            r.rhs = {{1, {p * p, p + 1}}};
        else
            r.rhs = {{1, {p, i}}};
        third.instances.push_back(r);
    }
    return {first, second_a, second_b, third};
}

}  // namespace relations

/// The families that apply to p, by class. Primes 13,17 mod 20 also satisfy
/// the 2,3 mod 5 families, so both are returned for them.
inline std::vector<RelationFamily> relation_families_for_prime(u64 p) {
    switch (classify_prime(p)) {
        case PrimeClass::Two: return relations::prime_two();
        case PrimeClass::Five: {
            auto fams = relations::nu_k(5);
            for (auto& f : fams) f.id = "prime_five" + f.id.substr(f.id.find('.'));
            return fams;
        }
        case PrimeClass::OneFourMod5: return relations::one_four_mod5(p);
        case PrimeClass::ThirteenSeventeenMod20: {
            auto fams = relations::thirteen_seventeen_mod20(p);
            for (auto& f : relations::two_three_mod5(p)) fams.push_back(std::move(f));
            return fams;
        }
        case PrimeClass::ThreeSevenMod20: return relations::two_three_mod5(p);
    }
    return {};
}

/// Checks one family for all 0 <= n <= n_max. base(m) supplies the value of the sequence at index m.
template <class Base>
RelationReport check_family(const RelationFamily& family, const Base& base, u64 n_max,
                            std::size_t max_recorded = 32) {
    RelationReport report{family.id, 0, n_max, family.instances.size(), 0, {}};
    for (const auto& inst : family.instances)
        for (u64 n = 0; n <= n_max; ++n) {
            const i64 lhs = static_cast<i64>(base(inst.lhs.at(n)));
            i64 rhs = 0;
            for (const auto& t : inst.rhs) rhs += t.coeff * static_cast<i64>(base(t.index.at(n)));
            if (lhs != rhs) {
                ++report.failure_count;
                if (report.failures.size() < max_recorded) report.failures.push_back({n, inst.label, lhs, rhs});
            }
        }
    return report;
}

/// Every relation family for p's class, both sides evaluated with the closed form.
inline std::vector<RelationReport> verify_relations(u64 p, u64 n_max) {
    const FibValuation val(p);
    std::vector<RelationReport> out;
    for (const auto& fam : relation_families_for_prime(p)) out.push_back(check_family(fam, val, n_max));
    return out;
}

}  // namespace fibreg
