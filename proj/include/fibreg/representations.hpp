#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fibreg/fib_core.hpp"
#include "fibreg/lengyel.hpp"
#include "fibreg/linear_rep.hpp"
#include "fibreg/relations.hpp"

namespace fibreg {

class hypothesis_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

using BaseSequence = std::function<i64(u64)>;

/// Fills M_0..M_{p-1} from relation families: for generator r = base(a_r n + b_r)
/// and digit i, the relation whose left side is base(p a_r n + a_r i + b_r)
/// supplies row r of M_i, with each right-hand term mapped to its generator.
inline std::vector<IntMatrix> matrices_from_relations(u64 p, const std::vector<AffineIndex>& generators,
                                                      const std::vector<RelationFamily>& families) {
    std::map<std::pair<u64, u64>, const RelationInstance*> by_lhs;
    for (const auto& f : families)
        for (const auto& inst : f.instances) by_lhs.emplace(std::pair{inst.lhs.scale, inst.lhs.offset}, &inst);
    auto column_of = [&](const AffineIndex& idx) {
        for (std::size_t c = 0; c < generators.size(); ++c)
            if (generators[c] == idx) return c;
        throw std::logic_error("relation term is not a generator: " + std::to_string(idx.scale) + "n+" +
                               std::to_string(idx.offset));
    };

    const std::size_t r = generators.size();
    std::vector<IntMatrix> mats(p, IntMatrix(r, r));
    for (std::size_t g = 0; g < r; ++g)
        for (u64 i = 0; i < p; ++i) {
            const auto& a = generators[g];
            auto it = by_lhs.find({p * a.scale, a.scale * i + a.offset});
            if (it == by_lhs.end())
                throw std::logic_error("no relation for generator " + std::to_string(g) + ", digit " + std::to_string(i));
            for (const auto& t : it->second->rhs) mats[i](g, column_of(t.index)) += t.coeff;
        }
    return mats;
}

/// Numeric self-check of g_r(p n + i) = sum_c M_i[r][c] g_c(n) for n < window.
inline void check_generator_relations(const LinearRep& rep, const std::vector<std::function<i64(u64)>>& gens,
                                      u64 window) {
    for (u64 n = 0; n < window; ++n)
        for (u64 i = 0; i < rep.base; ++i)
            for (std::size_t r = 0; r < rep.dimension; ++r) {
                i64 rhs = 0;
                for (std::size_t c = 0; c < rep.dimension; ++c)
                    if (i64 x = rep.matrices[i](r, c); x != 0) rhs += x * gens[c](n);
                if (gens[r](rep.base * n + i) != rhs)
                    throw std::logic_error("representation self-check failed: generator " + std::to_string(r) +
                                           ", digit " + std::to_string(i) + ", n=" + std::to_string(n));
            }
}

inline std::vector<std::function<i64(u64)>> affine_generators(const std::vector<AffineIndex>& gens,
                                                              BaseSequence base) {
    std::vector<std::function<i64(u64)>> out;
    for (const auto& g : gens) out.push_back([g, base](u64 n) { return base(g.at(n)); });
    return out;
}

/// Assembles a representation whose generators are base(a n + b); lambda picks generator 0.
inline LinearRep assemble(u64 p, std::vector<IntMatrix> mats, const std::vector<AffineIndex>& gens,
                          const BaseSequence& base, Provenance prov, u64 window) {
    LinearRep rep;
    rep.base = p;
    rep.dimension = gens.size();
    rep.matrices = std::move(mats);
    rep.lambda.assign(gens.size(), 0);
    rep.lambda[0] = 1;
    for (const auto& g : gens) rep.kappa.push_back(base(g.at(0)));
    rep.provenance = prov;
    rep.validate();
    check_generator_relations(rep, affine_generators(gens, base), window);
    return rep;
}

inline void require_class(u64 p, std::initializer_list<PrimeClass> allowed, const char* who) {
    const PrimeClass c = classify_prime(p);
    for (auto a : allowed)
        if (a == c) return;
    throw hypothesis_error(std::string(who) + ": p=" + std::to_string(p) + " has class " + std::string(to_string(c)));
}

inline void require_wall_negative(const FibValuation& val, const char* who) {
    if (val.val_at_alpha() != 1)
        throw hypothesis_error(std::string(who) + ": nu_p(F_alpha(p)) = " + std::to_string(val.val_at_alpha()) +
                               " != 1 for p=" + std::to_string(val.prime()));
}

inline u64 self_check_window(u64 alpha) { return std::max<u64>(16, 2 * alpha + 2); }

inline std::vector<AffineIndex> one_four_generators(u64 p) {
    std::vector<AffineIndex> g{{1, 1}};
    for (u64 j = 0; j + 1 < p; ++j) g.push_back({p, j + 1});
    return g;
}

inline std::vector<AffineIndex> thirteen_seventeen_generators(u64 p) {
    std::vector<AffineIndex> g{{1, 1}};
    for (u64 j = 0; j <= (p - 1) / 2; ++j) g.push_back({p, j + 1});
    return g;
}

inline std::vector<AffineIndex> two_three_generators(u64 p) {
    std::vector<AffineIndex> g{{1, 1}};
    for (u64 j = 0; j < p; ++j) g.push_back({p, j + 1});
    g.push_back({p * p, p + 1});
    return g;
}

/// The displayed p x p matrices for p = 1,4 mod 5: for j <= p-2, rows 0 and 1
/// of M_j select column j+1 and row 1+k selects column 1 + (j+k mod p-1);
/// M_{p-1} is the identity with an extra 1 at (0, 1).
inline std::vector<IntMatrix> one_four_displayed_matrices(u64 p) {
    std::vector<IntMatrix> mats;
    for (u64 j = 0; j + 1 < p; ++j) {
        IntMatrix m(p, p);
        m(0, j + 1) = 1;
        for (u64 k = 0; k + 1 < p; ++k) m(1 + k, 1 + (j + k) % (p - 1)) = 1;
        mats.push_back(std::move(m));
    }
    IntMatrix last = IntMatrix::identity(p);
    last(0, 1) = 1;
    mats.push_back(std::move(last));
    return mats;
}

/// w(m) = nu_p(m) + 1 if alpha | m, else 0: the valuation sequence as it would
/// be with nu_p(F_alpha(p)) = 1.
inline BaseSequence unit_wall_base(u64 p, u64 alpha) {
    return [p, alpha](u64 m) -> i64 { return m % alpha == 0 ? static_cast<i64>(nu(p, m)) + 1 : 0; };
}

inline BaseSequence fib_valuation_base(const FibValuation& val) {
    return [val](u64 m) -> i64 { return static_cast<i64>(val(m)); };
}

inline LinearRep one_four_from_base(u64 p, const BaseSequence& base, u64 window) {
    const auto gens = one_four_generators(p);
    auto displayed = one_four_displayed_matrices(p);
    if (displayed != matrices_from_relations(p, gens, relations::one_four_mod5(p)))
        throw std::logic_error("displayed matrices disagree with relation-derived matrices");
    return assemble(p, std::move(displayed), gens, base, Provenance::OneFourMod5, window);
}

inline LinearRep thirteen_seventeen_from_base(u64 p, const BaseSequence& base, u64 window) {
    const auto gens = thirteen_seventeen_generators(p);
    return assemble(p, matrices_from_relations(p, gens, relations::thirteen_seventeen_mod20(p)), gens, base,
                    Provenance::ThirteenSeventeenMod20, window);
}

inline LinearRep two_three_from_base(u64 p, const BaseSequence& base, u64 window) {
    const auto gens = two_three_generators(p);
    return assemble(p, matrices_from_relations(p, gens, relations::two_three_mod5(p)), gens, base,
                    Provenance::TwoThreeMod5, window);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// Rank-2 representation of nu_k(n+1), generators nu_k(n+1) and nu_k(k(n+1)).
inline LinearRep build_nu_k(u64 k) {
    if (k < 2) throw std::invalid_argument("build_nu_k: k must be >= 2");
    std::vector<IntMatrix> mats(k, IntMatrix(2, 2, {0, 0, -1, 1}));
    mats[k - 1] = IntMatrix(2, 2, {0, 1, -1, 2});
    const std::vector<AffineIndex> gens{{1, 1}, {k, k}};
    if (mats != detail::matrices_from_relations(k, gens, relations::nu_k(k)))
        throw std::logic_error("build_nu_k: matrices disagree with relations");
    auto base = [k](u64 m) -> i64 { return nu(k, m); };
    return detail::assemble(k, std::move(mats), gens, base, Provenance::NuKPlusOne, 2 * k + 2);
}

/// The rank-5 representation of nu_2(F_{n+1}). Generators, in order:
/// nu_2(F_{n+1}), nu_2(F_{2n+1}), nu_2(F_{2n+2}), nu_2(F_{4n+1}), nu_2(F_{4n+3}).
inline LinearRep build_p2() {
    std::vector<IntMatrix> mats{
        IntMatrix(5, 5, {0, 1, 0, 0, 0,  //
                         0, 0, 0, 1, 0,  //
                         0, 3, 0, 0, 0,  //
                         0, 1, 0, 0, 0,  //
                         0, 0, 0, 0, 1}),
        IntMatrix(5, 5, {0, 0, 1, 0, 0,  //
                         0, 0, 0, 0, 1,  //
                         0, 0, 1, 1, 0,  //
                         0, 0, 0, 1, 0,  //
                         0, 1, 0, 0, 0}),
    };
    const std::vector<AffineIndex> gens{{1, 1}, {2, 1}, {2, 2}, {4, 1}, {4, 3}};
    if (mats != detail::matrices_from_relations(2, gens, relations::prime_two()))
        throw std::logic_error("build_p2: matrices disagree with relations");
    auto rep = detail::assemble(2, std::move(mats), gens, detail::fib_valuation_base(FibValuation(2)),
                                Provenance::PrimeTwo, 16);
    // Independence over the first 16 terms of each generator.
    RepEvaluator eval(rep);
    std::vector<SparseVector<i64>> prefixes(rep.dimension);
    for (u64 n = 0; n < 16; ++n) {
        auto v = eval.generator_values(n);
        for (std::size_t r = 0; r < rep.dimension; ++r)
            if (v[r] != 0) prefixes[r].push_back({n, v[r].get_si()});
    }
    if (exact_rank(prefixes) != 5) throw std::logic_error("build_p2: generators are not independent on 16 terms");
    return rep;
}

/// nu_5(F_{n+1}) = nu_5(n+1), so the nu_k representation with k = 5.
inline LinearRep build_p5() {
    auto rep = build_nu_k(5);
    rep.provenance = Provenance::PrimeFive;
    return rep;
}

/// p x p representation for p = 1,4 mod 5 with nu_p(F_alpha(p)) = 1.
inline LinearRep build_one_four_mod5(u64 p) {
    detail::require_class(p, {PrimeClass::OneFourMod5}, "build_one_four_mod5");
    const FibValuation val(p);
    detail::require_wall_negative(val, "build_one_four_mod5");
    return detail::one_four_from_base(p, detail::fib_valuation_base(val), detail::self_check_window(val.alpha()));
}

/// ((p+3)/2)-dimensional representation for p = 13,17 mod 20 with nu_p(F_alpha(p)) = 1.
inline LinearRep build_thirteen_seventeen_mod20(u64 p) {
    detail::require_class(p, {PrimeClass::ThirteenSeventeenMod20}, "build_thirteen_seventeen_mod20");
    const FibValuation val(p);
    detail::require_wall_negative(val, "build_thirteen_seventeen_mod20");
    return detail::thirteen_seventeen_from_base(p, detail::fib_valuation_base(val),
                                                detail::self_check_window(val.alpha()));
}

/// (p+2)-dimensional representation for odd p = 2,3 mod 5 with nu_p(F_alpha(p)) = 1.
inline LinearRep build_two_three_mod5(u64 p) {
    detail::require_class(p, {PrimeClass::ThreeSevenMod20, PrimeClass::ThirteenSeventeenMod20},
                          "build_two_three_mod5");
    const FibValuation val(p);
    detail::require_wall_negative(val, "build_two_three_mod5");
    return detail::two_three_from_base(p, detail::fib_valuation_base(val), detail::self_check_window(val.alpha()));
}

/// alpha-dimensional representation of a(n) = [alpha | n+1]. Generator c is
/// [n = c mod alpha]; digit i sends class c to every c' with p c' + i = c.
inline LinearRep build_residue_indicator(u64 p, u64 alpha) {
    if (p < 2 || alpha < 1) throw std::invalid_argument("build_residue_indicator: need p >= 2, alpha >= 1");
    LinearRep rep;
    rep.base = p;
    rep.dimension = alpha;
    rep.matrices.assign(p, IntMatrix(alpha, alpha));
    for (u64 i = 0; i < p; ++i)
        for (u64 c2 = 0; c2 < alpha; ++c2) rep.matrices[i]((static_cast<u128>(p) * c2 + i) % alpha, c2) = 1;
    rep.lambda.assign(alpha, 0);
    rep.lambda[alpha - 1] = 1;
    rep.kappa.assign(alpha, 0);
    rep.kappa[0] = 1;
    rep.provenance = Provenance::ResidueIndicator;
    rep.validate();
    std::vector<std::function<i64(u64)>> gens;
    for (u64 c = 0; c < alpha; ++c) gens.push_back([c, alpha](u64 n) -> i64 { return n % alpha == c ? 1 : 0; });
    detail::check_generator_relations(rep, gens, std::max<u64>(16, 2 * alpha));
    return rep;
}

/// Block-diagonal sum; lambda = (wa * lambda_a, wb * lambda_b).
inline LinearRep direct_sum(const LinearRep& a, const LinearRep& b, i64 weight_a = 1, i64 weight_b = 1) {
    if (a.base != b.base) throw std::invalid_argument("direct_sum: bases differ");
    LinearRep out;
    out.base = a.base;
    out.dimension = a.dimension + b.dimension;
    for (u64 d = 0; d < a.base; ++d) {
        IntMatrix m(out.dimension, out.dimension);
        for (std::size_t r = 0; r < a.dimension; ++r)
            for (std::size_t c = 0; c < a.dimension; ++c) m(r, c) = a.matrices[d](r, c);
        for (std::size_t r = 0; r < b.dimension; ++r)
            for (std::size_t c = 0; c < b.dimension; ++c) m(a.dimension + r, a.dimension + c) = b.matrices[d](r, c);
        out.matrices.push_back(std::move(m));
    }
    for (auto x : a.lambda) out.lambda.push_back(weight_a * x);
    for (auto x : b.lambda) out.lambda.push_back(weight_b * x);
    out.kappa = a.kappa;
    out.kappa.insert(out.kappa.end(), b.kappa.begin(), b.kappa.end());
    out.provenance = Provenance::DirectSum;
    out.validate();
    return out;
}

/// Unconditional representation for p != 2, 5:
///   nu_p(F_{n+1}) = b(n) + (nu_p(F_alpha(p)) - 1) a(n),
/// with b(n) = [alpha | n+1](nu_p(n+1) + 1) carried by the class construction
/// (its relations hold for b whatever nu_p(F_alpha(p)) is) and a(n) the
/// residue indicator.
inline LinearRep build_general(u64 p) {
    const PrimeClass cls = classify_prime(p);
    if (cls == PrimeClass::Two || cls == PrimeClass::Five)
        throw std::invalid_argument("build_general: p must not be 2 or 5");
    const FibValuation val(p);
    const auto base = detail::unit_wall_base(p, val.alpha());
    const u64 window = detail::self_check_window(val.alpha());
    LinearRep b;
    switch (cls) {
        case PrimeClass::OneFourMod5: b = detail::one_four_from_base(p, base, window); break;
        case PrimeClass::ThirteenSeventeenMod20: b = detail::thirteen_seventeen_from_base(p, base, window); break;
        default: b = detail::two_three_from_base(p, base, window); break;
    }
    const LinearRep a = build_residue_indicator(p, val.alpha());
    return direct_sum(b, a, 1, static_cast<i64>(val.val_at_alpha()) - 1);
}

/// Class-specific construction for p, falling back to build_general when
/// nu_p(F_alpha(p)) != 1.
inline LinearRep build_for_prime(u64 p) {
    switch (classify_prime(p)) {
        case PrimeClass::Two: return build_p2();
        case PrimeClass::Five: return build_p5();
        default: break;
    }
    const FibValuation val(p);
    if (val.val_at_alpha() != 1) return build_general(p);
    switch (classify_prime(p)) {
        case PrimeClass::OneFourMod5: return build_one_four_mod5(p);
        case PrimeClass::ThirteenSeventeenMod20: return build_thirteen_seventeen_mod20(p);
        default: return build_two_three_mod5(p);
    }
}

// ---------------------------------------------------------------------------
// Group structure of M_0..M_{p-2} for p = 1,4 mod 5
// ---------------------------------------------------------------------------

struct MonoidVerdict {
    u64 p = 0;
    std::size_t products_checked = 0;
    std::vector<std::pair<u64, u64>> product_failures;  // (i, j) with M_i M_j != M_{i+j mod p-1}
    std::size_t noncommuting = 0;
    std::vector<u64> commuting_with_last;  // i <= p-2 with M_i M_{p-1} = M_{p-1} M_i

    bool holds() const { return product_failures.empty() && commuting_with_last.empty(); }
};

inline MonoidVerdict verify_monoid_structure(const LinearRep& rep) {
    if (rep.provenance != Provenance::OneFourMod5)
        throw std::invalid_argument("verify_monoid_structure: representation is not of the 1,4 mod 5 kind");
    rep.validate();
    const u64 p = rep.base;
    MonoidVerdict v;
    v.p = p;
    for (u64 i = 0; i + 1 < p; ++i)
        for (u64 j = 0; j + 1 < p; ++j) {
            ++v.products_checked;
            if (rep.matrices[i] * rep.matrices[j] != rep.matrices[(i + j) % (p - 1)])
                v.product_failures.emplace_back(i, j);
        }
    const auto& last = rep.matrices[p - 1];
    for (u64 i = 0; i + 1 < p; ++i) {
        if (rep.matrices[i] * last == last * rep.matrices[i])
            v.commuting_with_last.push_back(i);
        else
            ++v.noncommuting;
    }
    return v;
}

}  // namespace fibreg
