#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <concepts>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fibreg/fib_core.hpp"
#include "fibreg/int_linalg.hpp"
#include "fibreg/lengyel.hpp"
#include "fibreg/linear_rep.hpp"
#include "fibreg/parallel.hpp"

namespace fibreg {

/// The subsequence n -> a(p^depth n + offset), 0 <= offset < p^depth.
struct KernelNode {
    unsigned depth = 0;
    u64 offset = 0;
    friend bool operator==(const KernelNode&, const KernelNode&) = default;
};

struct RankReport {
    u64 p = 0;
    PrimeClass prime_class = PrimeClass::Two;
    u64 alpha = 0;
    u64 pisano = 0;
    std::size_t rank = 0;
    u64 theorem_bound = 0;
    bool conjecture_holds = false;  // rank == alpha + 1
    std::size_t truncation_length = 0;  // base L; closures also run at 2L and 4L
    unsigned depth_explored = 0;
    bool stabilized = false;

    std::vector<std::size_t> ranks_by_length;  // at L, 2L, 4L
    bool closure_complete = false;  // no independent node left unexpanded at max_depth
    bool hermite_certified = false;
    std::size_t cross_check_violations = 0;
    std::vector<KernelNode> basis_nodes;

    u64 alpha_plus_one() const { return alpha + 1; }
    bool conjecture_applicable() const { return p != 2 && p != 5; }
    bool bound_respected() const { return rank <= theorem_bound; }
};

struct KernelRankOptions {
    std::size_t truncation = 0;  // 0 selects default_truncation
    unsigned max_depth = 10;
    bool cross_check = false;  // expand one level below dependent nodes as well
};

/// Rank bound from the construction for p's class.
inline u64 theorem_bound(u64 p) {
    switch (classify_prime(p)) {
        case PrimeClass::Two: return 5;
        case PrimeClass::Five: return 2;
        case PrimeClass::OneFourMod5: return p;
        case PrimeClass::ThirteenSeventeenMod20: return (p + 3) / 2;
        case PrimeClass::ThreeSevenMod20: return p + 2;
    }
    return 0;
}

inline std::size_t default_truncation(u64 p, u64 alpha) { return std::max<std::size_t>(1024, 8 * p * alpha); }

/// n -> nu_p(F_{n+1}) by the closed form, with support-only enumeration of progressions.
class FibValuationSequence {
public:
    explicit FibValuationSequence(u64 p) : val_(p) {}
    explicit FibValuationSequence(FibValuation val) : val_(std::move(val)) {}

    const FibValuation& valuation() const { return val_; }
    i64 operator()(u64 n) const { return val_(n + 1); }

    SparseVector<i64> sparse_progression(u64 start, u64 stride, std::size_t count) const {
        SparseVector<i64> out;
        val_.for_each_nonzero(start + 1, stride, count,
                              [&](u64 t, unsigned v) { out.push_back({static_cast<std::size_t>(t), v}); });
        return out;
    }

private:
    FibValuation val_;
};

template <class S>
concept HasSparseProgression = requires(const S& s, u64 a, u64 b, std::size_t c) {
    { s.sparse_progression(a, b, c) } -> std::convertible_to<SparseVector<i64>>;
};

/// First `count` terms of n -> seq(start + stride n).
template <class Sequence>
SparseVector<i64> progression_prefix(const Sequence& seq, u64 start, u64 stride, std::size_t count) {
    if constexpr (HasSparseProgression<Sequence>) {
        return seq.sparse_progression(start, stride, count);
    } else {
        SparseVector<i64> out;
        u64 idx = start;
        for (std::size_t t = 0; t < count; ++t) {
            if (t > 0 && __builtin_add_overflow(idx, stride, &idx))
                throw std::overflow_error("kernel index exceeds 64 bits");
            if (i64 v = static_cast<i64>(seq(idx)); v != 0) out.push_back({t, v});
        }
        return out;
    }
}

namespace detail {

struct ClosureOutcome {
    std::size_t rank = 0;
    std::vector<KernelNode> basis_nodes;
    unsigned depth_explored = 0;
    bool complete = true;
    bool certified = false;
    std::size_t cross_check_violations = 0;
};

inline u64 checked_pow(u64 p, unsigned e) {
    u64 r = 1;
    for (unsigned i = 0; i < e; ++i)
        if (__builtin_mul_overflow(r, p, &r)) throw std::overflow_error("kernel stride exceeds 64 bits");
    return r;
}

/// The r x r submatrix of the basis prefixes on the pivot columns must have
/// a Hermite form with r nonzero rows (full rank over Z, hence over Q).
inline bool certify_by_hermite(const std::vector<SparseVector<i64>>& originals, std::vector<std::size_t> pivots) {
    std::sort(pivots.begin(), pivots.end());
    MpzMatrix m(originals.size(), std::vector<mpz_class>(pivots.size()));
    for (std::size_t r = 0; r < originals.size(); ++r)
        for (const auto& e : originals[r]) {
            auto it = std::lower_bound(pivots.begin(), pivots.end(), e.index);
            if (it != pivots.end() && *it == e.index)
                m[r][static_cast<std::size_t>(it - pivots.begin())] = static_cast<long>(e.value);
        }
    auto [form, nonzero_rows] = hermite_normal_form(std::move(m));
    for (std::size_t i = 0; i < nonzero_rows; ++i)
        if (std::all_of(form[i].begin(), form[i].end(), [](const mpz_class& x) { return x == 0; })) return false;
    return nonzero_rows == originals.size();
}

/**
 * Breadth-first closure of the p-kernel from (0, 0). Each node's length-L
 * prefix is tested against the basis; only independent nodes have their
 * children enqueued, since a dependent node's subsequences are spanned by
 * the subsequences of the basis nodes.
 */
template <class Scalar, class Sequence>
ClosureOutcome kernel_closure(u64 p, const Sequence& seq, std::size_t L, unsigned max_depth, bool cross_check) {
    ClosureOutcome out;
    EchelonBasis<Scalar> basis;
    std::vector<SparseVector<i64>> originals;
    std::vector<KernelNode> dependent;

    auto prefix = [&](const KernelNode& node) {
        return progression_prefix(seq, node.offset, checked_pow(p, node.depth), L);
    };
    auto as_scalar = [](const SparseVector<i64>& v) {
        if constexpr (std::is_same_v<Scalar, i64>)
            return v;
        else
            return convert_sparse<Scalar>(v);
    };

    std::vector<KernelNode> level{{0, 0}};
    while (!level.empty()) {
        std::vector<KernelNode> next;
        for (const auto& node : level) {
            out.depth_explored = std::max(out.depth_explored, node.depth);
            auto v = prefix(node);
            if (basis.insert(as_scalar(v))) {
                originals.push_back(std::move(v));
                out.basis_nodes.push_back(node);
                if (node.depth >= max_depth) {
                    out.complete = false;
                    continue;
                }
                const u64 step = checked_pow(p, node.depth);
                for (u64 j = 0; j < p; ++j) next.push_back({node.depth + 1, node.offset + j * step});
            } else if (cross_check && node.depth < max_depth) {
                dependent.push_back(node);
            }
        }
        level = std::move(next);
    }

    for (const auto& node : dependent) {
        const u64 step = checked_pow(p, node.depth);
        for (u64 j = 0; j < p; ++j)
            if (!basis.in_span(as_scalar(prefix({node.depth + 1, node.offset + j * step}))))
                ++out.cross_check_violations;
    }

    out.rank = basis.rank();
    out.certified = certify_by_hermite(originals, basis.pivots());
    return out;
}

template <class Sequence>
ClosureOutcome kernel_closure_exact(u64 p, const Sequence& seq, std::size_t L, unsigned max_depth, bool cross_check) {
    try {
        return kernel_closure<i64>(p, seq, L, max_depth, cross_check);
    } catch (const elimination_overflow&) {
        return kernel_closure<mpz_class>(p, seq, L, max_depth, cross_check);
    }
}

}  // namespace detail

/**
 * Empirical rank of the Z-module generated by the p-kernel of seq, where
 * seq(n) is the n-th term (for the default, nu_p(F_{n+1})). The closure is
 * run at truncation L, 2L and 4L; the report is stabilized only if all three
 * closures completed within max_depth, agree on the rank, and the basis is
 * certified independent. Elimination is exact throughout.
 */
template <class Sequence>
RankReport kernel_rank(u64 p, const Sequence& seq, KernelRankOptions opts = {}) {
    if (opts.max_depth < 1) throw std::invalid_argument("kernel_rank: max_depth must be >= 1");
    RankReport r;
    r.p = p;
    r.prime_class = classify_prime(p);
    r.alpha = restricted_period(p);
    r.pisano = pisano_period(p);
    r.theorem_bound = theorem_bound(p);
    const std::size_t L = opts.truncation ? opts.truncation : default_truncation(p, r.alpha);
    if (L < 2) throw std::invalid_argument("kernel_rank: truncation must be >= 2");
    r.truncation_length = L;

    bool complete = true, certified = true;
    for (std::size_t len : {L, 2 * L, 4 * L}) {
        auto c = detail::kernel_closure_exact(p, seq, len, opts.max_depth, opts.cross_check);
        r.ranks_by_length.push_back(c.rank);
        complete = complete && c.complete;
        certified = certified && c.certified;
        r.rank = c.rank;
        r.depth_explored = c.depth_explored;
        r.basis_nodes = std::move(c.basis_nodes);
        r.cross_check_violations += c.cross_check_violations;
    }
    r.closure_complete = complete;
    r.hermite_certified = certified;
    const bool stable = std::all_of(r.ranks_by_length.begin(), r.ranks_by_length.end(),
                                    [&](std::size_t x) { return x == r.ranks_by_length.front(); });
    r.stabilized = complete && certified && stable && r.cross_check_violations == 0;
    r.conjecture_holds = r.rank == r.alpha + 1;
    return r;
}

inline RankReport kernel_rank(u64 p, KernelRankOptions opts = {}) {
    return kernel_rank(p, FibValuationSequence(p), opts);
}

/// Rank of the span of the generator sequences of rep, from their first L terms.
inline std::size_t rank_of_rep(const LinearRep& rep, std::size_t L) {
    RepEvaluator eval(rep);
    std::vector<SparseVector<i64>> rows(rep.dimension);
    for (std::size_t n = 0; n < L; ++n) {
        const auto v = eval.generator_values(n);
        for (std::size_t g = 0; g < rep.dimension; ++g) {
            if (v[g] == 0) continue;
            if (!v[g].fits_slong_p()) throw std::overflow_error("rank_of_rep: generator value exceeds 64 bits");
            rows[g].push_back({n, v[g].get_si()});
        }
    }
    return exact_rank(rows);
}

/// Rank reports for every prime p <= p_max other than 2 and 5 (those two on
/// request), in increasing order of p. Primes are processed in parallel.
inline std::vector<RankReport> conjecture_scan(u64 p_max, KernelRankOptions opts = {}, bool include_special = false) {
    std::vector<u64> primes;
    for (u64 p : primes_up_to(p_max))
        if (include_special || (p != 2 && p != 5)) primes.push_back(p);
    std::vector<RankReport> out(primes.size());
    parallel_for(primes.size(), [&](std::size_t i) { out[i] = kernel_rank(primes[i], opts); });
    return out;
}

/// Stabilized reports for p != 2, 5 whose rank differs from alpha(p) + 1.
inline std::vector<RankReport> conjecture_violations(const std::vector<RankReport>& reports) {
    std::vector<RankReport> out;
    for (const auto& r : reports)
        if (r.stabilized && r.conjecture_applicable() && !r.conjecture_holds) out.push_back(r);
    return out;
}

inline void write_rank_csv_header(std::ostream& os) {
    os << "prime,class,alpha,pisano,rank,theorem_bound,alpha_plus_1,conjecture_holds,L,stabilized\n";
}

inline void write_rank_csv_row(std::ostream& os, const RankReport& r) {
    os << r.p << ',' << to_string(r.prime_class) << ',' << r.alpha << ',' << r.pisano << ',' << r.rank << ','
       << r.theorem_bound << ',' << r.alpha_plus_one() << ',' << (r.conjecture_holds ? "true" : "false") << ','
       << r.truncation_length << ',' << (r.stabilized ? "true" : "false") << '\n';
}

inline nlohmann::json to_json(const RankReport& r) {
    nlohmann::json j;
    j["prime"] = r.p;
    j["class"] = std::string(to_string(r.prime_class));
    j["alpha"] = r.alpha;
    j["pisano"] = r.pisano;
    j["rank"] = r.rank;
    j["theorem_bound"] = r.theorem_bound;
    j["alpha_plus_1"] = r.alpha_plus_one();
    j["conjecture_holds"] = r.conjecture_holds;
    j["L"] = r.truncation_length;
    j["stabilized"] = r.stabilized;
    j["ranks_by_length"] = r.ranks_by_length;
    j["depth_explored"] = r.depth_explored;
    j["closure_complete"] = r.closure_complete;
    j["hermite_certified"] = r.hermite_certified;
    auto nodes = nlohmann::json::array();
    for (const auto& n : r.basis_nodes) nodes.push_back({{"depth", n.depth}, {"offset", n.offset}});
    j["basis_nodes"] = std::move(nodes);
    return j;
}

}  // namespace fibreg
