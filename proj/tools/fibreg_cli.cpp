#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fibreg/fibreg.hpp"

using namespace fibreg;

namespace {

enum Exit : int { Ok = 0, Usage = 1, VerificationFailure = 2, Violation = 3 };

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void require_prime(u64 p) {
    if (!is_prime(p)) throw usage_error(std::to_string(p) + " is not prime");
}

// ---------------------------------------------------------------------------
// valuation
// ---------------------------------------------------------------------------

struct ValuationArgs {
    u64 p = 0, n = 0;
    std::string method = "lengyel";
    std::string format = "human";
};

unsigned matrix_valuation(u64 p, u64 n) {
    const LinearRep rep = build_for_prime(p);
    return static_cast<unsigned>(evaluate(rep, n - 1).get_ui());
}

int cmd_valuation(const ValuationArgs& a) {
    require_prime(a.p);
    if (a.n == 0) throw usage_error("n must be >= 1");
    if (a.method != "all") {
        unsigned v = a.method == "direct" ? direct_valuation(a.p, a.n)
                     : a.method == "matrix" ? matrix_valuation(a.p, a.n)
                                            : lengyel_valuation(a.p, a.n);
        if (a.format == "json")
            std::cout << nlohmann::json{{"p", a.p}, {"n", a.n}, {"method", a.method}, {"value", v}}.dump() << '\n';
        else
            std::cout << v << '\n';
        return Ok;
    }
    const unsigned d = direct_valuation(a.p, a.n);
    const unsigned l = lengyel_valuation(a.p, a.n);
    const unsigned m = matrix_valuation(a.p, a.n);
    const bool match = d == l && l == m;
    if (a.format == "json")
        std::cout << nlohmann::json{{"p", a.p}, {"n", a.n}, {"direct", d}, {"lengyel", l}, {"matrix", m},
                                    {"match", match}}
                         .dump()
                  << '\n';
    else if (a.format == "csv")
        std::cout << "p,n,direct,lengyel,matrix,match\n"
                  << a.p << ',' << a.n << ',' << d << ',' << l << ',' << m << ',' << (match ? "true" : "false")
                  << '\n';
    else
        std::cout << d << ", " << l << ", " << m << ", " << (match ? "MATCH" : "MISMATCH") << '\n';
    return match ? Ok : VerificationFailure;
}

// ---------------------------------------------------------------------------
// periods
// ---------------------------------------------------------------------------

int cmd_periods(u64 m, const std::string& format) {
    if (m < 2) throw usage_error("m must be >= 2");
    const PeriodData d = period_data(m);
    const bool divides = d.restricted_divides_pisano();
    if (format == "json")
        std::cout << nlohmann::json{{"m", m}, {"alpha", d.restricted}, {"pi", d.pisano}, {"alpha_divides_pi", divides}}
                         .dump()
                  << '\n';
    else if (format == "csv")
        std::cout << "m,alpha,pi,alpha_divides_pi\n"
                  << m << ',' << d.restricted << ',' << d.pisano << ',' << (divides ? "true" : "false") << '\n';
    else
        std::cout << "alpha=" << d.restricted << " pi=" << d.pisano << " alpha|pi=" << (divides ? "yes" : "no")
                  << '\n';
    return divides ? Ok : VerificationFailure;
}

// ---------------------------------------------------------------------------
// rep
// ---------------------------------------------------------------------------

int cmd_rep(u64 p, const std::string& out_path, u64 verify_n) {
    require_prime(p);
    const LinearRep rep = build_for_prime(p);
    const std::string json = to_json(rep).dump();

    std::ostream* summary = &std::cout;
    if (out_path.empty()) {
        std::cout << json << '\n';
        summary = &std::cerr;
    } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot open " + out_path);
        f << json << '\n';
    }

    auto& s = *summary;
    if (rep.provenance == Provenance::DirectSum)
        s << "notice: nu_" << p << "(F_alpha) != 1; using the unconditional construction\n";
    s << "p=" << p << " rank=" << rep.dimension << " provenance=" << to_string(rep.provenance) << '\n';

    bool ok = true;
    for (const auto& r : verify_relations(p, verify_n)) {
        s << r.id << ": " << (r.verified() ? "pass" : "FAIL") << " (" << r.instances << " instances, n<=" << r.n_max
          << ")\n";
        ok = ok && r.verified();
    }
    const LinearRep back = linear_rep_from_json(nlohmann::json::parse(json));
    const RepEvaluator ev(back);
    const FibValuation val(p);
    std::size_t mismatches = 0;
    for (u64 n = 0; n <= verify_n; ++n)
        if (ev(n) != val(n + 1)) ++mismatches;
    s << "evaluation vs closed form, n<=" << verify_n << ": " << (mismatches ? "FAIL" : "pass") << '\n';
    return ok && mismatches == 0 ? Ok : VerificationFailure;
}

// ---------------------------------------------------------------------------
// rank
// ---------------------------------------------------------------------------

struct RankArgs {
    u64 p = 0;
    u64 scan = 0;
    std::size_t L = 0;
    unsigned max_depth = 10;
    bool include_special = false;
    bool cross_check = false;
    std::string format = "human";
};

void print_rank_human(const RankReport& r) {
    std::cout << "p=" << r.p << " class=" << to_string(r.prime_class) << " alpha=" << r.alpha << " pi=" << r.pisano
              << " rank=" << r.rank << " bound=" << r.theorem_bound;
    if (r.conjecture_applicable()) std::cout << " conjecture_holds=" << (r.conjecture_holds ? "true" : "false");
    std::cout << " L=" << r.truncation_length << " stabilized=" << (r.stabilized ? "true" : "false") << '\n';
}

int cmd_rank(const RankArgs& a) {
    KernelRankOptions opts;
    opts.truncation = a.L;
    opts.max_depth = a.max_depth;
    opts.cross_check = a.cross_check;

    std::vector<RankReport> reports;
    if (a.scan) {
        if (a.scan < 3) throw usage_error("--scan needs p_max >= 3");
        reports = conjecture_scan(a.scan, opts, a.include_special);
    } else {
        require_prime(a.p);
        reports.push_back(kernel_rank(a.p, opts));
    }

    if (a.format == "csv") {
        write_rank_csv_header(std::cout);
        for (const auto& r : reports) write_rank_csv_row(std::cout, r);
    } else if (a.format == "json") {
        auto arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(to_json(r));
        std::cout << (a.scan ? arr : arr.front()).dump() << '\n';
    } else {
        for (const auto& r : reports) print_rank_human(r);
    }

    int code = Ok;
    for (const auto& r : reports) {
        if (!r.stabilized) {
            std::cerr << "warning: p=" << r.p << " did not stabilize within L=" << r.truncation_length
                      << ", max_depth=" << a.max_depth << '\n';
            continue;
        }
        if (!r.bound_respected()) {
            std::cerr << "violation: p=" << r.p << " rank " << r.rank << " exceeds bound " << r.theorem_bound << '\n';
            code = Violation;
        }
        if (r.conjecture_applicable() && !r.conjecture_holds)
            std::cerr << "finding: p=" << r.p << " rank " << r.rank << " != alpha+1 = " << r.alpha_plus_one() << '\n';
    }
    return code;
}

// ---------------------------------------------------------------------------
// wall
// ---------------------------------------------------------------------------

int cmd_wall(u64 p, u64 scan, const std::string& format) {
    std::vector<u64> primes;
    if (scan) {
        if (scan < 2) throw usage_error("--scan needs p_max >= 2");
        primes = primes_up_to(scan);
    } else {
        require_prime(p);
        primes = {p};
    }
    std::vector<WallReport> rows(primes.size());
    parallel_for(primes.size(), [&](std::size_t i) { rows[i] = wall_check(primes[i]); });

    int code = Ok;
    if (format == "json") {
        auto arr = nlohmann::json::array();
        for (const auto& w : rows)
            arr.push_back({{"p", w.p},
                           {"alpha", w.alpha},
                           {"val_at_alpha", w.val_at_alpha},
                           {"pi_p", w.pi_p},
                           {"pi_p2", w.pi_p2},
                           {"wall_negative", w.wall_negative}});
        std::cout << arr.dump() << '\n';
    } else {
        std::cout << "p,alpha,val_at_alpha,pi_p,pi_p2,wall_negative\n";
        for (const auto& w : rows)
            std::cout << w.p << ',' << w.alpha << ',' << w.val_at_alpha << ',' << w.pi_p << ',' << w.pi_p2 << ','
                      << (w.wall_negative ? "true" : "false") << '\n';
    }
    for (const auto& w : rows) {
        if (!w.consistent()) {
            std::cerr << "inconsistent period data at p=" << w.p << '\n';
            code = VerificationFailure;
        } else if (!w.wall_negative) {
            std::cerr << "counterexample: nu_p(F_alpha(p)) = " << w.val_at_alpha << " at p=" << w.p << '\n';
            if (code == Ok) code = Violation;
        }
    }
    return code;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(const std::vector<u64>& primes, u64 n_max, u64 seed, std::size_t pairs) {
    if (primes.empty()) throw usage_error("verify needs at least one prime");
    for (u64 p : primes) require_prime(p);
    std::mt19937_64 rng(seed);
    bool ok = true;

    for (u64 p : primes) {
        std::size_t relation_failures = 0, families = 0;
        for (const auto& r : verify_relations(p, n_max)) {
            ++families;
            relation_failures += r.failure_count;
            for (const auto& f : r.failures)
                std::cout << "  " << r.id << " [" << f.instance << "] n=" << f.n << ": " << f.lhs << " != " << f.rhs
                          << '\n';
        }
        std::cout << "p=" << p << " relations: " << families << " families, " << relation_failures << " failures\n";

        const LinearRep rep = build_for_prime(p);
        const RepEvaluator ev(rep);
        const FibValuation lengyel(p);
        const DirectValuation direct(p);
        std::size_t mismatches = 0;
        for (u64 n = 1; n <= n_max; ++n) {
            const unsigned l = lengyel(n);
            if (direct(n) != l || ev(n - 1) != l) {
                if (++mismatches <= 8) std::cout << "  mismatch at n=" << n << '\n';
            }
        }
        std::cout << "p=" << p << " triple oracle n<=" << n_max << ": " << mismatches << " mismatches\n";
        ok = ok && relation_failures == 0 && mismatches == 0;

        if (classify_prime(p) == PrimeClass::OneFourMod5 && pairs > 0) {
            // Random zero-free digit strings and a shuffled copy of each.
            std::size_t checked = 0, failures = 0;
            std::uniform_int_distribution<u64> digit(1, p - 1);
            std::uniform_int_distribution<int> length(1, std::max(1, static_cast<int>(40 / std::log2(p + 1))));
            for (std::size_t t = 0; t < pairs; ++t) {
                std::vector<u64> d(static_cast<std::size_t>(length(rng)));
                for (auto& x : d) x = digit(rng);
                const u64 n = from_digits(p, d);
                std::shuffle(d.begin(), d.end(), rng);
                const u64 m = from_digits(p, d);
                try {
                    digit_sum_invariance_check(p, n, m);
                    ++checked;
                } catch (const std::logic_error& e) {
                    ++failures;
                    std::cout << "  digit permutation " << n << " vs " << m << ": " << e.what() << '\n';
                }
            }
            std::cout << "p=" << p << " digit permutations: " << checked << " checked, " << failures
                      << " failures (seed " << seed << ")\n";
            ok = ok && failures == 0;
        }
    }
    return ok ? Ok : VerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fibonacci p-adic valuations, their periods, and p-regular representations"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "human";
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"human", "json", "csv"}))
        ->capture_default_str();

    ValuationArgs va;
    auto* valuation = app.add_subcommand("valuation", "nu_p(F_n) by closed form, residues, or matrix product");
    valuation->add_option("p", va.p, "Prime")->required();
    valuation->add_option("n", va.n, "Index n >= 1")->required();
    valuation->add_option("--method", va.method)
        ->check(CLI::IsMember({"direct", "lengyel", "matrix", "all"}))
        ->capture_default_str();

    u64 m = 0;
    auto* periods = app.add_subcommand("periods", "Restricted period alpha(m) and Pisano period pi(m)");
    periods->add_option("m", m, "Modulus m >= 2")->required();

    u64 rep_p = 0, rep_verify = 1000;
    std::string rep_out;
    auto* rep = app.add_subcommand("rep", "Linear representation of n -> nu_p(F_{n+1}) as JSON");
    rep->add_option("p", rep_p, "Prime")->required();
    rep->add_option("--out", rep_out, "Write JSON here instead of stdout");
    rep->add_option("--verify", rep_verify, "Check relations and evaluation for n up to this")->capture_default_str();

    RankArgs ra;
    auto* rank = app.add_subcommand("rank", "Empirical rank of the p-kernel of n -> nu_p(F_{n+1})");
    auto* rank_p = rank->add_option("p", ra.p, "Prime");
    auto* rank_scan = rank->add_option("--scan", ra.scan, "All primes up to p_max (2 and 5 on request)");
    rank_p->excludes(rank_scan);
    rank->add_option("--L", ra.L, "Base truncation length (default max(1024, 8 p alpha))");
    rank->add_option("--max-depth", ra.max_depth)->capture_default_str()->check(CLI::PositiveNumber);
    rank->add_flag("--include-special", ra.include_special, "Include p = 2 and p = 5 in a scan");
    rank->add_flag("--cross-check", ra.cross_check, "Also expand children of dependent nodes");

    u64 wall_p = 0, wall_scan = 0;
    auto* wall = app.add_subcommand("wall", "Check nu_p(F_alpha(p)) = 1 and pi(p^2) != pi(p)");
    auto* wall_p_opt = wall->add_option("p", wall_p, "Prime");
    auto* wall_scan_opt = wall->add_option("--scan", wall_scan, "All primes up to p_max");
    wall_p_opt->excludes(wall_scan_opt);

    std::vector<u64> verify_primes;
    u64 verify_n = 2000, seed = 1;
    std::size_t verify_pairs = 200;
    auto* verify = app.add_subcommand("verify", "Relation suites, triple-oracle sweep, digit permutations");
    verify->add_option("primes", verify_primes, "Primes")->required();
    verify->add_option("--n-max", verify_n)->capture_default_str();
    verify->add_option("--seed", seed)->capture_default_str();
    verify->add_option("--pairs", verify_pairs, "Random digit permutations per prime")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Ok : Usage;
    }

    try {
        if (*valuation) {
            va.format = format;
            return cmd_valuation(va);
        }
        if (*periods) return cmd_periods(m, format);
        if (*rep) return cmd_rep(rep_p, rep_out, rep_verify);
        if (*rank) {
            if (!*rank_p && !*rank_scan) throw usage_error("rank needs a prime or --scan");
            ra.format = format;
            return cmd_rank(ra);
        }
        if (*wall) {
            if (!*wall_p_opt && !*wall_scan_opt) throw usage_error("wall needs a prime or --scan");
            return cmd_wall(wall_p, wall_scan, format);
        }
        if (*verify) return cmd_verify(verify_primes, verify_n, seed, verify_pairs);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return VerificationFailure;
    }
    return Usage;
}
