#pragma once

#include "qcsplab/algebras.hpp"
#include "qcsplab/clone.hpp"
#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/gadgets.hpp"
#include "qcsplab/io.hpp"
#include "qcsplab/model.hpp"
#include "qcsplab/naesat.hpp"
#include "qcsplab/powers.hpp"
#include "qcsplab/sentence.hpp"
#include "qcsplab/solver.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace qcsplab {

// Runs body(i) for i in [0, count) on up to `jobs` threads. Callers write
// results into per-index slots, so aggregation order never depends on timing.
template <typename F>
auto parallel_for(std::size_t count, std::size_t jobs, F && body) -> void
{
    if (jobs <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(jobs, count); ++w)
        workers.emplace_back([&] {
            while (true) {
                auto i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    body(i);
                }
                catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (! error)
                        error = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto & t : workers)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

struct SuiteOptions {
    std::size_t jobs = 1;
    std::uint64_t budget = default_budget;
    // counterexamples listed verbatim in the report; the count is always exact
    std::size_t max_listed = 50;
};

namespace detail {

    struct Outcome {
        bool agree = true;
        // the instance ran out of budget and was not decided
        bool skipped = false;
        std::string detail;
    };

    // parallel_for over outcome slots; an instance that exceeds the budget is
    // marked skipped instead of aborting the whole suite.
    template <typename F>
    auto run_guarded(std::vector<Outcome> & outcomes, std::size_t jobs, F && body) -> void
    {
        parallel_for(outcomes.size(), jobs, [&](std::size_t i) {
            try {
                body(i);
            }
            catch (const BudgetExceeded & e) {
                outcomes[i].agree = false;
                outcomes[i].skipped = true;
                outcomes[i].detail = e.what();
            }
        });
    }

    inline auto summarize(json report, const std::vector<Outcome> & outcomes, std::size_t max_listed) -> json
    {
        std::size_t agreements = 0, skipped = 0;
        auto listed = json::array();
        json first_skip;
        for (auto & o : outcomes) {
            if (o.agree)
                ++agreements;
            else if (o.skipped) {
                if (skipped++ == 0)
                    first_skip = o.detail;
            }
            else if (listed.size() < max_listed)
                listed.push_back(o.detail);
        }
        report["instances"] = outcomes.size();
        report["agreements"] = agreements;
        report["counterexample_count"] = outcomes.size() - agreements - skipped;
        report["counterexamples"] = listed;
        report["partial"] = skipped > 0;
        if (skipped > 0) {
            report["budget_skipped"] = skipped;
            report["first_budget_error"] = first_skip;
        }
        return report;
    }

    inline auto cut_label(const CutPair & c) -> std::string { return to_string(c, Domain::of_size(c.domain_size())); }

    inline auto variable_names(std::size_t v) -> std::vector<std::string>
    {
        std::vector<std::string> out;
        for (std::size_t i = 1; i <= v; ++i)
            out.push_back("x" + std::to_string(i));
        return out;
    }

} // namespace detail

// Cuts over a domain of size n with both alpha \ beta and beta \ alpha nonempty.
inline auto separating_cuts(std::size_t n) -> std::vector<CutPair>
{
    std::vector<CutPair> out;
    for (auto & c : all_cut_pairs(n))
        if (! c.alpha_only().empty() && ! c.beta_only().empty())
            out.push_back(c);
    return out;
}

inline auto intersecting_cuts(std::size_t n) -> std::vector<CutPair>
{
    std::vector<CutPair> out;
    for (auto & c : all_cut_pairs(n))
        if (c.intersects())
            out.push_back(c);
    return out;
}

// Every NAE instance over 1..max_vars variables with 1..max_clauses clauses,
// clauses being arbitrary ordered triples (repetition allowed).
inline auto all_nae_instances(std::size_t max_vars, std::size_t max_clauses) -> std::vector<NAEInstance>
{
    std::vector<NAEInstance> out;
    for (std::size_t v = 1; v <= max_vars; ++v)
        for (std::size_t c = 1; c <= max_clauses; ++c) {
            auto triples = all_tuples(v, 3);
            std::vector<std::size_t> pick(c, 0);
            while (true) {
                NAEInstance inst{detail::variable_names(v), {}};
                for (auto p : pick)
                    inst.clauses.push_back({triples[p][0], triples[p][1], triples[p][2]});
                out.push_back(std::move(inst));
                std::size_t q = c;
                while (q-- > 0) {
                    if (++pick[q] < triples.size())
                        break;
                    pick[q] = 0;
                }
                if (q == static_cast<std::size_t>(-1))
                    break;
            }
        }
    return out;
}

// NAE satisfiability against the negated QCSP verdict of the reduction.
inline auto verify_theorem3(const std::vector<CutPair> & cuts, std::size_t max_vars, std::size_t max_clauses, const SuiteOptions & opt = {}) -> json
{
    auto instances = all_nae_instances(max_vars, max_clauses);
    std::vector<Structure> structures;
    json cut_labels = json::array();
    for (auto & cut : cuts) {
        if (cut.alpha_only().empty() || cut.beta_only().empty())
            throw InvalidArgument("cut " + detail::cut_label(cut) + " does not separate: both differences must be nonempty");
        auto d = Domain::of_size(cut.domain_size());
        Structure s{d, {}, {}, false};
        for (std::size_t k = 1; k <= max_clauses; ++k)
            s.relations.push_back(build_tau(d, cut, k, opt.budget));
        structures.push_back(std::move(s));
        cut_labels.push_back(detail::cut_label(cut));
    }
    std::vector<detail::Outcome> outcomes(cuts.size() * instances.size());
    detail::run_guarded(outcomes, opt.jobs, [&](std::size_t i) {
        auto c = i / instances.size();
        auto & inst = instances[i % instances.size()];
        auto & s = structures[c];
        auto sat = brute_naesat(inst);
        auto phi = naesat_sentence(inst, s.domain);
        auto verdict = evaluate_qcsp(phi, s, {opt.budget, false}).verdict;
        outcomes[i].agree = sat == ! verdict;
        if (! outcomes[i].agree)
            outcomes[i].detail = "cut " + detail::cut_label(cuts[c]) + " | " + to_string(phi, s.domain) + " | nae-satisfiable=" + (sat ? "true" : "false")
                + " qcsp=" + (verdict ? "true" : "false");
    });
    json report{{"suite", "theorem3"}, {"params", {{"cuts", cut_labels}, {"max_vars", max_vars}, {"max_clauses", max_clauses}}}};
    std::size_t satisfiable = 0;
    for (auto & inst : instances)
        satisfiable += brute_naesat(inst);
    report["nae_instances"] = instances.size();
    report["nae_satisfiable"] = satisfiable;
    return detail::summarize(std::move(report), outcomes, opt.max_listed);
}

// The bounded sentence grammar for the tau decision procedure sweep. Shapes:
//   tau1: one tau_1 atom over variables and constants, plus no equality, one
//         v = c atom, or two clashing v = c, v = c' atoms;
//   tau2: one tau_2 atom, over variables and constants when v <= 3 and over
//         variables only when v = 4;
//   tau1x2: two tau_1 atoms over variables, v <= 3.
// Every prefix in {A, E}^v is used. Sentences are addressed by index so the
// sweep never materializes them all.
class TauSentenceGrammar {
public:
    enum class Shape { tau1, tau2, tau1x2 };

    struct Block {
        std::size_t vars;
        Shape shape;
        std::uint64_t count;
    };

    TauSentenceGrammar(std::size_t n, std::size_t max_vars) :
        n_(n)
    {
        for (std::size_t v = 1; v <= max_vars; ++v) {
            auto prefixes = saturating_pow(2, v);
            blocks_.push_back({v, Shape::tau1, prefixes * saturating_pow(v + n, 3) * equality_options(v)});
            blocks_.push_back({v, Shape::tau2, prefixes * saturating_pow(v <= 3 ? v + n : v, 6)});
            if (v <= 3)
                blocks_.push_back({v, Shape::tau1x2, prefixes * saturating_pow(v, 6)});
        }
        for (auto & b : blocks_)
            total_ += b.count;
    }

    auto size() const -> std::uint64_t { return total_; }
    auto blocks() const -> const std::vector<Block> & { return blocks_; }

    auto sentence(std::uint64_t index) const -> PHSentence
    {
        for (auto & b : blocks_) {
            if (index < b.count)
                return build(b, index);
            index -= b.count;
        }
        throw InvalidArgument("sentence index out of range");
    }

private:
    auto equality_options(std::size_t v) const -> std::uint64_t { return 1 + v * n_ + v * (n_ * (n_ - 1) / 2); }

    // index digits, least significant first: prefix, then arguments, then extras
    auto build(const Block & b, std::uint64_t index) const -> PHSentence
    {
        PHSentence s;
        auto v = b.vars;
        auto prefix = index % saturating_pow(2, v);
        index /= saturating_pow(2, v);
        for (std::size_t i = 0; i < v; ++i)
            s.prefix.push_back({(prefix >> i & 1) ? Quantifier::exists : Quantifier::forall, "x" + std::to_string(i + 1)});
        auto term = [&](std::uint64_t t) { return t < v ? Term::var(t) : Term::constant(static_cast<Element>(t - v)); };
        auto atom = [&](const std::string & rel, std::size_t arity, std::uint64_t alphabet) {
            Atom a{rel, {}};
            for (std::size_t i = 0; i < arity; ++i) {
                a.args.push_back(term(index % alphabet));
                index /= alphabet;
            }
            return a;
        };
        switch (b.shape) {
        case Shape::tau1: {
            s.body.push_back(atom("tau_1", 3, v + n_));
            auto eq = index;
            if (eq == 0)
                break;
            eq -= 1;
            if (eq < v * n_) {
                s.body.push_back(Atom{std::string(equality_relation_name), {Term::var(eq / n_), Term::constant(static_cast<Element>(eq % n_))}});
                break;
            }
            eq -= v * n_;
            auto pairs = n_ * (n_ - 1) / 2;
            auto var = eq / pairs;
            auto which = eq % pairs;
            for (Element a = 0; a < n_; ++a)
                for (Element c = a + 1; c < n_; ++c)
                    if (which-- == 0) {
                        s.body.push_back(Atom{std::string(equality_relation_name), {Term::var(var), Term::constant(a)}});
                        s.body.push_back(Atom{std::string(equality_relation_name), {Term::var(var), Term::constant(c)}});
                    }
            break;
        }
        case Shape::tau2:
            s.body.push_back(atom("tau_2", 6, v <= 3 ? v + n_ : v));
            break;
        case Shape::tau1x2:
            s.body.push_back(atom("tau_1", 3, v));
            s.body.push_back(atom("tau_1", 3, v));
            break;
        }
        return s;
    }

    std::size_t n_;
    std::vector<Block> blocks_;
    std::uint64_t total_ = 0;
};

// decide_tau_qcsp against evaluate_qcsp over the bounded grammar, for every
// given cut (all must have alpha ∩ beta nonempty).
inline auto verify_prop1(std::size_t n, std::size_t max_vars, const std::vector<CutPair> & cuts, const SuiteOptions & opt = {}) -> json
{
    TauSentenceGrammar grammar(n, max_vars);
    auto d = Domain::of_size(n);
    std::vector<Structure> structures;
    json cut_labels = json::array();
    for (auto & cut : cuts) {
        if (cut.domain_size() != n || ! cut.intersects())
            throw InvalidArgument("cut " + detail::cut_label(cut) + " must be over the domain and have alpha ∩ beta nonempty");
        structures.push_back({d, {build_tau(d, cut, 1, opt.budget), build_tau(d, cut, 2, opt.budget)}, {}, false});
        cut_labels.push_back(detail::cut_label(cut));
    }
    // sentences are shared by all cuts; preprocessing does not depend on the cut
    auto per_cut = grammar.size();
    std::vector<detail::Outcome> outcomes(cuts.size() * per_cut);
    std::vector<std::uint8_t> rules_fired(per_cut, 0);
    detail::run_guarded(outcomes, opt.jobs, [&](std::size_t i) {
        auto c = i / per_cut;
        auto idx = i % per_cut;
        auto phi = grammar.sentence(idx);
        if (c == 0) {
            std::uint8_t mask = 0;
            auto current = phi;
            while (auto step = preprocess_step(current)) {
                mask |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(step->rule));
                if (! step->result)
                    break;
                current = std::move(*step->result);
            }
            rules_fired[idx] = mask;
        }
        auto expected = evaluate_qcsp(phi, structures[c], {opt.budget, false}).verdict;
        auto got = decide_tau_qcsp(phi, cuts[c], opt.budget).verdict;
        outcomes[i].agree = expected == got;
        if (! outcomes[i].agree)
            outcomes[i].detail = "cut " + detail::cut_label(cuts[c]) + " | " + to_string(phi, d) + " | evaluate=" + (expected ? "true" : "false")
                + " decide=" + (got ? "true" : "false");
    });
    json rule_counts = json::object();
    for (auto r : {PreprocessRule::trivial_equality, PreprocessRule::universal_constant, PreprocessRule::clashing_constants,
             PreprocessRule::drop_isolated, PreprocessRule::substitute}) {
        std::size_t hits = 0;
        for (auto m : rules_fired)
            hits += (m >> static_cast<unsigned>(r)) & 1;
        rule_counts[to_string(r)] = hits;
    }
    json report{{"suite", "prop1"}, {"params", {{"n", n}, {"max_vars", max_vars}, {"cuts", cut_labels}}}};
    report["sentences_per_cut"] = per_cut;
    report["preprocessing_rule_hits"] = rule_counts;
    return detail::summarize(std::move(report), outcomes, opt.max_listed);
}

// The near-unanimity operation of the given arity against tau_1..tau_kmax, for
// every intersecting cut over a domain of size n.
inline auto verify_prop2(std::size_t n, std::size_t k_max, std::size_t arity, const SuiteOptions & opt = {}) -> json
{
    auto d = Domain::of_size(n);
    auto cuts = intersecting_cuts(n);
    std::vector<detail::Outcome> outcomes(cuts.size() * (k_max + 1));
    std::vector<json> rows(outcomes.size());
    detail::run_guarded(outcomes, opt.jobs, [&](std::size_t i) {
        auto & cut = cuts[i / (k_max + 1)];
        auto k = i % (k_max + 1);
        auto f = build_nu_operation(d, cut, arity);
        if (k == 0) {
            outcomes[i].agree = check_nu_identities(f);
            rows[i] = {{"cut", detail::cut_label(cut)}, {"check", "nu-identities"}, {"ok", outcomes[i].agree}};
            if (! outcomes[i].agree)
                outcomes[i].detail = "cut " + detail::cut_label(cut) + ": near-unanimity identities fail";
            return;
        }
        auto r = preserves_nu_pigeonhole(f, build_tau(d, cut, k, opt.budget), opt.budget);
        std::string status = r.status == NuPreservationResult::Status::preserved ? "preserved"
            : r.status == NuPreservationResult::Status::violated                  ? "violated"
                                                                                  : "unresolved";
        outcomes[i].agree = r.status == NuPreservationResult::Status::preserved;
        rows[i] = {{"cut", detail::cut_label(cut)}, {"check", "tau_" + std::to_string(k)}, {"status", status},
            {"images_examined", r.images_examined}, {"needed_full_check", r.unresolved_image.has_value()}};
        if (! outcomes[i].agree) {
            outcomes[i].detail = "cut " + detail::cut_label(cut) + " tau_" + std::to_string(k) + ": " + status;
            if (r.witness)
                outcomes[i].detail += " image " + json(r.witness->image).dump();
        }
    });
    json report{{"suite", "prop2"}, {"params", {{"n", n}, {"k_max", k_max}, {"arity", arity}}}};
    report["checks"] = rows;
    return detail::summarize(std::move(report), outcomes, opt.max_listed);
}

// build_tau against the conjunction-of-sigma definition, every cut over
// domains of size 2..n_max, k = 1..k_max.
inline auto verify_taudef(std::size_t n_max, std::size_t k_max, const SuiteOptions & opt = {}) -> json
{
    struct Item {
        CutPair cut;
        std::size_t k;
    };
    std::vector<Item> items;
    for (std::size_t n = 2; n <= n_max; ++n)
        for (auto & c : all_cut_pairs(n))
            for (std::size_t k = 1; k <= k_max; ++k)
                items.push_back({c, k});
    std::vector<detail::Outcome> outcomes(items.size());
    std::vector<std::uint64_t> tuples_compared(items.size(), 0);
    detail::run_guarded(outcomes, opt.jobs, [&](std::size_t i) {
        auto & [cut, k] = items[i];
        auto d = Domain::of_size(cut.domain_size());
        auto tau = build_tau(d, cut, k, opt.budget);
        auto conj = tau_via_sigma_conjunction(d, cut, k, opt.budget);
        tuples_compared[i] = tau.extension->capacity();
        std::uint64_t mismatches = 0;
        std::optional<Tuple> first;
        for (std::uint64_t code = 0; code < tau.extension->capacity(); ++code)
            if (tau.extension->contains_code(code) != conj.extension->contains_code(code)) {
                ++mismatches;
                if (! first)
                    first = decode_tuple(code, d.size(), 3 * k);
            }
        auto rho_size = build_rho_prime(d, cut).dnf->size();
        bool dnf_linear = tau.dnf->size() == k * rho_size;
        outcomes[i].agree = mismatches == 0 && dnf_linear;
        if (! outcomes[i].agree)
            outcomes[i].detail = "cut " + detail::cut_label(cut) + " k=" + std::to_string(k) + ": " + std::to_string(mismatches) + " mismatches"
                + (first ? " first " + json(*first).dump() : "") + (dnf_linear ? "" : ", dnf size not k times that of rho'");
    });
    std::uint64_t total = 0;
    for (auto t : tuples_compared)
        total += t;
    json report{{"suite", "taudef"}, {"params", {{"n_max", n_max}, {"k_max", k_max}}}};
    report["tuples_compared"] = total;
    return detail::summarize(std::move(report), outcomes, opt.max_listed);
}

// f(m) = n^m for the projections-only algebra, m = 1..m_max.
inline auto verify_powers_sanity(std::size_t n, std::size_t m_max, const SuiteOptions & opt = {}) -> json
{
    auto alg = projections_algebra(n);
    std::vector<detail::Outcome> outcomes(m_max);
    json rows = json::array();
    for (std::size_t m = 1; m <= m_max; ++m) {
        auto expected = saturating_pow(n, m);
        std::size_t f = 0;
        try {
            f = min_generating_size(alg, m, opt.budget).size;
        }
        catch (const BudgetExceeded & e) {
            outcomes[m - 1] = {false, true, e.what()};
            rows.push_back({{"m", m}, {"f", nullptr}, {"n_pow_m", expected}});
            continue;
        }
        outcomes[m - 1].agree = f == expected;
        if (! outcomes[m - 1].agree)
            outcomes[m - 1].detail = "m=" + std::to_string(m) + ": f=" + std::to_string(f) + ", expected " + std::to_string(expected);
        rows.push_back({{"m", m}, {"f", f}, {"n_pow_m", expected}});
    }
    json report{{"suite", "powers-sanity"}, {"params", {{"algebra", alg.name}, {"n", n}, {"m_max", m_max}}}};
    report["rows"] = rows;
    return detail::summarize(std::move(report), outcomes, opt.max_listed);
}

struct RandomPi2Instance {
    Structure structure;
    PHSentence sentence;
};

// Deterministic for a given seed: only raw mt19937_64 output is used.
inline auto random_pi2_instance(std::mt19937_64 & rng, std::size_t max_n = 3, std::size_t max_m = 3) -> RandomPi2Instance
{
    auto pick = [&](std::uint64_t k) { return static_cast<std::size_t>(rng() % k); };
    auto n = 2 + pick(max_n - 1);
    auto d = Domain::of_size(n);
    RandomPi2Instance out{{d, {}, {}, false}, {}};
    auto relations = 1 + pick(2);
    for (std::size_t r = 0; r < relations; ++r) {
        auto arity = 1 + pick(3);
        std::vector<Tuple> rows;
        for (auto & t : all_tuples(n, arity))
            if (pick(3) != 0)
                rows.push_back(t);
        out.structure.relations.push_back(Relation::from_tuples("R" + std::to_string(r), n, arity, rows));
    }
    auto m = 1 + pick(max_m);
    auto e = pick(3);
    for (std::size_t i = 0; i < m; ++i)
        out.sentence.prefix.push_back({Quantifier::forall, "u" + std::to_string(i + 1)});
    for (std::size_t i = 0; i < e; ++i)
        out.sentence.prefix.push_back({Quantifier::exists, "y" + std::to_string(i + 1)});
    auto vars = m + e;
    auto atoms = 1 + pick(4);
    for (std::size_t a = 0; a < atoms; ++a) {
        Atom atom;
        std::size_t arity;
        if (pick(6) == 0) {
            atom.relation = equality_relation_name;
            arity = 2;
        }
        else {
            auto & r = out.structure.relations[pick(relations)];
            atom.relation = r.name;
            arity = r.arity;
        }
        for (std::size_t i = 0; i < arity; ++i)
            atom.args.push_back(pick(5) == 0 ? Term::constant(static_cast<Element>(pick(n))) : Term::var(pick(vars)));
        out.sentence.body.push_back(std::move(atom));
    }
    return out;
}

// Nonempty binary relations invariant under alg: closures of subsets of A^2.
inline auto binary_subpowers(const Algebra & alg, std::uint64_t budget = default_budget) -> std::vector<std::vector<Tuple>>
{
    auto n = alg.domain.size();
    auto pairs = all_tuples(n, 2);
    if (pairs.size() >= 20)
        throw BudgetExceeded("binary subpower enumeration", saturating_pow(2, pairs.size()), budget);
    std::set<std::vector<Tuple>> found;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
        std::vector<Tuple> seeds;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (mask >> i & 1)
                seeds.push_back(pairs[i]);
        found.insert(generate_subpower(alg, seeds, budget));
    }
    return {found.begin(), found.end()};
}

// Part one: evaluate_pi2_restricted with U = A^m against evaluate_qcsp on
// `count` seeded random sentences. Part two: U = switch tuples with at most k
// switches against full evaluation, on structures whose relations are binary
// subpowers of an algebra verified k-switchable for m <= 3.
inline auto verify_pi2(std::uint64_t seed, std::size_t count, const std::vector<std::string> & algebras, std::size_t k, const SuiteOptions & opt = {})
    -> json
{
    std::mt19937_64 rng(seed);
    std::vector<RandomPi2Instance> random;
    for (std::size_t i = 0; i < count; ++i)
        random.push_back(random_pi2_instance(rng));
    std::vector<detail::Outcome> outcomes(count);
    std::size_t true_count = 0;
    std::vector<char> truth(count, 0);
    detail::run_guarded(outcomes, opt.jobs, [&](std::size_t i) {
        auto & [s, phi] = random[i];
        auto m = phi.leading_universals();
        auto expected = evaluate_qcsp(phi, s, {opt.budget, false}).verdict;
        auto got = evaluate_pi2_restricted(phi, s, all_tuples(s.domain.size(), m), opt.budget);
        truth[i] = expected;
        outcomes[i].agree = expected == got;
        if (! outcomes[i].agree)
            outcomes[i].detail = "random #" + std::to_string(i) + ": " + to_string(phi, s.domain) + " | evaluate=" + (expected ? "true" : "false")
                + " restricted=" + (got ? "true" : "false");
    });
    for (auto t : truth)
        true_count += t;

    json switch_rows = json::array();
    std::vector<detail::Outcome> switch_outcomes;
    for (auto & descriptor : algebras) {
        auto alg = builtin_algebra(descriptor);
        auto n = alg.domain.size();
        bool switchable = true;
        for (std::size_t m = 1; m <= 3; ++m)
            switchable = switchable && test_switchability(alg, m, k, opt.budget);
        json row{{"algebra", descriptor}, {"k", k}, {"switchable_up_to_m3", switchable}};
        if (! switchable) {
            switch_rows.push_back(row);
            continue;
        }
        auto subpowers = binary_subpowers(alg, opt.budget);
        Structure s{alg.domain, {}, {}, false};
        for (std::size_t r = 0; r < subpowers.size(); ++r)
            s.relations.push_back(Relation::from_tuples("S" + std::to_string(r), n, 2, subpowers[r]));
        // two atoms per body only while the relation count keeps the sweep small
        std::size_t max_atoms = subpowers.size() <= 16 ? 2 : 1;
        std::size_t instances = 0, agreements = 0, true_instances = 0;
        for (std::size_t m = 1; m <= 3; ++m) {
            auto vars = m + 1;
            PHSentence base;
            for (std::size_t i = 0; i < m; ++i)
                base.prefix.push_back({Quantifier::forall, "u" + std::to_string(i + 1)});
            base.prefix.push_back({Quantifier::exists, "y"});
            std::vector<Atom> atoms;
            for (auto & r : s.relations)
                for (std::size_t a = 0; a < vars; ++a)
                    for (std::size_t b = 0; b < vars; ++b)
                        atoms.push_back({r.name, {Term::var(a), Term::var(b)}});
            std::vector<PHSentence> sentences;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                auto phi = base;
                phi.body = {atoms[i]};
                sentences.push_back(phi);
                if (max_atoms >= 2)
                    for (auto j = i + 1; j < atoms.size(); ++j) {
                        phi.body = {atoms[i], atoms[j]};
                        sentences.push_back(phi);
                    }
            }
            auto universe = switch_tuples(n, m, k);
            std::vector<detail::Outcome> local(sentences.size());
            std::vector<char> local_truth(sentences.size(), 0);
            detail::run_guarded(local, opt.jobs, [&](std::size_t i) {
                auto expected = evaluate_qcsp(sentences[i], s, {opt.budget, false}).verdict;
                auto got = evaluate_pi2_restricted(sentences[i], s, universe, opt.budget);
                local_truth[i] = expected;
                local[i].agree = expected == got;
                if (! local[i].agree)
                    local[i].detail = descriptor + " k=" + std::to_string(k) + ": " + to_string(sentences[i], s.domain) + " | evaluate="
                        + (expected ? "true" : "false") + " restricted=" + (got ? "true" : "false");
            });
            for (std::size_t i = 0; i < local.size(); ++i) {
                ++instances;
                agreements += local[i].agree;
                true_instances += local_truth[i];
                switch_outcomes.push_back(std::move(local[i]));
            }
        }
        row["relations"] = subpowers.size();
        row["instances"] = instances;
        row["agreements"] = agreements;
        row["true_instances"] = true_instances;
        switch_rows.push_back(row);
    }

    json report{{"suite", "pi2"}, {"params", {{"seed", seed}, {"count", count}, {"algebras", algebras}, {"k", k}}}};
    report["random"] = detail::summarize(json::object(), outcomes, opt.max_listed);
    report["random"]["true_instances"] = true_count;
    report["switch"] = detail::summarize(json::object(), switch_outcomes, opt.max_listed);
    report["switch"]["algebras"] = switch_rows;
    std::vector<detail::Outcome> all = outcomes;
    all.insert(all.end(), switch_outcomes.begin(), switch_outcomes.end());
    return detail::summarize(std::move(report), all, opt.max_listed);
}

} // namespace qcsplab
