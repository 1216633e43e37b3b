#include "qcsplab/algebras.hpp"
#include "qcsplab/canonical.hpp"
#include "qcsplab/clone.hpp"
#include "qcsplab/gadgets.hpp"
#include "qcsplab/io.hpp"
#include "qcsplab/naesat.hpp"
#include "qcsplab/powers.hpp"
#include "qcsplab/solver.hpp"
#include "qcsplab/suites.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace qcsplab;

namespace {

constexpr int schema_version = 1;

// Exit codes: decision verdicts use 0 (true / passed) and 1 (false / failed).
constexpr int exit_true = 0;
constexpr int exit_false = 1;
constexpr int exit_error = 2;

class UsageError : public Error {
public:
    explicit UsageError(const std::string & what) : Error(what) {}
};

auto sha256_hex(const std::string & data) -> std::string
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    auto ctx = EVP_MD_CTX_new();
    if (! ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 || EVP_DigestUpdate(ctx, data.data(), data.size()) != 1
        || EVP_DigestFinal_ex(ctx, digest, &length) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream out;
    for (unsigned int i = 0; i < length; ++i)
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return out.str();
}

struct Globals {
    std::string budget_text = std::to_string(default_budget);
    std::uint64_t seed = 0;
    std::string report_path;
    std::size_t jobs = 1;

    auto budget() const -> std::uint64_t
    {
        double value = 0;
        try {
            std::size_t used = 0;
            value = std::stod(budget_text, &used);
            if (used != budget_text.size())
                throw std::invalid_argument("trailing characters");
        }
        catch (const std::exception &) {
            throw UsageError("--budget must be a number, got '" + budget_text + "'");
        }
        if (! (value >= 1) || value > 1.8e19)
            throw UsageError("--budget must be between 1 and 1.8e19");
        return static_cast<std::uint64_t>(std::llround(value));
    }

    auto suite_options() const -> SuiteOptions
    {
        SuiteOptions opt;
        opt.jobs = std::max<std::size_t>(jobs, 1);
        opt.budget = budget();
        return opt;
    }
};

// State of one run: parameters and input files feed the digest, results and
// the exit code come from the subcommand.
struct Run {
    std::string command;
    json params = json::object();
    std::vector<std::pair<std::string, std::string>> inputs;
    json results = json::object();
    int exit_code = exit_true;

    auto read_input(const std::string & path) -> std::string
    {
        auto text = read_text_file(path);
        inputs.emplace_back(path, text);
        return text;
    }

    auto structure(const std::string & path, std::uint64_t budget) -> Structure
    {
        read_input(path);
        return load_structure(path, budget);
    }

    auto sentence(const std::string & path, const Domain & d) -> PHSentence
    {
        read_input(path);
        return load_sentence(path, d);
    }

    auto digest() const -> std::string
    {
        std::string data = command + '\0' + params.dump();
        for (auto & [path, text] : inputs)
            data += '\0' + text;
        return sha256_hex(data);
    }

    auto input_list() const -> json
    {
        auto out = json::array();
        for (auto & [path, text] : inputs)
            out.push_back({{"path", path}, {"sha256", sha256_hex(text)}});
        return out;
    }
};

auto write_output(const Globals & g, const json & report) -> void
{
    auto text = report.dump(2) + "\n";
    std::cout << text;
    if (! g.report_path.empty())
        write_text_file(g.report_path, text);
}

auto error_object(const std::string & command, const std::exception & e) -> json
{
    json err{{"message", e.what()}};
    if (auto f = dynamic_cast<const FileError *>(&e)) {
        err["type"] = "file";
        err["path"] = f->path();
    }
    else if (auto p = dynamic_cast<const ParseError *>(&e)) {
        err["type"] = "parse";
        err["position"] = p->position();
        if (p->line())
            err["line"] = p->line();
    }
    else if (auto b = dynamic_cast<const BudgetExceeded *>(&e)) {
        err["type"] = "budget";
        err["required"] = b->required();
        err["budget"] = b->budget();
    }
    else if (dynamic_cast<const UsageError *>(&e))
        err["type"] = "usage";
    else if (dynamic_cast<const InvalidArgument *>(&e))
        err["type"] = "invalid-argument";
    else
        err["type"] = "internal";
    return {{"schema_version", schema_version}, {"command", command}, {"error", err}};
}

auto parse_cut_text(const std::string & text, std::size_t n) -> CutPair
{
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw UsageError("a cut looks like 0,1:1,2, got '" + text + "'");
    if (n == 0) {
        // domain size defaults to one more than the largest element mentioned
        std::size_t largest = 0;
        std::string digits;
        for (char c : text + ",") {
            if (std::isdigit(static_cast<unsigned char>(c)))
                digits += c;
            else {
                if (! digits.empty())
                    largest = std::max<std::size_t>(largest, std::stoul(digits));
                digits.clear();
            }
        }
        n = largest + 1;
    }
    return parse_cut(text, Domain::of_size(n));
}

auto cut_from_sides(const std::string & alpha, const std::string & beta, std::size_t n) -> CutPair
{
    return parse_cut_text(alpha + ":" + beta, n);
}

auto parse_adversary(const std::string & text, std::size_t n, std::size_t m) -> AdversarySet
{
    if (text == "full")
        return full_adversary(n, m);
    if (text.rfind("switch:", 0) == 0) {
        auto k = std::stoul(text.substr(7));
        return switch_adversary(n, m, k);
    }
    throw UsageError("--adversary must be full or switch:<k>, got '" + text + "'");
}

auto relation_json(const Relation & r, const Domain & d, bool emit_extension) -> json
{
    json out{{"name", r.name}, {"arity", r.arity}};
    if (r.dnf) {
        out["dnf"] = to_string(*r.dnf, d);
        out["dnf_disjuncts"] = r.dnf->disjuncts.size();
        out["dnf_size"] = r.dnf->size();
    }
    if (r.extension) {
        out["extension_size"] = r.extension->size();
        if (emit_extension) {
            auto rows = json::array();
            for (auto & t : r.extension->tuples())
                rows.push_back(tuple_to_json(t, d));
            out["extension"] = rows;
        }
    }
    else
        out["extension_size"] = nullptr;
    return out;
}

auto verdict_code(bool v) -> int { return v ? exit_true : exit_false; }

auto suite_exit(const json & report) -> int
{
    if (report.value("partial", false))
        return exit_error;
    return report["counterexample_count"].get<std::uint64_t>() == 0 ? exit_true : exit_false;
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Experiments with quantified constraint satisfaction over finite structures"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--budget", g.budget_text, "work budget for searches and enumerations (accepts 1e7)");
    app.add_option("--seed", g.seed, "seed for randomized sweeps")->capture_default_str();
    app.add_option("--report", g.report_path, "also write the report to this path");
    app.add_option("--jobs", g.jobs, "worker threads for suites")->capture_default_str()->check(CLI::PositiveNumber);

    Run run;
    std::function<void()> action;

    // pol
    std::string pol_structure;
    std::size_t pol_arity = 2, pol_list = 50;
    bool pol_idempotent = false;
    auto pol = app.add_subcommand("pol", "enumerate polymorphisms of a structure");
    pol->add_option("--structure", pol_structure, "structure file")->required();
    pol->add_option("--arity", pol_arity)->capture_default_str()->check(CLI::PositiveNumber);
    pol->add_flag("--idempotent", pol_idempotent);
    pol->add_option("--max-list", pol_list, "operations listed in the report")->capture_default_str();
    pol->callback([&] {
        action = [&] {
            run.params = {{"arity", pol_arity}, {"idempotent", pol_idempotent}, {"max_list", pol_list}};
            auto s = run.structure(pol_structure, g.budget());
            auto listed = json::array();
            auto count = for_each_polymorphism(s, pol_arity, pol_idempotent, g.budget(), [&](const Operation & f) {
                if (listed.size() < pol_list)
                    listed.push_back(operation_to_json(f, s.domain));
            });
            run.results = {{"count", count}, {"operations", listed}};
        };
    });

    // powers
    std::string powers_algebra, powers_builtin, powers_mode = "exact";
    std::size_t powers_max_m = 3, powers_k = 1;
    auto powers = app.add_subcommand("powers", "growth of generating sets of powers of an algebra");
    auto alg_opt = powers->add_option("--algebra", powers_algebra, "algebra file");
    powers->add_option("--builtin", powers_builtin, "built-in algebra such as meet:2")->excludes(alg_opt);
    powers->add_option("--max-m", powers_max_m)->capture_default_str()->check(CLI::PositiveNumber);
    powers->add_option("--mode", powers_mode)->capture_default_str()->check(CLI::IsMember({"exact", "collapse", "switch"}));
    powers->add_option("--k", powers_k, "largest collapse / switch parameter")->capture_default_str();
    powers->callback([&] {
        action = [&] {
            if (powers_algebra.empty() == powers_builtin.empty())
                throw UsageError("give exactly one of --algebra and --builtin");
            run.params = {{"builtin", powers_builtin}, {"max_m", powers_max_m}, {"mode", powers_mode}, {"k", powers_k}};
            Algebra alg = powers_builtin.empty() ? Algebra{} : builtin_algebra(powers_builtin);
            if (! powers_algebra.empty()) {
                alg = algebra_from_json(parse_json_text(run.read_input(powers_algebra), "algebra"));
            }
            auto k_max = powers_mode == "exact" ? 0 : powers_k;
            auto profile = growth_profile(alg, powers_max_m, k_max, g.budget());
            auto rows = json::array();
            for (auto & r : profile.rows) {
                json row{{"m", r.m}, {"f", r.f ? json(*r.f) : json(nullptr)}};
                if (r.bounds)
                    row["f_bounds"] = {r.bounds->first, r.bounds->second};
                if (powers_mode == "collapse") {
                    row["collapse"] = json::object();
                    for (auto & [k, v] : r.collapse)
                        row["collapse"][std::to_string(k)] = v;
                }
                if (powers_mode == "switch") {
                    row["switch"] = json::object();
                    for (auto & [k, v] : r.switching)
                        row["switch"][std::to_string(k)] = v;
                }
                rows.push_back(row);
            }
            run.results = {{"algebra", profile.algebra}, {"rows", rows}, {"hint", to_string(profile.hint)}};
        };
    });

    // solve
    std::string solve_structure, solve_instance, solve_mode = "full", solve_universe;
    bool solve_trace = false;
    auto solve = app.add_subcommand("solve", "decide a quantified sentence on a structure (exit 0 true, 1 false)");
    solve->add_option("--structure", solve_structure)->required();
    solve->add_option("--instance", solve_instance)->required();
    solve->add_option("--mode", solve_mode)->capture_default_str()->check(CLI::IsMember({"full", "pi2"}));
    solve->add_option("--universe", solve_universe, "switch:<k>, collapse:<k> or file:<path> (pi2 mode)");
    solve->add_flag("--trace", solve_trace, "include counterexample and strategy");
    solve->callback([&] {
        action = [&] {
            run.params = {{"mode", solve_mode}, {"universe", solve_universe}, {"trace", solve_trace}};
            auto s = run.structure(solve_structure, g.budget());
            auto phi = run.sentence(solve_instance, s.domain);
            auto n = s.domain.size();
            if (solve_mode == "full") {
                if (! solve_universe.empty())
                    throw UsageError("--universe needs --mode pi2");
                auto trace = evaluate_qcsp(phi, s, {g.budget(), solve_trace});
                run.results = {{"verdict", trace.verdict}, {"nodes", trace.nodes}};
                if (solve_trace) {
                    if (! trace.verdict)
                        run.results["counterexample"] = elements_to_json(trace.counterexample, s.domain);
                    auto strategy = json::array();
                    for (auto & [u, e] : trace.strategy)
                        strategy.push_back({{"universal", tuple_to_json(u, s.domain)}, {"existential", tuple_to_json(e, s.domain)}});
                    if (! trace.strategy.empty())
                        run.results["strategy"] = strategy;
                }
                run.exit_code = verdict_code(trace.verdict);
                return;
            }
            if (! phi.is_pi2())
                throw InvalidArgument("pi2 mode needs a sentence of the form forall ... exists ...");
            auto m = phi.leading_universals();
            std::vector<Tuple> universe;
            if (solve_universe.empty())
                universe = all_tuples(n, m);
            else if (solve_universe.rfind("switch:", 0) == 0)
                universe = switch_tuples(n, m, std::stoul(solve_universe.substr(7)));
            else if (solve_universe.rfind("collapse:", 0) == 0)
                universe = collapse_tuples(n, m, std::stoul(solve_universe.substr(9)));
            else if (solve_universe.rfind("file:", 0) == 0) {
                auto path = solve_universe.substr(5);
                universe = universe_from_json(parse_json_text(run.read_input(path), "universe"), s.domain);
            }
            else
                throw UsageError("--universe must be switch:<k>, collapse:<k> or file:<path>");
            auto verdict = evaluate_pi2_restricted(phi, s, universe, g.budget());
            run.results = {{"verdict", verdict}, {"universe_size", universe.size()}};
            run.exit_code = verdict_code(verdict);
        };
    });

    // decide-tau
    std::string dt_alpha, dt_beta, dt_instance;
    std::size_t dt_n = 0;
    auto decide = app.add_subcommand("decide-tau", "decide a sentence over tau_k and constants by preprocessing (exit 0 true, 1 false)");
    decide->add_option("--alpha", dt_alpha, "e.g. 0,1")->required();
    decide->add_option("--beta", dt_beta, "e.g. 1,2")->required();
    decide->add_option("--instance", dt_instance)->required();
    decide->add_option("--domain-size", dt_n, "defaults to the largest cut element plus one");
    decide->callback([&] {
        action = [&] {
            auto cut = cut_from_sides(dt_alpha, dt_beta, dt_n);
            auto d = Domain::of_size(cut.domain_size());
            run.params = {{"cut", to_string(cut, d)}, {"domain_size", d.size()}};
            auto phi = run.sentence(dt_instance, d);
            auto r = decide_tau_qcsp(phi, cut, g.budget());
            run.results = {{"verdict", r.verdict}, {"refuted_by_preprocessing", r.refuted_by_preprocessing}};
            if (r.counterexample)
                run.results["counterexample"] = tuple_to_json(*r.counterexample, d);
            run.exit_code = verdict_code(r.verdict);
        };
    });

    // gadget
    std::string gadget_cut, gadget_kind = "tau", gadget_emit = "dnf";
    std::size_t gadget_k = 1, gadget_n = 0;
    auto gadget = app.add_subcommand("gadget", "build rho, rho_prime, sigma_k or tau_k for a cut");
    gadget->add_option("--cut", gadget_cut, "e.g. 0,1:1,2")->required();
    gadget->add_option("--kind", gadget_kind)->capture_default_str()->check(CLI::IsMember({"rho", "rho_prime", "sigma", "tau"}));
    gadget->add_option("--k", gadget_k)->capture_default_str()->check(CLI::PositiveNumber);
    gadget->add_option("--emit", gadget_emit)->capture_default_str()->check(CLI::IsMember({"dnf", "extension"}));
    gadget->add_option("--domain-size", gadget_n);
    gadget->callback([&] {
        action = [&] {
            auto cut = parse_cut_text(gadget_cut, gadget_n);
            auto d = Domain::of_size(cut.domain_size());
            run.params = {{"cut", to_string(cut, d)}, {"kind", gadget_kind}, {"k", gadget_k}, {"emit", gadget_emit}};
            Relation r = gadget_kind == "rho"   ? build_rho(d, cut)
                : gadget_kind == "rho_prime"    ? build_rho_prime(d, cut)
                : gadget_kind == "sigma"        ? build_sigma(d, cut, gadget_k, g.budget())
                                                : build_tau(d, cut, gadget_k, g.budget());
            if (gadget_emit == "extension" && ! r.extension)
                throw BudgetExceeded("extension of " + r.name, saturating_pow(d.size(), r.arity), g.budget());
            run.results = relation_json(r, d, gadget_emit == "extension");
        };
    });

    // reduce-naesat
    std::string rn_instance, rn_cut, rn_out, rn_structure_out;
    bool rn_evaluate = false;
    auto reduce = app.add_subcommand("reduce-naesat", "reduce monotone NAE-3SAT to a universal sentence over tau_k");
    reduce->add_option("instance", rn_instance, "clause file")->required();
    reduce->add_option("--cut", rn_cut)->required();
    reduce->add_option("--out", rn_out, "write the sentence here");
    reduce->add_option("--structure-out", rn_structure_out, "write the structure holding tau_k here");
    reduce->add_flag("--evaluate", rn_evaluate, "also decide both sides");
    reduce->callback([&] {
        action = [&] {
            auto cut = parse_cut_text(rn_cut, 0);
            auto d = Domain::of_size(cut.domain_size());
            run.params = {{"cut", to_string(cut, d)}, {"evaluate", rn_evaluate}};
            auto inst = parse_naesat(run.read_input(rn_instance));
            auto r = reduce_naesat_to_qcsp(inst, cut, g.budget());
            auto text = to_string(r.sentence, d);
            if (! rn_out.empty())
                write_text_file(rn_out, text + "\n");
            if (! rn_structure_out.empty())
                write_text_file(rn_structure_out, structure_to_json(r.structure).dump(2) + "\n");
            run.results = {{"variables", inst.variables.size()}, {"clauses", inst.clauses.size()}, {"sentence", text},
                {"relation", relation_json(r.structure.relations.front(), d, false)}};
            if (rn_evaluate) {
                auto sat = brute_naesat(inst);
                auto verdict = evaluate_qcsp(r.sentence, r.structure, {g.budget(), false}).verdict;
                run.results["nae_satisfiable"] = sat;
                run.results["qcsp_verdict"] = verdict;
                run.results["equivalence_holds"] = sat == ! verdict;
            }
        };
    });

    // check-tau-def
    std::string ct_cut;
    std::size_t ct_k = 2, ct_n = 0;
    auto check = app.add_subcommand("check-tau-def", "compare tau_k with its definition by sigma_k conjunctions (exit 0 equal, 1 not)");
    check->add_option("--cut", ct_cut)->required();
    check->add_option("--k", ct_k)->capture_default_str()->check(CLI::PositiveNumber);
    check->add_option("--domain-size", ct_n);
    check->callback([&] {
        action = [&] {
            auto cut = parse_cut_text(ct_cut, ct_n);
            auto d = Domain::of_size(cut.domain_size());
            run.params = {{"cut", to_string(cut, d)}, {"k", ct_k}};
            auto tau = build_tau(d, cut, ct_k, g.budget());
            auto conj = tau_via_sigma_conjunction(d, cut, ct_k, g.budget());
            std::uint64_t mismatches = 0;
            auto examples = json::array();
            for (std::uint64_t code = 0; code < tau.extension->capacity(); ++code)
                if (tau.extension->contains_code(code) != conj.extension->contains_code(code)) {
                    if (++mismatches <= 10)
                        examples.push_back(tuple_to_json(decode_tuple(code, d.size(), 3 * ct_k), d));
                }
            run.results = {{"equal", mismatches == 0}, {"tuples_compared", tau.extension->capacity()}, {"tau_size", tau.size()},
                {"conjunction_size", conj.size()}, {"sigma_instances", saturating_pow(3, ct_k)}, {"mismatches", mismatches},
                {"mismatch_examples", examples}};
            run.exit_code = verdict_code(mismatches == 0);
        };
    });

    // canonical
    std::string cn_structure, cn_adversary = "full", cn_out;
    std::size_t cn_m = 1;
    auto canonical = app.add_subcommand("canonical", "canonical sentence of a structure for an adversary");
    canonical->add_option("--structure", cn_structure)->required();
    canonical->add_option("--m", cn_m)->capture_default_str()->check(CLI::PositiveNumber);
    canonical->add_option("--adversary", cn_adversary, "full or switch:<k>")->capture_default_str();
    canonical->add_option("--out", cn_out, "write the sentence here");
    canonical->callback([&] {
        action = [&] {
            run.params = {{"m", cn_m}, {"adversary", cn_adversary}};
            auto s = run.structure(cn_structure, g.budget());
            auto c = build_canonical_sentence(s, parse_adversary(cn_adversary, s.domain.size(), cn_m), g.budget());
            auto text = to_string(c.sentence, s.domain);
            if (! cn_out.empty())
                write_text_file(cn_out, text + "\n");
            run.results = {{"consistent_maps", c.maps.size()}, {"product_size", c.product_size},
                {"universals", c.sentence.count(Quantifier::forall)}, {"existentials", c.sentence.count(Quantifier::exists)},
                {"atoms", c.sentence.body.size()}};
            if (cn_out.empty() && text.size() <= 100000)
                run.results["sentence"] = text;
        };
    });

    // compactness
    std::string cp_structure, cp_family, cp_adversary = "full";
    std::size_t cp_k_max = 2, cp_m = 1, cp_cap = 4096;
    auto compact = app.add_subcommand("compactness", "canonical sentences of the truncations of a family");
    compact->add_option("--structure", cp_structure)->required();
    compact->add_option("--family", cp_family)->required();
    compact->add_option("--k-max", cp_k_max)->capture_default_str()->check(CLI::PositiveNumber);
    compact->add_option("--m", cp_m)->capture_default_str()->check(CLI::PositiveNumber);
    compact->add_option("--adversary", cp_adversary)->capture_default_str();
    compact->add_option("--witness-cap", cp_cap)->capture_default_str()->check(CLI::PositiveNumber);
    compact->callback([&] {
        action = [&] {
            run.params = {{"family", cp_family}, {"k_max", cp_k_max}, {"m", cp_m}, {"adversary", cp_adversary}, {"witness_cap", cp_cap}};
            auto s = run.structure(cp_structure, g.budget());
            auto r = reduct_compactness_probe(s, cp_family, parse_adversary(cp_adversary, s.domain.size(), cp_m), cp_k_max, cp_cap, g.budget());
            auto rows = json::array();
            for (auto & row : r.rows)
                rows.push_back({{"k", row.k}, {"verdict", row.verdict}, {"atoms", row.atoms}});
            auto witnesses = json::array();
            for (auto & w : r.witnesses) {
                json entry{{"universal", tuple_to_json(w.universal, s.domain)}, {"common_witnesses", w.common}};
                entry["example"] = w.example ? tuple_to_json(*w.example, s.domain) : json(nullptr);
                witnesses.push_back(entry);
            }
            run.results = {{"universals", r.universals}, {"existentials", r.existentials}, {"rows", rows}, {"monotone", r.monotone},
                {"witness_sets_capped", r.capped}, {"witnesses", witnesses}};
        };
    });

    // verify and its aliases
    struct SuiteArgs {
        std::vector<std::string> cuts;
        std::vector<std::size_t> sizes;
        std::size_t max_vars = 0, max_clauses = 2, k_max = 2, arity = 0, n_max = 4, m_max = 3, count = 1000, k = 1, max_listed = 50;
        std::vector<std::string> algebras;
    } sa;
    auto add_suite_options = [&](CLI::App * sub) {
        sub->add_option("--cut", sa.cuts, "cut pair, repeatable (theorem3, prop1)");
        sub->add_option("--n", sa.sizes, "domain size, repeatable for theorem3");
        sub->add_option("--max-vars", sa.max_vars, "theorem3 default 3, prop1 default 4");
        sub->add_option("--max-clauses", sa.max_clauses)->capture_default_str();
        sub->add_option("--k-max", sa.k_max)->capture_default_str();
        sub->add_option("--arity", sa.arity, "prop2, default 3*k_max+1");
        sub->add_option("--n-max", sa.n_max)->capture_default_str();
        sub->add_option("--m-max", sa.m_max)->capture_default_str();
        sub->add_option("--count", sa.count, "pi2 random instances")->capture_default_str();
        sub->add_option("--k", sa.k, "pi2 switch parameter")->capture_default_str();
        sub->add_option("--algebra", sa.algebras, "pi2 built-in algebras, repeatable");
        sub->add_option("--max-listed", sa.max_listed, "counterexamples listed verbatim")->capture_default_str();
    };
    auto run_suite = [&](const std::string & name) {
        auto opt = g.suite_options();
        opt.max_listed = sa.max_listed;
        run.command = "verify " + name;
        json report;
        auto cuts_from_args = [&](std::size_t n) {
            std::vector<CutPair> out;
            for (auto & c : sa.cuts)
                out.push_back(parse_cut_text(c, n));
            return out;
        };
        if (name == "theorem3") {
            std::vector<CutPair> cuts = cuts_from_args(0);
            if (cuts.empty()) {
                auto sizes = sa.sizes.empty() ? std::vector<std::size_t>{3, 4} : sa.sizes;
                for (auto n : sizes)
                    for (auto & c : separating_cuts(n))
                        cuts.push_back(c);
            }
            auto v = sa.max_vars ? sa.max_vars : 3;
            report = verify_theorem3(cuts, v, sa.max_clauses, opt);
        }
        else if (name == "prop1") {
            auto n = sa.sizes.empty() ? std::size_t{3} : sa.sizes.front();
            auto cuts = cuts_from_args(n);
            if (cuts.empty())
                cuts = intersecting_cuts(n);
            report = verify_prop1(n, sa.max_vars ? sa.max_vars : 4, cuts, opt);
        }
        else if (name == "prop2") {
            auto n = sa.sizes.empty() ? std::size_t{3} : sa.sizes.front();
            report = verify_prop2(n, sa.k_max, sa.arity ? sa.arity : 3 * sa.k_max + 1, opt);
        }
        else if (name == "taudef")
            report = verify_taudef(sa.n_max, sa.k_max, opt);
        else if (name == "powers-sanity") {
            auto n = sa.sizes.empty() ? std::size_t{2} : sa.sizes.front();
            report = verify_powers_sanity(n, sa.m_max, opt);
        }
        else if (name == "pi2") {
            auto algebras = sa.algebras.empty() ? std::vector<std::string>{"majority:2", "affine:2", "meet:2", "join:2"} : sa.algebras;
            report = verify_pi2(g.seed, sa.count, algebras, sa.k, opt);
        }
        else
            throw UsageError("unknown suite '" + name + "' (theorem3, prop1, prop2, taudef, powers-sanity, pi2)");
        run.params = report["params"];
        run.params["seed"] = g.seed;
        run.results = report;
        run.exit_code = suite_exit(report);
    };
    std::string suite_name;
    auto verify = app.add_subcommand("verify", "run an exhaustive property suite (exit 0 when no counterexamples)");
    verify->add_option("suite", suite_name, "theorem3, prop1, prop2, taudef, powers-sanity or pi2")->required();
    add_suite_options(verify);
    verify->callback([&] { action = [&] { run_suite(suite_name); }; });
    for (std::string alias : {"theorem3", "prop1", "prop2", "taudef", "powers-sanity", "pi2"}) {
        auto sub = app.add_subcommand("verify-" + alias, "same as: verify " + alias);
        add_suite_options(sub);
        sub->callback([&, alias] { action = [&, alias] { run_suite(alias); }; });
    }

    std::string command = argc > 1 ? argv[1] : "";
    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp & e) {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp & e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError & e) {
        UsageError err(e.what());
        write_output(Globals{}, error_object(command, err));
        return exit_error;
    }

    for (auto sub : app.get_subcommands())
        run.command = sub->get_name();
    auto start = std::chrono::steady_clock::now();
    try {
        action();
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json report{{"schema_version", schema_version}, {"command", run.command}, {"inputs_digest", run.digest()}, {"inputs", run.input_list()},
            {"params", run.params}, {"results", run.results}, {"exit_code", run.exit_code}, {"timings", {{"elapsed_seconds", elapsed}}}};
        write_output(g, report);
        return run.exit_code;
    }
    catch (const std::exception & e) {
        auto err = error_object(run.command, e);
        try {
            write_output(g, err);
        }
        catch (const std::exception &) {
            std::cout << err.dump(2) << "\n";
        }
        return exit_error;
    }
}
