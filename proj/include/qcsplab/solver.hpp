#pragma once

#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/gadgets.hpp"
#include "qcsplab/model.hpp"
#include "qcsplab/sentence.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace qcsplab {

// Resolves atom relation names against a structure: declared relations, the
// built-in equality, and family instances <family>_<k> built on first use.
class RelationResolver {
public:
    explicit RelationResolver(const Structure & s, std::uint64_t budget = default_budget) :
        s_(&s),
        budget_(budget)
    {
    }

    // nullptr denotes the built-in equality.
    auto resolve(const std::string & name) -> const Relation *
    {
        if (name == equality_relation_name)
            return nullptr;
        if (auto r = s_->find(name))
            return r;
        auto it = cache_.find(name);
        if (it != cache_.end())
            return it->second;
        auto underscore = name.rfind('_');
        if (underscore != std::string::npos && underscore + 1 < name.size()) {
            auto suffix = name.substr(underscore + 1);
            if (std::all_of(suffix.begin(), suffix.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) && suffix.size() < 9) {
                if (auto fam = s_->find_family(name.substr(0, underscore))) {
                    auto k = std::stoul(suffix);
                    if (k >= 1) {
                        built_.push_back(instantiate_family(s_->domain, *fam, k, budget_));
                        return cache_[name] = &built_.back();
                    }
                }
            }
        }
        throw InvalidArgument("unknown relation '" + name + "'");
    }

private:
    const Structure * s_;
    std::uint64_t budget_;
    std::deque<Relation> built_;
    std::unordered_map<std::string, const Relation *> cache_;
};

namespace detail {

    struct BoundAtom {
        const Relation * relation = nullptr; // nullptr: equality
        std::vector<Term> args;
    };

    inline auto bind_atoms(const PHSentence & phi, const Structure & s, RelationResolver & resolver) -> std::vector<BoundAtom>
    {
        check_sentence(phi, s.domain.size());
        std::vector<BoundAtom> out;
        for (auto & a : phi.body) {
            auto r = resolver.resolve(a.relation);
            auto arity = r ? r->arity : 2;
            if (a.args.size() != arity)
                throw InvalidArgument("atom '" + a.relation + "' has " + std::to_string(a.args.size()) + " arguments, relation arity is " + std::to_string(arity));
            out.push_back({r, a.args});
        }
        return out;
    }

    inline auto atom_holds(const BoundAtom & a, std::span<const Element> vals, Tuple & scratch) -> bool
    {
        scratch.resize(a.args.size());
        for (std::size_t i = 0; i < a.args.size(); ++i)
            scratch[i] = a.args[i].is_var() ? vals[a.args[i].index] : static_cast<Element>(a.args[i].index);
        if (! a.relation)
            return scratch[0] == scratch[1];
        return a.relation->contains(scratch);
    }

} // namespace detail

struct EvalOptions {
    std::uint64_t budget = default_budget;
    // for true Pi_2 inputs, record an existential response per universal tuple
    bool want_strategy = false;
};

struct EvalTrace {
    bool verdict = false;
    // on rejection: values of the leading universal block for which the rest
    // of the sentence is false
    std::vector<Element> counterexample;
    // on acceptance of a Pi_2 sentence, when requested
    std::vector<std::pair<Tuple, Tuple>> strategy;
    std::uint64_t nodes = 0;
};

// Game-semantics evaluator: forall is a conjunction over A, exists a
// disjunction. Atoms are checked as soon as their last variable is bound, and
// subgames are memoized on the values of the bound variables that still occur
// in unchecked atoms.
class QcspEvaluator {
public:
    QcspEvaluator(const PHSentence & phi, const Structure & s, std::uint64_t budget = default_budget) :
        phi_(phi),
        resolver_(s, budget),
        n_(s.domain.size()),
        budget_(budget)
    {
        atoms_ = detail::bind_atoms(phi, s, resolver_);
        auto v = phi.prefix.size();
        check_at_.resize(v + 1);
        std::vector<std::size_t> last_use(v, 0); // depth after which a variable is dead
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            std::size_t depth = 0;
            for (auto & t : atoms_[i].args)
                if (t.is_var())
                    depth = std::max(depth, t.index + 1);
            check_at_[depth].push_back(i);
            for (auto & t : atoms_[i].args)
                if (t.is_var())
                    last_use[t.index] = std::max(last_use[t.index], depth);
        }
        live_.resize(v + 1);
        for (std::size_t d = 0; d <= v; ++d)
            for (std::size_t j = 0; j < d; ++j)
                if (last_use[j] > d)
                    live_[d].push_back(j);
        memo_.resize(v + 1);
        vals_.assign(v, 0);
    }

    auto run(const EvalOptions & opts = {}) -> EvalTrace
    {
        EvalTrace trace;
        trace.verdict = evaluate(0);
        auto lead = phi_.leading_universals();
        if (! trace.verdict) {
            for (std::size_t d = 0; d < lead; ++d)
                for (Element a = 0; a < n_; ++a) {
                    vals_[d] = a;
                    if (! evaluate(d + 1))
                        break;
                }
            trace.counterexample.assign(vals_.begin(), vals_.begin() + static_cast<std::ptrdiff_t>(lead));
        }
        else if (opts.want_strategy && phi_.is_pi2()) {
            Tuple u(lead, 0);
            do {
                std::copy(u.begin(), u.end(), vals_.begin());
                for (auto d = lead; d < vals_.size(); ++d)
                    for (Element a = 0; a < n_; ++a) {
                        vals_[d] = a;
                        if (evaluate(d + 1))
                            break;
                    }
                trace.strategy.emplace_back(u, Tuple(vals_.begin() + static_cast<std::ptrdiff_t>(lead), vals_.end()));
            } while (lead > 0 && next_tuple(u, n_));
        }
        trace.nodes = nodes_;
        return trace;
    }

private:
    // Value of the subgame after variables [0, depth) have been bound in vals_.
    auto evaluate(std::size_t depth) -> bool
    {
        if (++nodes_ > budget_)
            throw BudgetExceeded("qcsp evaluation", nodes_, budget_);
        for (auto i : check_at_[depth])
            if (! detail::atom_holds(atoms_[i], vals_, scratch_))
                return false;
        if (depth == vals_.size())
            return true;

        std::u32string key;
        for (auto j : live_[depth])
            key.push_back(static_cast<char32_t>(vals_[j]));
        auto & memo = memo_[depth];
        if (auto it = memo.find(key); it != memo.end())
            return it->second;

        bool forall = phi_.prefix[depth].quantifier == Quantifier::forall;
        bool result = forall;
        for (Element a = 0; a < n_; ++a) {
            vals_[depth] = a;
            bool sub = evaluate(depth + 1);
            if (forall && ! sub) {
                result = false;
                break;
            }
            if (! forall && sub) {
                result = true;
                break;
            }
        }
        memo.emplace(std::move(key), result);
        return result;
    }

    const PHSentence & phi_;
    RelationResolver resolver_;
    std::size_t n_;
    std::uint64_t budget_;
    std::vector<detail::BoundAtom> atoms_;
    std::vector<std::vector<std::size_t>> check_at_;
    std::vector<std::vector<std::size_t>> live_;
    std::vector<std::unordered_map<std::u32string, bool>> memo_;
    std::vector<Element> vals_;
    Tuple scratch_;
    std::uint64_t nodes_ = 0;
};

inline auto evaluate_qcsp(const PHSentence & phi, const Structure & s, const EvalOptions & opts = {}) -> EvalTrace
{
    QcspEvaluator ev(phi, s, opts.budget);
    return ev.run(opts);
}

// Backtracking search with forward checking for purely existential sentences.
class CspSearch {
public:
    CspSearch(const PHSentence & phi, const Structure & s, std::uint64_t budget = default_budget) :
        resolver_(s, budget),
        n_(s.domain.size()),
        budget_(budget)
    {
        if (! phi.is_existential_only())
            throw InvalidArgument("CSP solving needs a purely existential sentence");
        atoms_ = detail::bind_atoms(phi, s, resolver_);
        auto v = phi.prefix.size();
        occurs_.resize(v);
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            std::set<std::size_t> vars;
            for (auto & t : atoms_[i].args)
                if (t.is_var())
                    vars.insert(t.index);
            for (auto x : vars)
                occurs_[x].push_back(i);
            if (vars.empty())
                ground_.push_back(i);
        }
        vals_.assign(v, 0);
        assigned_.assign(v, false);
    }

    // Calls visit on each satisfying assignment (prefix order) until it
    // returns false. Returns the number of solutions visited.
    auto enumerate(const std::function<bool(const std::vector<Element> &)> & visit) -> std::uint64_t
    {
        std::uint64_t found = 0;
        for (auto i : ground_)
            if (! detail::atom_holds(atoms_[i], vals_, scratch_))
                return 0;
        std::vector<std::vector<char>> domains(vals_.size(), std::vector<char>(n_, 1));
        search(domains, 0, found, visit);
        return found;
    }

    auto first() -> std::optional<std::vector<Element>>
    {
        std::optional<std::vector<Element>> out;
        enumerate([&](const std::vector<Element> & a) {
            out = a;
            return false;
        });
        return out;
    }

    auto nodes() const noexcept -> std::uint64_t { return nodes_; }

private:
    // Returns false when the visitor asked to stop.
    auto search(std::vector<std::vector<char>> & domains, std::size_t assigned_count, std::uint64_t & found,
        const std::function<bool(const std::vector<Element> &)> & visit) -> bool
    {
        if (++nodes_ > budget_)
            throw BudgetExceeded("csp search", nodes_, budget_);
        if (assigned_count == vals_.size()) {
            ++found;
            return visit(vals_);
        }
        // smallest remaining domain first, ties by prefix order
        std::size_t var = vals_.size(), best = n_ + 1;
        for (std::size_t x = 0; x < vals_.size(); ++x)
            if (! assigned_[x]) {
                auto size = static_cast<std::size_t>(std::count(domains[x].begin(), domains[x].end(), 1));
                if (size < best) {
                    best = size;
                    var = x;
                }
            }
        for (Element a = 0; a < n_; ++a) {
            if (! domains[var][a])
                continue;
            vals_[var] = a;
            assigned_[var] = true;
            auto saved = domains;
            if (propagate(var, domains)) {
                if (! search(domains, assigned_count + 1, found, visit)) {
                    assigned_[var] = false;
                    return false;
                }
            }
            domains = std::move(saved);
            assigned_[var] = false;
        }
        return true;
    }

    // Checks atoms that became ground and prunes variables left alone in an atom.
    auto propagate(std::size_t var, std::vector<std::vector<char>> & domains) -> bool
    {
        std::fill(domains[var].begin(), domains[var].end(), 0);
        domains[var][vals_[var]] = 1;
        for (auto i : occurs_[var]) {
            auto & atom = atoms_[i];
            std::optional<std::size_t> open;
            bool several = false;
            for (auto & t : atom.args)
                if (t.is_var() && ! assigned_[t.index]) {
                    if (open && *open != t.index)
                        several = true;
                    open = t.index;
                }
            if (several)
                continue;
            if (! open) {
                if (! detail::atom_holds(atom, vals_, scratch_))
                    return false;
                continue;
            }
            auto & dom = domains[*open];
            bool any = false;
            for (Element b = 0; b < n_; ++b) {
                if (! dom[b])
                    continue;
                vals_[*open] = b;
                if (detail::atom_holds(atom, vals_, scratch_))
                    any = true;
                else
                    dom[b] = 0;
            }
            if (! any)
                return false;
        }
        return true;
    }

    RelationResolver resolver_;
    std::size_t n_;
    std::uint64_t budget_;
    std::vector<detail::BoundAtom> atoms_;
    std::vector<std::vector<std::size_t>> occurs_;
    std::vector<std::size_t> ground_;
    std::vector<Element> vals_;
    std::vector<bool> assigned_;
    Tuple scratch_;
    std::uint64_t nodes_ = 0;
};

// A satisfying assignment (in prefix order) or nullopt when unsatisfiable.
inline auto solve_csp(const PHSentence & phi, const Structure & s, std::uint64_t budget = default_budget) -> std::optional<std::vector<Element>>
{
    CspSearch search(phi, s, budget);
    return search.first();
}

// Replaces variable v by the constant a and drops it from the prefix.
inline auto substitute_variable(const PHSentence & phi, std::size_t v, Element a) -> PHSentence
{
    PHSentence out;
    for (std::size_t i = 0; i < phi.prefix.size(); ++i)
        if (i != v)
            out.prefix.push_back(phi.prefix[i]);
    for (auto & atom : phi.body) {
        Atom b{atom.relation, {}};
        for (auto & t : atom.args) {
            if (! t.is_var())
                b.args.push_back(t);
            else if (t.index == v)
                b.args.push_back(Term::constant(a));
            else
                b.args.push_back(Term::var(t.index > v ? t.index - 1 : t.index));
        }
        out.body.push_back(std::move(b));
    }
    return out;
}

// Binds the first values.size() prefix variables to the given constants.
inline auto instantiate_prefix(const PHSentence & phi, std::span<const Element> values) -> PHSentence
{
    if (values.size() > phi.prefix.size())
        throw InvalidArgument("more values than prefix variables");
    auto out = phi;
    for (std::size_t i = values.size(); i-- > 0;)
        out = substitute_variable(out, i, values[i]);
    return out;
}

// Conjunction, over u in `universe` only, of the existential remainder with
// the universal block bound to u.
inline auto evaluate_pi2_restricted(const PHSentence & phi, const Structure & s, const std::vector<Tuple> & universe,
    std::uint64_t budget = default_budget) -> bool
{
    if (! phi.is_pi2())
        throw InvalidArgument("sentence is not of the form forall-block exists-block");
    auto m = phi.leading_universals();
    check_sentence(phi, s.domain.size());
    for (auto & u : universe) {
        if (u.size() != m)
            throw InvalidArgument("universe tuple of length " + std::to_string(u.size()) + ", universal block has " + std::to_string(m) + " variables");
        for (auto e : u)
            if (e >= s.domain.size())
                throw InvalidArgument("universe tuple entry outside the domain");
    }
    for (auto & u : universe)
        if (! solve_csp(instantiate_prefix(phi, u), s, budget))
            return false;
    return true;
}

enum class PreprocessRule {
    trivial_equality, // eq(a,a), eq(v,v) dropped; eq(a,b) with a != b is false
    universal_constant, // v = a with v universal: false
    clashing_constants, // v = a and v = a' with a != a': false
    drop_isolated, // v occurs only in v = a atoms: delete v and them
    substitute, // replace v by a everywhere, drop v = a
};

inline auto to_string(PreprocessRule r) -> std::string
{
    switch (r) {
    case PreprocessRule::trivial_equality:
        return "trivial-equality";
    case PreprocessRule::universal_constant:
        return "universal-constant";
    case PreprocessRule::clashing_constants:
        return "clashing-constants";
    case PreprocessRule::drop_isolated:
        return "drop-isolated";
    default:
        return "substitute";
    }
}

struct PreprocessStep {
    PreprocessRule rule;
    // nullopt: the sentence is false
    std::optional<PHSentence> result;
};

namespace detail {

    // (variable, constant) of an equality atom between a variable and a constant.
    inline auto var_const_equality(const Atom & a) -> std::optional<std::pair<std::size_t, Element>>
    {
        if (! a.is_equality() || a.args.size() != 2)
            return std::nullopt;
        auto & l = a.args[0];
        auto & r = a.args[1];
        if (l.is_var() && ! r.is_var())
            return std::pair{l.index, static_cast<Element>(r.index)};
        if (! l.is_var() && r.is_var())
            return std::pair{r.index, static_cast<Element>(l.index)};
        return std::nullopt;
    }

} // namespace detail

// One application of the highest-priority applicable constant-elimination
// rule, or nullopt when none applies. Assumes |A| >= 2.
inline auto preprocess_step(const PHSentence & phi) -> std::optional<PreprocessStep>
{
    for (std::size_t i = 0; i < phi.body.size(); ++i) {
        auto & a = phi.body[i];
        if (! a.is_equality() || a.args.size() != 2)
            continue;
        auto & l = a.args[0];
        auto & r = a.args[1];
        if (l.is_var() != r.is_var())
            continue;
        if (! l.is_var() && l.index != r.index)
            return PreprocessStep{PreprocessRule::trivial_equality, std::nullopt};
        if (l.index == r.index) {
            auto out = phi;
            out.body.erase(out.body.begin() + static_cast<std::ptrdiff_t>(i));
            return PreprocessStep{PreprocessRule::trivial_equality, std::move(out)};
        }
    }

    std::map<std::size_t, std::set<Element>> constants_of;
    for (auto & a : phi.body)
        if (auto eq = detail::var_const_equality(a))
            constants_of[eq->first].insert(eq->second);

    for (auto & [v, cs] : constants_of)
        if (phi.is_universal(v))
            return PreprocessStep{PreprocessRule::universal_constant, std::nullopt};
    for (auto & [v, cs] : constants_of)
        if (cs.size() > 1)
            return PreprocessStep{PreprocessRule::clashing_constants, std::nullopt};
    for (auto & [v, cs] : constants_of) {
        bool only_constant_equalities = true;
        for (auto & a : phi.body) {
            auto eq = detail::var_const_equality(a);
            if (eq && eq->first == v)
                continue;
            for (auto & t : a.args)
                if (t.is_var() && t.index == v)
                    only_constant_equalities = false;
        }
        if (only_constant_equalities) {
            PHSentence out;
            out.prefix = phi.prefix;
            for (auto & a : phi.body) {
                auto eq = detail::var_const_equality(a);
                if (! (eq && eq->first == v))
                    out.body.push_back(a);
            }
            // v no longer occurs; substituting just reindexes the rest
            return PreprocessStep{PreprocessRule::drop_isolated, substitute_variable(out, v, 0)};
        }
    }
    for (auto & [v, cs] : constants_of) {
        PHSentence out;
        out.prefix = phi.prefix;
        for (auto & a : phi.body) {
            auto eq = detail::var_const_equality(a);
            if (! (eq && eq->first == v))
                out.body.push_back(a);
        }
        return PreprocessStep{PreprocessRule::substitute, substitute_variable(out, v, *cs.begin())};
    }
    return std::nullopt;
}

// Exhaustive constant elimination. nullopt means the sentence is false;
// otherwise the result has no variable-constant equality atoms.
inline auto preprocess_constants(const PHSentence & phi) -> std::optional<PHSentence>
{
    auto current = phi;
    while (auto step = preprocess_step(current)) {
        if (! step->result)
            return std::nullopt;
        current = std::move(*step->result);
    }
    return current;
}

struct TauDecision {
    bool verdict = false;
    // preprocessing alone refuted the sentence
    bool refuted_by_preprocessing = false;
    // on rejection after instantiation: values of the remaining universals
    std::optional<std::vector<Element>> counterexample;
};

// Decides sentences over {tau_k : k >= 1} ∪ constants for a cut with
// alpha ∩ beta nonempty: eliminate constants, bind every existential variable
// to the least element of alpha ∩ beta, then check the remaining universal
// sentence over all assignments.
inline auto decide_tau_qcsp(const PHSentence & phi, const CutPair & cut, std::uint64_t budget = default_budget) -> TauDecision
{
    auto common = cut.least_common();
    if (! common)
        throw InvalidArgument("alpha and beta do not intersect");
    auto n = cut.domain_size();
    check_sentence(phi, n);
    for (auto & a : phi.body) {
        if (a.is_equality()) {
            if (! detail::var_const_equality(a) && ! (a.args.size() == 2 && ! a.args[0].is_var() && ! a.args[1].is_var()))
                throw InvalidArgument("only variable-constant equalities are allowed, got a variable-variable equality");
            continue;
        }
        auto underscore = a.relation.rfind('_');
        bool tau = a.relation.rfind("tau_", 0) == 0 && underscore == 3 && a.relation.size() > 4
            && std::all_of(a.relation.begin() + 4, a.relation.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
        if (! tau)
            throw InvalidArgument("non-tau atom '" + a.relation + "'");
        auto k = std::stoul(a.relation.substr(4));
        if (k == 0 || a.args.size() != 3 * k)
            throw InvalidArgument("atom '" + a.relation + "' has " + std::to_string(a.args.size()) + " arguments");
    }

    TauDecision out;
    auto pre = preprocess_constants(phi);
    if (! pre) {
        out.refuted_by_preprocessing = true;
        return out;
    }
    auto universal = *pre;
    for (std::size_t v = universal.prefix.size(); v-- > 0;)
        if (! universal.is_universal(v))
            universal = substitute_variable(universal, v, *common);

    auto vars = universal.prefix.size();
    if (saturating_pow(n, vars) > budget)
        throw BudgetExceeded("universal check", saturating_pow(n, vars), budget);
    Tuple assignment(vars, 0), args;
    do {
        for (auto & a : universal.body) {
            args.clear();
            for (auto & t : a.args)
                args.push_back(t.is_var() ? assignment[t.index] : static_cast<Element>(t.index));
            bool holds = a.is_equality() ? args[0] == args[1] : in_tau(cut, args);
            if (! holds) {
                out.counterexample = assignment;
                return out;
            }
        }
    } while (vars > 0 && next_tuple(assignment, n));
    out.verdict = true;
    return out;
}

} // namespace qcsplab
