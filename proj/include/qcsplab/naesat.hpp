#pragma once

#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/gadgets.hpp"
#include "qcsplab/model.hpp"
#include "qcsplab/sentence.hpp"

#include <array>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qcsplab {

// Monotone not-all-equal 3-SAT: every clause is an ordered triple of variables.
struct NAEInstance {
    std::vector<std::string> variables;
    std::vector<std::array<std::size_t, 3>> clauses;

    friend auto operator==(const NAEInstance &, const NAEInstance &) -> bool = default;
};

// One clause per line as three whitespace-separated variable names; '#' starts
// a comment. An optional first line `vars a b c ...` fixes the variable set
// and order, otherwise variables are numbered by first occurrence.
inline auto parse_naesat(std::string_view text) -> NAEInstance
{
    NAEInstance inst;
    bool declared = false;
    std::size_t line_no = 0, offset = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    auto lookup = [&](const std::string & name, std::size_t line_start) -> std::size_t {
        for (std::size_t i = 0; i < inst.variables.size(); ++i)
            if (inst.variables[i] == name)
                return i;
        if (declared)
            throw ParseError("unknown variable '" + name + "'", line_start, line_no);
        inst.variables.push_back(name);
        return inst.variables.size() - 1;
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto line_start = offset;
        offset += line.size() + 1;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream words(line);
        std::vector<std::string> tokens;
        for (std::string w; words >> w;)
            tokens.push_back(w);
        if (tokens.empty())
            continue;
        if (tokens.front() == "vars") {
            if (declared || ! inst.clauses.empty())
                throw ParseError("'vars' must come before all clauses and appear once", line_start, line_no);
            declared = true;
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                for (auto & v : inst.variables)
                    if (v == tokens[i])
                        throw ParseError("variable '" + v + "' declared twice", line_start, line_no);
                inst.variables.push_back(tokens[i]);
            }
            continue;
        }
        if (tokens.size() != 3)
            throw ParseError("a clause needs exactly three variables, got " + std::to_string(tokens.size()), line_start, line_no);
        inst.clauses.push_back({lookup(tokens[0], line_start), lookup(tokens[1], line_start), lookup(tokens[2], line_start)});
    }
    return inst;
}

inline auto to_string(const NAEInstance & inst) -> std::string
{
    std::string out = "vars";
    for (auto & v : inst.variables)
        out += " " + v;
    out += "\n";
    for (auto & c : inst.clauses)
        out += inst.variables[c[0]] + " " + inst.variables[c[1]] + " " + inst.variables[c[2]] + "\n";
    return out;
}

// Exists a 0/1 assignment under which no clause is constant.
inline auto brute_naesat(const NAEInstance & inst) -> bool
{
    auto v = inst.variables.size();
    if (v >= 63)
        throw BudgetExceeded("NAE brute force", saturating_pow(2, v), default_budget);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << v); ++mask) {
        bool ok = true;
        for (auto & c : inst.clauses) {
            auto a = (mask >> c[0]) & 1, b = (mask >> c[1]) & 1, d = (mask >> c[2]) & 1;
            if (a == b && b == d) {
                ok = false;
                break;
            }
        }
        if (ok)
            return true;
    }
    return false;
}

struct NaeReduction {
    PHSentence sentence;
    Structure structure;
};

// Universally quantifies the instance's variables over one tau_k atom whose
// i-th triple is the i-th clause.
inline auto naesat_sentence(const NAEInstance & inst, const Domain & d) -> PHSentence
{
    if (inst.clauses.empty())
        throw InvalidArgument("the instance has no clauses");
    PHSentence out;
    for (auto & v : inst.variables) {
        if (d.find(v))
            throw InvalidArgument("variable '" + v + "' clashes with a domain element name");
        out.prefix.push_back({Quantifier::forall, v});
    }
    Atom atom{"tau_" + std::to_string(inst.clauses.size()), {}};
    for (auto & c : inst.clauses)
        for (auto x : c)
            atom.args.push_back(Term::var(x));
    out.body.push_back(std::move(atom));
    return out;
}

// The sentence above together with a structure holding tau_k. The instance is
// satisfiable exactly when the sentence is false.
inline auto reduce_naesat_to_qcsp(const NAEInstance & inst, const CutPair & cut, std::uint64_t budget = default_budget) -> NaeReduction
{
    if (cut.alpha_only().empty() || cut.beta_only().empty())
        throw InvalidArgument("the reduction needs both alpha \\ beta and beta \\ alpha nonempty");
    auto d = Domain::of_size(cut.domain_size());
    NaeReduction out{naesat_sentence(inst, d), {d, {}, {}, false}};
    out.structure.relations.push_back(build_tau(d, cut, inst.clauses.size(), budget));
    return out;
}

} // namespace qcsplab
