#pragma once

#include "qcsplab/dnf.hpp"
#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/model.hpp"
#include "qcsplab/sentence.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qcsplab {

using json = nlohmann::json;

class FileError : public Error {
public:
    FileError(const std::string & what, std::string path) :
        Error(what + ": " + path),
        path_(std::move(path))
    {
    }

    auto path() const -> const std::string & { return path_; }

private:
    std::string path_;
};

inline auto read_text_file(const std::string & path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (! in)
        throw FileError("cannot open file", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline auto write_text_file(const std::string & path, const std::string & text) -> void
{
    std::ofstream out(path, std::ios::binary);
    if (! out)
        throw FileError("cannot write file", path);
    out << text;
}

inline auto parse_json_text(const std::string & text, const std::string & what) -> json
{
    try {
        return json::parse(text);
    }
    catch (const json::parse_error & e) {
        throw ParseError(what + ": " + e.what(), e.byte);
    }
}

namespace detail {

    template <typename T>
    auto field(const json & j, const char * key, const std::string & where) -> T
    {
        if (! j.is_object() || ! j.contains(key))
            throw InvalidArgument(where + ": missing key '" + key + "'");
        try {
            return j.at(key).get<T>();
        }
        catch (const json::exception &) {
            throw InvalidArgument(where + ": key '" + key + "' has the wrong type");
        }
    }

    inline auto element_from_json(const json & j, const Domain & d, const std::string & where) -> Element
    {
        if (j.is_string())
            return d.index(j.get<std::string>());
        if (j.is_number_unsigned() && j.get<std::uint64_t>() < d.size())
            return static_cast<Element>(j.get<std::uint64_t>());
        throw InvalidArgument(where + ": expected a domain element, got " + j.dump());
    }

    inline auto dnf_atom_from_json(const json & j, std::size_t arity, const Domain & d, const std::string & where) -> DnfAtom
    {
        auto v = field<std::size_t>(j, "v", where);
        if (v >= arity)
            throw InvalidArgument(where + ": index " + std::to_string(v) + " out of range for arity " + std::to_string(arity));
        if (j.contains("eq_v") == j.contains("eq_c"))
            throw InvalidArgument(where + ": an atom needs exactly one of 'eq_v' and 'eq_c'");
        if (j.contains("eq_v")) {
            auto w = field<std::size_t>(j, "eq_v", where);
            if (w >= arity)
                throw InvalidArgument(where + ": index " + std::to_string(w) + " out of range for arity " + std::to_string(arity));
            return DnfAtom::eq_var(v, w);
        }
        return DnfAtom::eq_const(v, element_from_json(j.at("eq_c"), d, where));
    }

} // namespace detail

// dnf: array of disjuncts; each disjunct is an array of atoms
// {"v": i, "eq_v": j} / {"v": i, "eq_c": name} or a textual conjunct.
inline auto dnf_from_json(const json & j, std::size_t arity, const Domain & d, const std::string & where) -> DnfFormula
{
    if (! j.is_array() || j.empty())
        throw InvalidArgument(where + ": dnf must be a nonempty array of disjuncts");
    DnfFormula f{arity, {}};
    for (auto & disjunct : j) {
        if (disjunct.is_string())
            f.disjuncts.push_back(parse_dnf_disjunct(disjunct.get<std::string>(), arity, d));
        else if (disjunct.is_array()) {
            DnfConjunct conj;
            for (auto & atom : disjunct)
                conj.push_back(detail::dnf_atom_from_json(atom, arity, d, where));
            f.disjuncts.push_back(std::move(conj));
        }
        else
            throw InvalidArgument(where + ": a disjunct must be an array of atoms or a string");
    }
    return f;
}

inline auto dnf_to_json(const DnfFormula & f, const Domain & d) -> json
{
    auto out = json::array();
    for (auto & conj : f.disjuncts) {
        auto atoms = json::array();
        for (auto & a : conj) {
            if (a.kind == DnfAtom::Kind::var_eq_var)
                atoms.push_back({{"v", a.var}, {"eq_v", a.rhs}});
            else
                atoms.push_back({{"v", a.var}, {"eq_c", d.name(static_cast<Element>(a.rhs))}});
        }
        out.push_back(std::move(atoms));
    }
    return out;
}

inline auto elements_to_json(const std::vector<Element> & es, const Domain & d) -> json
{
    auto out = json::array();
    for (auto e : es)
        out.push_back(d.name(e));
    return out;
}

inline auto tuple_to_json(const Tuple & t, const Domain & d) -> json { return elements_to_json(t, d); }

inline auto structure_from_json(const json & j, std::uint64_t budget = default_budget) -> Structure
{
    if (! j.is_object())
        throw InvalidArgument("structure: expected an object");
    auto names = detail::field<std::vector<std::string>>(j, "domain", "structure");
    Structure s{Domain(names), {}, {}, false};
    if (j.contains("constants"))
        s.constants = detail::field<bool>(j, "constants", "structure");
    if (j.contains("relations")) {
        if (! j.at("relations").is_array())
            throw InvalidArgument("structure: 'relations' must be an array");
        for (auto & r : j.at("relations")) {
            auto name = detail::field<std::string>(r, "name", "relation");
            auto where = "relation '" + name + "'";
            auto arity = detail::field<std::size_t>(r, "arity", where);
            if (! r.contains("dnf"))
                throw InvalidArgument(where + ": missing key 'dnf'");
            s.relations.push_back(Relation::from_dnf(name, s.domain.size(), dnf_from_json(r.at("dnf"), arity, s.domain, where), budget));
        }
    }
    if (j.contains("families")) {
        if (! j.at("families").is_array())
            throw InvalidArgument("structure: 'families' must be an array");
        for (auto & f : j.at("families")) {
            auto name = detail::field<std::string>(f, "name", "family");
            auto where = "family '" + name + "'";
            auto kind = parse_family_kind(detail::field<std::string>(f, "kind", where));
            auto side = [&](const char * key) {
                if (! f.contains(key) || ! f.at(key).is_array())
                    throw InvalidArgument(where + ": '" + key + "' must be an array of elements");
                std::vector<Element> out;
                for (auto & e : f.at(key))
                    out.push_back(detail::element_from_json(e, s.domain, where));
                return out;
            };
            s.families.push_back({name, kind, CutPair::make(s.domain.size(), side("alpha"), side("beta"))});
        }
    }
    auto problems = validate_structure(s);
    if (! problems.empty())
        throw InvalidArgument("invalid structure: " + problems.front());
    return s;
}

// Relations without a DNF are written with the DNF of their extension.
inline auto structure_to_json(const Structure & s) -> json
{
    json j;
    j["domain"] = s.domain.names();
    j["relations"] = json::array();
    for (auto & r : s.relations) {
        DnfFormula f;
        if (r.dnf)
            f = *r.dnf;
        else if (r.extension && ! r.extension->empty())
            f = extension_to_dnf(*r.extension);
        else
            throw InvalidArgument("relation '" + r.name + "' is empty and has no DNF to serialize");
        j["relations"].push_back({{"name", r.name}, {"arity", r.arity}, {"dnf", dnf_to_json(f, s.domain)}});
    }
    if (! s.families.empty()) {
        j["families"] = json::array();
        for (auto & f : s.families)
            j["families"].push_back({{"name", f.name}, {"kind", to_string(f.kind)}, {"alpha", elements_to_json(f.cut.alpha(), s.domain)},
                {"beta", elements_to_json(f.cut.beta(), s.domain)}});
    }
    if (s.constants)
        j["constants"] = true;
    return j;
}

inline auto load_structure(const std::string & path, std::uint64_t budget = default_budget) -> Structure
{
    auto text = read_text_file(path);
    try {
        return structure_from_json(parse_json_text(text, "structure"), budget);
    }
    catch (const FileError &) {
        throw;
    }
    catch (const Error & e) {
        throw FileError(e.what(), path);
    }
}

// {name, arity, table}: table lists n^arity output names in lexicographic input order.
inline auto operation_from_json(const json & j, const Domain & d) -> Operation
{
    auto name = detail::field<std::string>(j, "name", "operation");
    auto where = "operation '" + name + "'";
    auto arity = detail::field<std::size_t>(j, "arity", where);
    if (arity == 0)
        throw InvalidArgument(where + ": arity must be positive");
    if (! j.contains("table") || ! j.at("table").is_array())
        throw InvalidArgument(where + ": 'table' must be an array");
    auto cells = saturating_pow(d.size(), arity);
    if (j.at("table").size() != cells)
        throw InvalidArgument(where + ": table has " + std::to_string(j.at("table").size()) + " entries, expected " + std::to_string(cells));
    Operation f{name, arity, d.size(), {}};
    for (auto & e : j.at("table"))
        f.table.push_back(detail::element_from_json(e, d, where));
    return f;
}

inline auto operation_to_json(const Operation & f, const Domain & d) -> json
{
    return {{"name", f.name}, {"arity", f.arity}, {"table", elements_to_json(f.table, d)}};
}

// {name, domain, operations}
inline auto algebra_from_json(const json & j) -> Algebra
{
    auto d = Domain(detail::field<std::vector<std::string>>(j, "domain", "algebra"));
    Algebra a{j.contains("name") ? detail::field<std::string>(j, "name", "algebra") : "algebra", d, {}};
    if (! j.contains("operations") || ! j.at("operations").is_array())
        throw InvalidArgument("algebra: 'operations' must be an array");
    for (auto & f : j.at("operations"))
        a.operations.push_back(operation_from_json(f, d));
    return a;
}

inline auto algebra_to_json(const Algebra & a) -> json
{
    json ops = json::array();
    for (auto & f : a.operations)
        ops.push_back(operation_to_json(f, a.domain));
    return {{"name", a.name}, {"domain", a.domain.names()}, {"operations", ops}};
}

// Array of tuples, each an array of element names (or indices).
inline auto universe_from_json(const json & j, const Domain & d) -> std::vector<Tuple>
{
    if (! j.is_array())
        throw InvalidArgument("universe: expected an array of tuples");
    std::vector<Tuple> out;
    for (auto & t : j) {
        if (! t.is_array())
            throw InvalidArgument("universe: expected an array of tuples");
        Tuple u;
        for (auto & e : t)
            u.push_back(detail::element_from_json(e, d, "universe"));
        out.push_back(std::move(u));
    }
    return out;
}

inline auto load_sentence(const std::string & path, const Domain & d) -> PHSentence
{
    auto text = read_text_file(path);
    try {
        return parse_sentence(text, d);
    }
    catch (const Error & e) {
        throw FileError(e.what(), path);
    }
}

} // namespace qcsplab
