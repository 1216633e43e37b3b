#pragma once

#include "qcsplab/error.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace qcsplab {

// Dense index of a domain element; names live in Domain.
using Element = std::uint32_t;
using Tuple = std::vector<Element>;

// Default budget for enumerations that grow like n^(n^k) or |R|^k.
inline constexpr std::uint64_t default_budget = 10'000'000;

// b^e, saturating at UINT64_MAX.
inline auto saturating_pow(std::uint64_t base, std::uint64_t exp) -> std::uint64_t
{
    std::uint64_t result = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (base != 0 && result > std::numeric_limits<std::uint64_t>::max() / base)
            return std::numeric_limits<std::uint64_t>::max();
        result *= base;
    }
    return result;
}

// Mixed-radix rank of a tuple, first entry most significant. Lexicographic
// order on tuples coincides with numeric order on codes.
inline auto tuple_code(std::span<const Element> t, std::size_t n) -> std::uint64_t
{
    std::uint64_t code = 0;
    for (auto e : t)
        code = code * n + e;
    return code;
}

inline auto decode_tuple(std::uint64_t code, std::size_t n, std::size_t length) -> Tuple
{
    Tuple t(length);
    for (std::size_t i = length; i-- > 0;) {
        t[i] = static_cast<Element>(code % n);
        code /= n;
    }
    return t;
}

// Advances t to the lexicographic successor in A^|t|; false on wrap-around.
inline auto next_tuple(Tuple & t, std::size_t n) -> bool
{
    for (std::size_t i = t.size(); i-- > 0;) {
        if (++t[i] < n)
            return true;
        t[i] = 0;
    }
    return false;
}

// All of A^length in lexicographic order.
inline auto all_tuples(std::size_t n, std::size_t length) -> std::vector<Tuple>
{
    std::vector<Tuple> out;
    if (n == 0 && length > 0)
        return out;
    Tuple t(length, 0);
    do
        out.push_back(t);
    while (next_tuple(t, n));
    return out;
}

class Domain {
public:
    Domain() = default;

    explicit Domain(std::vector<std::string> names) : names_(std::move(names))
    {
        if (names_.empty())
            throw InvalidArgument("domain must have at least one element");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty())
                throw InvalidArgument("domain element names must be nonempty");
            if (! index_.emplace(names_[i], static_cast<Element>(i)).second)
                throw InvalidArgument("duplicate domain element '" + names_[i] + "'");
        }
    }

    // {0, 1, ..., n-1} named by their decimal indices.
    static auto of_size(std::size_t n) -> Domain
    {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i)
            names.push_back(std::to_string(i));
        return Domain(std::move(names));
    }

    auto size() const noexcept -> std::size_t { return names_.size(); }
    auto names() const noexcept -> const std::vector<std::string> & { return names_; }
    auto name(Element e) const -> const std::string & { return names_.at(e); }

    auto find(const std::string & name) const -> std::optional<Element>
    {
        auto it = index_.find(name);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    auto index(const std::string & name) const -> Element
    {
        auto e = find(name);
        if (! e)
            throw InvalidArgument("unknown domain element '" + name + "'");
        return *e;
    }

    friend auto operator==(const Domain & a, const Domain & b) -> bool { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Element> index_;
};

// A set of tuples of fixed arity over a domain of size n, stored as a dense
// bitmap over A^arity. Iteration is in lexicographic order.
class TupleSet {
public:
    static constexpr std::uint64_t max_dense = std::uint64_t{1} << 27;

    TupleSet() = default;

    TupleSet(std::size_t domain_size, std::size_t arity) :
        n_(domain_size),
        arity_(arity)
    {
        auto cells = saturating_pow(n_, arity_);
        if (cells > max_dense)
            throw BudgetExceeded("tuple set over A^" + std::to_string(arity_) + " too large to materialize", cells, max_dense);
        bits_.assign(cells, false);
    }

    auto domain_size() const noexcept -> std::size_t { return n_; }
    auto arity() const noexcept -> std::size_t { return arity_; }
    auto size() const noexcept -> std::size_t { return count_; }
    auto empty() const noexcept -> bool { return count_ == 0; }
    auto capacity() const noexcept -> std::uint64_t { return bits_.size(); }

    auto contains_code(std::uint64_t code) const -> bool { return bits_[code]; }

    auto contains(std::span<const Element> t) const -> bool
    {
        if (t.size() != arity_)
            return false;
        for (auto e : t)
            if (e >= n_)
                return false;
        return bits_[tuple_code(t, n_)];
    }

    auto insert_code(std::uint64_t code) -> bool
    {
        if (bits_[code])
            return false;
        bits_[code] = true;
        ++count_;
        return true;
    }

    auto insert(std::span<const Element> t) -> bool
    {
        if (t.size() != arity_)
            throw InvalidArgument("tuple of length " + std::to_string(t.size()) + " inserted into arity " + std::to_string(arity_) + " set");
        for (auto e : t)
            if (e >= n_)
                throw InvalidArgument("tuple entry out of domain range");
        return insert_code(tuple_code(t, n_));
    }

    template <typename F>
    auto for_each_code(F && f) const -> void
    {
        for (std::uint64_t c = 0; c < bits_.size(); ++c)
            if (bits_[c])
                f(c);
    }

    auto codes() const -> std::vector<std::uint64_t>
    {
        std::vector<std::uint64_t> out;
        out.reserve(count_);
        for_each_code([&](std::uint64_t c) { out.push_back(c); });
        return out;
    }

    auto tuples() const -> std::vector<Tuple>
    {
        std::vector<Tuple> out;
        out.reserve(count_);
        for_each_code([&](std::uint64_t c) { out.push_back(decode_tuple(c, n_, arity_)); });
        return out;
    }

    friend auto operator==(const TupleSet & a, const TupleSet & b) -> bool
    {
        return a.n_ == b.n_ && a.arity_ == b.arity_ && a.bits_ == b.bits_;
    }

private:
    std::size_t n_ = 0;
    std::size_t arity_ = 0;
    std::size_t count_ = 0;
    std::vector<bool> bits_;
};

} // namespace qcsplab
