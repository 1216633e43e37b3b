#pragma once

#include "qcsplab/domain.hpp"
#include "qcsplab/error.hpp"
#include "qcsplab/model.hpp"

#include <algorithm>
#include <string>

namespace qcsplab {

// ({0..n-1}, min)
inline auto meet_semilattice(std::size_t n) -> Algebra
{
    auto d = Domain::of_size(n);
    return {"meet" + std::to_string(n), d,
        {Operation::from_function("meet", n, 2, [](std::span<const Element> a) { return std::min(a[0], a[1]); })}};
}

// ({0..n-1}, max)
inline auto join_semilattice(std::size_t n) -> Algebra
{
    auto d = Domain::of_size(n);
    return {"join" + std::to_string(n), d,
        {Operation::from_function("join", n, 2, [](std::span<const Element> a) { return std::max(a[0], a[1]); })}};
}

// A binary projection only; its clone is the projections.
inline auto projections_algebra(std::size_t n) -> Algebra
{
    return {"projections" + std::to_string(n), Domain::of_size(n), {Operation::projection(n, 2, 0)}};
}

// Ternary majority returning the first argument when all three differ.
inline auto majority_algebra(std::size_t n) -> Algebra
{
    return {"majority" + std::to_string(n), Domain::of_size(n), {Operation::from_function("majority", n, 3, [](std::span<const Element> a) {
        if (a[1] == a[2])
            return a[1];
        return a[0];
    })}};
}

// x - y + z mod n
inline auto affine_algebra(std::size_t n) -> Algebra
{
    return {"affine" + std::to_string(n), Domain::of_size(n), {Operation::from_function("minority", n, 3, [n](std::span<const Element> a) {
        return static_cast<Element>((a[0] + n - a[1] + a[2]) % n);
    })}};
}

// `meet:2`, `join:3`, `projections:2`, `majority:2`, `affine:3`
inline auto builtin_algebra(const std::string & descriptor) -> Algebra
{
    auto colon = descriptor.find(':');
    if (colon == std::string::npos)
        throw InvalidArgument("built-in algebra must look like name:size, got '" + descriptor + "'");
    auto name = descriptor.substr(0, colon);
    std::size_t n = 0;
    try {
        n = std::stoul(descriptor.substr(colon + 1));
    }
    catch (const std::exception &) {
        throw InvalidArgument("bad domain size in '" + descriptor + "'");
    }
    if (n == 0 || n > 16)
        throw InvalidArgument("built-in algebra size must be between 1 and 16");
    if (name == "meet")
        return meet_semilattice(n);
    if (name == "join")
        return join_semilattice(n);
    if (name == "projections")
        return projections_algebra(n);
    if (name == "majority")
        return majority_algebra(n);
    if (name == "affine")
        return affine_algebra(n);
    throw InvalidArgument("unknown built-in algebra '" + name + "'");
}

} // namespace qcsplab
