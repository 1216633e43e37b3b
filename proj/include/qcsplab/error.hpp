#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcsplab {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string & what) : std::runtime_error(what) {}
};

// Malformed text input. `position` is a byte offset into the parsed text
// (or a 1-based line number for line-oriented formats, see `line`).
class ParseError : public Error {
public:
    ParseError(const std::string & what, std::size_t position, std::size_t line = 0) :
        Error(what + (line ? " (line " + std::to_string(line) + ")" : " (at offset " + std::to_string(position) + ")")),
        position_(position),
        line_(line)
    {
    }

    std::size_t position() const noexcept { return position_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t position_;
    std::size_t line_;
};

// A precondition on the inputs does not hold (wrong arity, unknown name, ...).
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string & what) : Error(what) {}
};

// A search or enumeration would exceed the caller's budget. `required` is the
// amount of work that was estimated or reached, when known.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string & what, std::uint64_t required, std::uint64_t budget) :
        Error(what + " (required " + std::to_string(required) + ", budget " + std::to_string(budget) + ")"),
        required_(required),
        budget_(budget)
    {
    }

    std::uint64_t required() const noexcept { return required_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

} // namespace qcsplab
