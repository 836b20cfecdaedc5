#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfl {

// Root of the library's error hierarchy.  Every failure mode that callers are
// expected to handle derives from this, so "catch (const mfl::Error&)" is a
// complete safety net around any library call.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Text could not be parsed; `offset` is the byte position of the failure.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// A Moufang-equivalence closure grew past the configured cap.  Carries the
// number of members discovered before giving up.
class CapExceededError : public Error {
public:
    CapExceededError(std::size_t partial_size, std::size_t cap)
        : Error("equivalence closure exceeded cap of " + std::to_string(cap) +
                " (saw " + std::to_string(partial_size) + " members)"),
          partial_size_(partial_size),
          cap_(cap) {}
    std::size_t partial_size() const noexcept { return partial_size_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t partial_size_;
    std::size_t cap_;
};

// Normal-form search explored more reduction branches than the budget allows.
class PathBudgetError : public Error {
public:
    explicit PathBudgetError(std::size_t budget)
        : Error("reduction path budget of " + std::to_string(budget) + " exhausted"),
          budget_(budget) {}
    std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t budget_;
};

// Two maximal reduction paths of the same word terminated in different
// equivalence classes.  This is a defensive report: the reduction theory
// treats uniqueness of the reduced class as ground truth, and the engine
// checks it on every normal-form computation instead of assuming it.
class ConfluenceError : public Error {
public:
    ConfluenceError(const std::string& first, const std::string& second)
        : Error("reduction diverged: reduced forms " + first + " and " + second +
                " are not equivalent"),
          first_(first),
          second_(second) {}
    const std::string& first() const noexcept { return first_; }
    const std::string& second() const noexcept { return second_; }

private:
    std::string first_;
    std::string second_;
};

// Arithmetic attempted between elements over different fields (e.g. GF(p)
// values with different p, or a rational mixed with a prime-field value).
class FieldMismatchError : public Error {
public:
    explicit FieldMismatchError(const std::string& what) : Error(what) {}
};

// An algebra element's support contains basis words outside the configured
// support universe; carries a printable list of the offending words.
class SupportError : public Error {
public:
    SupportError(const std::string& what, std::vector<std::string> offenders)
        : Error(what), offenders_(std::move(offenders)) {}
    const std::vector<std::string>& offenders() const noexcept { return offenders_; }

private:
    std::vector<std::string> offenders_;
};

// Structured input (JSON, config) is syntactically valid but violates the
// expected schema or a value constraint.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(what) {}
};

// A Cayley table is not a Latin square; carries the offending row/column.
class LatinSquareError : public Error {
public:
    LatinSquareError(const std::string& what, std::size_t row, std::size_t col)
        : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(col) + ")"),
          row_(row),
          col_(col) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

// An operation that requires a non-identity loop element received the
// identity (e.g. embedding checks on 1 - u with u = e).
class IdentityInputError : public Error {
public:
    explicit IdentityInputError(const std::string& what) : Error(what) {}
};

// A span or universe enumeration outgrew its configured row/element budget.
class DimensionOverflowError : public Error {
public:
    DimensionOverflowError(const std::string& what, std::size_t size, std::size_t cap)
        : Error(what + ": " + std::to_string(size) + " exceeds cap " + std::to_string(cap)),
          size_(size),
          cap_(cap) {}
    std::size_t size() const noexcept { return size_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t size_;
    std::size_t cap_;
};

}  // namespace mfl
