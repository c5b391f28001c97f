#pragma once

#include <stdexcept>
#include <string>

namespace pluginrisk {

// Base class for everything this library throws on bad input.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NegativeProbability : Error {
    explicit NegativeProbability(const std::string& msg) : Error(msg) {}
};

struct SumNotOne : Error {
    explicit SumNotOne(const std::string& msg) : Error(msg) {}
};

struct EmptyVector : Error {
    explicit EmptyVector(const std::string& msg) : Error(msg) {}
};

// Argument outside the domain an operation is defined on.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A closed-form expression exists only on a restricted parameter range.
struct OutOfValidityRange : Error {
    explicit OutOfValidityRange(const std::string& msg) : Error(msg) {}
};

// Requested a closed form that is not known for this functional.
struct NoClosedForm : Error {
    explicit NoClosedForm(const std::string& msg) : Error(msg) {}
};

// Exhaustive enumeration would exceed the configured outcome cap.
struct FeasibilityCapExceeded : Error {
    explicit FeasibilityCapExceeded(const std::string& msg) : Error(msg) {}
};

} // namespace pluginrisk
