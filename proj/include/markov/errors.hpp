#pragma once

#include <stdexcept>
#include <string>

namespace markov {

/// Composition or comparison was attempted between kernels over different sets.
struct SetMismatch : std::invalid_argument {
    explicit SetMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// An operation that needs a product carrier got a plain set.
struct NotAProduct : std::invalid_argument {
    explicit NotAProduct(const std::string& what) : std::invalid_argument(what) {}
};

struct HorizonMismatch : std::invalid_argument {
    explicit HorizonMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Exchangeability only makes sense for machines with a trivial input set.
struct NotAGenerator : std::invalid_argument {
    explicit NotAGenerator(const std::string& what) : std::invalid_argument(what) {}
};

/// A belief set handed to an operation that requires closure under filtering was not closed.
struct NotClosed : std::invalid_argument {
    explicit NotClosed(const std::string& what) : std::invalid_argument(what) {}
};

struct ShapeMismatch : std::invalid_argument {
    explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A covariance matrix violated positive semidefiniteness beyond repair tolerance.
struct NotPsd : std::domain_error {
    explicit NotPsd(const std::string& what) : std::domain_error(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace markov
