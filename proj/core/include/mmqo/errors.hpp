#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmqo {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed plan document or operator string. `offset` is the byte offset
/// of the failure inside the fragment being parsed (the whole document for
/// JSON-level errors, the operator string for grammar-level errors).
struct ParseError : Error {
    ParseError(std::string message, std::size_t offset)
        : Error(std::move(message)), offset(offset) {}
    std::size_t offset = 0;
};

/// A plan references a table the catalog does not know.
struct UnknownTableError : Error {
    explicit UnknownTableError(const std::string &table)
        : Error("unknown table: " + table), table(table) {}
    std::string table;
};

/// Exhaustive search refused to run on an oversized plan.
struct BudgetExceededError : Error {
    using Error::Error;
};

/// The query generator could not produce a plan within its attempt bound.
struct GenerationExhaustedError : Error {
    using Error::Error;
};

/// Network or HTTP failure talking to a remote endpoint.
struct TransportError : Error {
    using Error::Error;
};

/// A remote reply that could not be interpreted.
struct MalformedReplyError : Error {
    using Error::Error;
};

/// The embedding backend is unreachable; callers degrade to lexical scoring.
struct BackendUnavailableError : Error {
    using Error::Error;
};

/// The plan handed to the optimization loop is not structurally valid.
struct InvalidInitialPlanError : Error {
    using Error::Error;
};

/// Bad run configuration (CLI or config file).
struct ConfigError : Error {
    using Error::Error;
};

} // namespace mmqo
