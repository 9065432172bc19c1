#pragma once

#include <stdexcept>
#include <string>

namespace provkit {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid input from the caller: bad arguments, schema violations,
/// graph construction violations, unsupported question scopes.
/// The CLI maps these to exit code 1.
struct UserError : Error {
    explicit UserError(const std::string& what) : Error(what) {}
};

/// Errors raised while querying or interpreting data: query syntax and
/// type errors, unknown relations or ids, out-of-range snapshots.
/// The CLI maps these to exit code 2.
struct DataError : Error {
    explicit DataError(const std::string& what) : Error(what) {}
};

} // namespace provkit
