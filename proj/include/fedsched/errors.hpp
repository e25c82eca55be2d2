#pragma once

#include <stdexcept>
#include <string>

namespace fedsched {

/// Error categories; the numeric value doubles as the CLI exit code.
enum class ErrorCode : int {
    bad_input = 2,
    io = 3,
    no_route = 4,
    out_of_horizon = 5,
    guard = 6,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }
    const char* code_name() const noexcept { return error_code_name(code_); }

private:
    ErrorCode code_;
};

struct BadInputError : Error {
    explicit BadInputError(const std::string& what) : Error(ErrorCode::bad_input, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

struct NoRouteError : Error {
    explicit NoRouteError(const std::string& what) : Error(ErrorCode::no_route, what) {}
};

struct OutOfHorizonError : Error {
    explicit OutOfHorizonError(const std::string& what) : Error(ErrorCode::out_of_horizon, what) {}
};

/// Refused by a safety guard (e.g. the oracle's factorial bound).
struct GuardError : Error {
    explicit GuardError(const std::string& what) : Error(ErrorCode::guard, what) {}
};

} // namespace fedsched
