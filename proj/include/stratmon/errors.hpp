#pragma once

#include <stdexcept>
#include <string>

namespace stratmon {

// Bad user input: malformed files, unknown identifiers, precondition violations.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : InputError {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : InputError(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

// Joint action not enabled at a state; names the blocking agent.
struct ProtocolError : InputError {
    std::string agent;
    ProtocolError(const std::string& msg, std::string blocking_agent)
        : InputError(msg), agent(std::move(blocking_agent)) {}
};

// Formula outside the fragment an operation supports.
struct FragmentError : InputError {
    explicit FragmentError(const std::string& msg) : InputError(msg) {}
};

// Model too large for the brute-force oracle.
struct OracleScaleError : InputError {
    explicit OracleScaleError(const std::string& msg) : InputError(msg) {}
};

struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when the pipeline derives contradictory verdicts on a model trace;
// this indicates a bug, never a property of the input.
struct InternalSoundnessError : std::logic_error {
    explicit InternalSoundnessError(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace stratmon
