#pragma once

#include <stdexcept>
#include <string>

namespace essograph {

// Malformed input data: ragged rows, duplicate headers, empty body,
// undeclared missing markers, unparseable cell files.
class DataFormatError : public std::runtime_error {
public:
    explicit DataFormatError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument to a library operation (x == y in a test, df == 0,
// keep set not a subset, zero samples requested, bad config key, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// A sequencing violation inside the test-ledger protocol, e.g. evaluating
// the consistency condition while a required lower-order entry is still
// undetermined.
class ProtocolError : public std::logic_error {
public:
    explicit ProtocolError(const std::string& what) : std::logic_error(what) {}
};

// A graph-level precondition does not hold (cyclic input to d-separation,
// extension requested for a graph that fails validation, ...).
class PreconditionError : public std::logic_error {
public:
    explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

// Repair cannot produce a consistent extension because the conflict is
// confined to protected immorality arcs.
class UnrecoverableConflictError : public std::runtime_error {
public:
    explicit UnrecoverableConflictError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace essograph
