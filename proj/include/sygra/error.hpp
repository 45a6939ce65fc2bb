#pragma once

#include <stdexcept>
#include <string>

namespace sygra {

/// Raised when an operation is handed input that violates its precondition
/// (malformed graph, domain mismatch, unbound variable, variable capture...).
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in a formula or document, with a 1-based source position.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

/// External solver could not be started, or spoke an unexpected protocol.
class SolverError : public std::runtime_error {
public:
    enum class Kind { Launch, Protocol };

    SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

}  // namespace sygra
