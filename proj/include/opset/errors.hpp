#pragma once

#include <stdexcept>
#include <string>

namespace opset {

/// Shape or labelling mismatch between objects that must agree (party layouts,
/// vector lengths, factor labels).
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed text input (state-set, measurement and protocol formats).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace opset
