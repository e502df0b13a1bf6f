// errors.hpp
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvbound {

/// Raised when an argument violates an operation's precondition.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by enumeration oracles whose input exceeds the enumeration budget.
class GuardError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Raised when a text format (sample file, CSV, JSON) cannot be parsed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    /// 1-based line number, 0 when not applicable.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Raised when a packing family cannot reach its size target.
class ConstructionError : public std::runtime_error {
public:
    ConstructionError(const std::string& what, std::size_t achieved)
        : std::runtime_error(what), achieved_(achieved) {}

    std::size_t achieved_size() const noexcept { return achieved_; }

private:
    std::size_t achieved_;
};

/// Raised when an experiment configuration is invalid; carries every violation found.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid experiment config:";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }

    std::vector<std::string> violations_;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
    if (!ok) throw ParameterError(message);
}

inline void require_delta(double delta) {
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1), got " + std::to_string(delta));
}

}  // namespace detail

}  // namespace tvbound
