#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace parammp {

enum class ErrorKind {
    Validation,
    ModeUnsupported,
    DimensionMismatch,
    NotGeneric,
    NotApplicable,
    Precondition,
    Consistency,
    Inconclusive,
    Unsupported,
    OutOfRange,
    Parse,
};

/// Base for every error raised by the library. `issues()` carries the full
/// list when more than one problem was found (validation, parsing).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::vector<std::string> issues = {})
        : std::runtime_error(message), kind_(kind), issues_(std::move(issues)) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    ErrorKind kind_;
    std::vector<std::string> issues_;
};

inline std::string join_issues(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& issue : issues) {
        if (!out.empty()) out += "; ";
        out += issue;
    }
    return out;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace parammp
