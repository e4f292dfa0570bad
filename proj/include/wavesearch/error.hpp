#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wavesearch {

// Input-side failures (validation, range, guard, config) map to CLI exit code 2;
// numerical and io failures map to exit code 1.
enum class ErrorKind { validation, range, guard, config, numerical, io };

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }
    bool is_input_error() const noexcept {
        return kind_ != ErrorKind::numerical && kind_ != ErrorKind::io;
    }

private:
    ErrorKind kind_;
    std::string module_;
};

/// Carries every violated invariant, not just the first.
class ValidationError : public Error {
public:
    ValidationError(std::string module, std::vector<std::string> problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

} // namespace wavesearch
