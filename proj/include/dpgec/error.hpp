#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dpgec {

/// Library exception. `code()` is a stable machine-readable identifier that the
/// CLI forwards in its JSON error object.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Raised by problem validation; carries every violated assumption.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error("validation", join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& s : items) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

}  // namespace dpgec
