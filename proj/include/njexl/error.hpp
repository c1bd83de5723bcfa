#pragma once

#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <string>

namespace njexl {

struct Position {
    std::uint32_t line = 0;
    std::uint32_t column = 0;

    friend bool operator==(const Position&, const Position&) = default;
};

class Value;

/// Runtime representation of a raised error. Scripts see it as an ErrorValue
/// (via `#(o,:e)` capture); hosts see it through ScriptError.
struct ErrorInfo {
    std::string kind;
    std::string message;
    std::optional<Position> position;
    std::shared_ptr<const ErrorInfo> cause;
};

/// The single exception type thrown by lexer, parser and evaluator.
class ScriptError : public std::exception {
  public:
    ScriptError(std::string kind, std::string message,
                std::optional<Position> pos = std::nullopt);
    explicit ScriptError(std::shared_ptr<ErrorInfo> info);

    const char* what() const noexcept override { return what_.c_str(); }

    const std::string& kind() const noexcept { return info_->kind; }
    const std::string& message() const noexcept { return info_->message; }
    const std::optional<Position>& position() const noexcept {
        return info_->position;
    }
    std::shared_ptr<const ErrorInfo> info() const noexcept { return info_; }

    // Only fills in a position when none is recorded yet, so the innermost
    // node that saw the error wins.
    void attach_position(Position pos);

  private:
    void rebuild_what();

    std::shared_ptr<ErrorInfo> info_;
    std::string what_;
};

[[noreturn]] void raise(std::string kind, std::string message);

/// "Kind at L:C: message" (position omitted when unknown).
std::string describe(const ErrorInfo& info);

}  // namespace njexl
