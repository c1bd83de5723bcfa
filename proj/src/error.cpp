#include "njexl/error.hpp"

#include <utility>

namespace njexl {

ScriptError::ScriptError(std::string kind, std::string message,
                         std::optional<Position> pos)
    : info_(std::make_shared<ErrorInfo>(
          ErrorInfo{std::move(kind), std::move(message), pos, nullptr})) {
    rebuild_what();
}

ScriptError::ScriptError(std::shared_ptr<ErrorInfo> info)
    : info_(std::move(info)) {
    rebuild_what();
}

void ScriptError::attach_position(Position pos) {
    if (info_->position) return;
    // ErrorInfo may be shared with an ErrorValue already handed to a script.
    if (info_.use_count() > 1) info_ = std::make_shared<ErrorInfo>(*info_);
    info_->position = pos;
    rebuild_what();
}

void ScriptError::rebuild_what() { what_ = describe(*info_); }

void raise(std::string kind, std::string message) {
    throw ScriptError(std::move(kind), std::move(message));
}

std::string describe(const ErrorInfo& info) {
    std::string out = info.kind;
    if (info.position) {
        out += " at " + std::to_string(info.position->line) + ":" +
               std::to_string(info.position->column);
    }
    out += ": ";
    out += info.message;
    return out;
}

}  // namespace njexl
