#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "njexl/value.hpp"

namespace njexl {

/// Native modules reachable through `import 'path' as Alias`.
class ModuleRegistry {
  public:
    void add(ModulePtr module);
    ModulePtr find(const std::string& path) const;

    /// Seeded with the 'java.lang.Integer' shim (parseInt).
    static std::shared_ptr<ModuleRegistry> with_defaults();

  private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, ModulePtr> modules_;
};

/// Builtin functions by name. Script bindings shadow these.
const std::unordered_map<std::string, Value>& builtins();

/// java.lang.Integer.parseInt semantics: optional sign, digits only, 32-bit
/// range. Throws NumberFormatError.
std::int64_t parse_int32(const std::string& text, int radix = 10);

}  // namespace njexl
