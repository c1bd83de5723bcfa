#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "njexl/value.hpp"

namespace njexl {

/// Fetches the full text behind a URL of one scheme.
using Fetcher = std::function<std::string(const std::string& url)>;

/// Resolves `read`/`lines`/`write` locations. Dispatches on the prefix before
/// "://"; locations without a scheme are files. Safe to share between
/// evaluation contexts.
class ResourceLoader {
  public:
    void register_scheme(std::string scheme, Fetcher fetch);
    /// Serves `url` from a local file instead of its scheme handler.
    void map_url(std::string url, std::filesystem::path file);

    /// Throws FileNotFound / IoError.
    std::string read(const std::string& location) const;
    /// Files are read lazily; everything else is fetched whole and split.
    IteratorPtr lines(const std::string& location) const;
    void write(const std::string& location, std::string_view content) const;

    static std::string read_file(const std::filesystem::path& path);

  private:
    std::optional<std::filesystem::path> mapped(const std::string& location) const;
    Fetcher fetcher_for(const std::string& location) const;

    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, Fetcher> schemes_;
    std::unordered_map<std::string, std::filesystem::path> url_map_;
};

/// Everything an evaluation context uses to touch the outside world.
struct IoPorts {
    std::function<void(std::string_view)> out;
    std::function<void(std::string_view)> err;
    std::shared_ptr<ResourceLoader> loader;
    /// Monotonic nanoseconds.
    std::function<std::int64_t()> clock;
    std::unordered_map<std::string, std::string> env;

    /// stdout/stderr, file-only loader, steady clock, process environment.
    static IoPorts standard();
};

std::function<std::int64_t()> steady_clock_ns();
/// Deterministic clock: every sample advances by `step` nanoseconds.
std::function<std::int64_t()> fake_clock(std::int64_t step);

/// http:// and https:// fetcher backed by cpp-httplib.
Fetcher http_fetcher();

}  // namespace njexl
