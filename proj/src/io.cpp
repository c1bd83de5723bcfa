#include "njexl/io.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

extern char** environ;

namespace njexl {

namespace {

class FileLines : public Iterator {
  public:
    FileLines(std::ifstream in) : in_(std::move(in)) {}

    std::optional<Value> next() override {
        std::string line;
        if (!in_.is_open() || !std::getline(in_, line)) {
            in_.close();
            return std::nullopt;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return Value::str(std::move(line));
    }

  private:
    std::ifstream in_;
};

class BufferedLines : public Iterator {
  public:
    explicit BufferedLines(std::string text) : text_(std::move(text)) {}

    std::optional<Value> next() override {
        if (pos_ >= text_.size()) return std::nullopt;
        auto nl = text_.find('\n', pos_);
        std::size_t end = nl == std::string::npos ? text_.size() : nl;
        std::string line = text_.substr(pos_, end - pos_);
        pos_ = nl == std::string::npos ? text_.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return Value::str(std::move(line));
    }

  private:
    std::string text_;
    std::size_t pos_ = 0;
};

std::optional<std::string> scheme_of(const std::string& location) {
    auto p = location.find("://");
    if (p == std::string::npos || p == 0) return std::nullopt;
    return location.substr(0, p);
}

std::ifstream open_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) raise("IoError", "'" + path.string() + "' is a directory");
    std::ifstream in(path, std::ios::binary);
    if (!in) raise("FileNotFound", "cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

void ResourceLoader::register_scheme(std::string scheme, Fetcher fetch) {
    std::unique_lock lock(mutex_);
    schemes_[std::move(scheme)] = std::move(fetch);
}

void ResourceLoader::map_url(std::string url, std::filesystem::path file) {
    std::unique_lock lock(mutex_);
    url_map_[std::move(url)] = std::move(file);
}

std::optional<std::filesystem::path> ResourceLoader::mapped(const std::string& location) const {
    std::shared_lock lock(mutex_);
    auto it = url_map_.find(location);
    if (it == url_map_.end()) return std::nullopt;
    return it->second;
}

Fetcher ResourceLoader::fetcher_for(const std::string& location) const {
    auto scheme = scheme_of(location);
    if (!scheme || *scheme == "file") return nullptr;
    std::shared_lock lock(mutex_);
    auto it = schemes_.find(*scheme);
    if (it == schemes_.end()) raise("IoError", "no handler for scheme '" + *scheme + "' (" + location + ")");
    return it->second;
}

namespace {
std::filesystem::path file_part(const std::string& location) {
    if (location.rfind("file://", 0) == 0) return location.substr(7);
    return location;
}
}  // namespace

std::string ResourceLoader::read_file(const std::filesystem::path& path) {
    auto in = open_file(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string ResourceLoader::read(const std::string& location) const {
    if (auto file = mapped(location)) return read_file(*file);
    if (auto fetch = fetcher_for(location)) return fetch(location);
    return read_file(file_part(location));
}

IteratorPtr ResourceLoader::lines(const std::string& location) const {
    if (auto file = mapped(location)) return std::make_shared<FileLines>(open_file(*file));
    if (auto fetch = fetcher_for(location)) return std::make_shared<BufferedLines>(fetch(location));
    return std::make_shared<FileLines>(open_file(file_part(location)));
}

void ResourceLoader::write(const std::string& location, std::string_view content) const {
    if (scheme_of(location) && location.rfind("file://", 0) != 0) {
        raise("IoError", "cannot write to '" + location + "'");
    }
    std::ofstream out(file_part(location), std::ios::binary | std::ios::trunc);
    if (!out) raise("IoError", "cannot open '" + location + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) raise("IoError", "write to '" + location + "' failed");
}

std::function<std::int64_t()> steady_clock_ns() {
    return [] {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    };
}

std::function<std::int64_t()> fake_clock(std::int64_t step) {
    auto now = std::make_shared<std::int64_t>(0);
    return [now, step] { return *now += step; };
}

IoPorts IoPorts::standard() {
    IoPorts io;
    io.out = [](std::string_view s) { std::cout << s << std::flush; };
    io.err = [](std::string_view s) { std::cerr << s << std::flush; };
    io.loader = std::make_shared<ResourceLoader>();
    io.clock = steady_clock_ns();
    for (char** e = environ; e && *e; ++e) {
        std::string_view kv(*e);
        auto eq = kv.find('=');
        if (eq == std::string_view::npos) continue;
        io.env.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
    }
    return io;
}

}  // namespace njexl
