#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "njexl/io.hpp"

namespace njexl {

Fetcher http_fetcher() {
    return [](const std::string& url) -> std::string {
        auto scheme_end = url.find("://");
        auto path_start = url.find('/', scheme_end + 3);
        std::string origin = url.substr(0, path_start);
        std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

        httplib::Client client(origin);
        client.set_follow_location(true);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        auto res = client.Get(path);
        if (!res) {
            raise("IoError", "GET " + url + " failed: " + httplib::to_string(res.error()));
        }
        if (res->status >= 400) {
            raise(res->status == 404 ? "FileNotFound" : "IoError",
                  "GET " + url + " returned HTTP " + std::to_string(res->status));
        }
        return res->body;
    };
}

}  // namespace njexl
