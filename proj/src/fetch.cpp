#include "recordminer/fetch.hpp"

#include <chrono>
#include <ctime>

#include <httplib.h>
#include <json.hpp>

#include "recordminer/io.hpp"

namespace recordminer {

namespace {

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string target;  // path and query
};

UrlParts split_url(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (!is_url(url) || scheme_end == std::string_view::npos) {
        throw FetchError("url", 0, "not an http(s) URL: " + std::string(url));
    }
    const auto path_start = url.find_first_of("/?#", scheme_end + 3);
    UrlParts parts;
    parts.origin = std::string(url.substr(0, path_start));
    if (parts.origin.size() == scheme_end + 3) {
        throw FetchError("url", 0, "URL has no host: " + std::string(url));
    }
    if (path_start == std::string_view::npos) {
        parts.target = "/";
    } else {
        auto rest = url.substr(path_start);
        if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
        parts.target = rest.empty() || rest.front() != '/' ? "/" + std::string(rest) : std::string(rest);
    }
    return parts;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// The redirect target as an absolute URL; httplib hands back the Location
/// header as written, which may be origin-relative.
std::string resolve_location(const std::string& origin, const std::string& location) {
    if (location.find("://") != std::string::npos) return location;
    if (location.starts_with("//")) return origin.substr(0, origin.find("://") + 1) + location;
    if (location.starts_with("/")) return origin + location;
    return origin + "/" + location;
}

}  // namespace

bool is_url(std::string_view input) {
    return input.starts_with("http://") || input.starts_with("https://");
}

FetchResult fetch_url(std::string_view url, const FetchOptions& options) {
    const auto parts = split_url(url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.starts_with("https://")) {
        throw FetchError("tls", 0, "built without TLS support: " + std::string(url));
    }
#endif
    httplib::Client client(parts.origin);
    const auto timeout = std::chrono::milliseconds(static_cast<long long>(options.timeout_seconds * 1000));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    client.set_follow_location(true);
    const httplib::Headers headers{{"User-Agent", options.user_agent}};
    auto res = client.Get(parts.target, headers);
    if (!res) {
        const auto err = res.error();
        std::string reason = "connection";
        if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) reason = "timeout";
        if (err == httplib::Error::SSLConnection || err == httplib::Error::SSLServerVerification) reason = "tls";
        throw FetchError(reason, 0, "fetch of " + std::string(url) + " failed: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300) {
        throw FetchError("status", res->status,
                         "fetch of " + std::string(url) + " returned status " + std::to_string(res->status));
    }
    FetchResult result;
    result.url = std::string(url);
    result.final_url = res->location.empty() ? result.url : resolve_location(parts.origin, res->location);
    result.status = res->status;
    result.body = std::move(res->body);
    return result;
}

void save_snapshot(const FetchResult& result, const std::filesystem::path& out) {
    write_file(out, result.body);
    const nlohmann::ordered_json meta{{"url", result.url},
                                      {"final_url", result.final_url},
                                      {"status", result.status},
                                      {"bytes", result.body.size()},
                                      {"fetched_at", utc_timestamp()}};
    auto meta_path = out;
    meta_path += ".meta.json";
    write_file(meta_path, meta.dump(2) + "\n");
}

}  // namespace recordminer
