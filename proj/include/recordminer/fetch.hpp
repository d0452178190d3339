#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "recordminer/error.hpp"

namespace recordminer {

struct FetchOptions {
    double timeout_seconds = 15;
    std::string user_agent = "recordminer/1.0";
};

struct FetchResult {
    std::string url;
    std::string final_url;
    int status = 0;
    std::string body;
};

/// Network failure or non-2xx response. `reason` is one of "timeout",
/// "connection", "status", "url", "tls".
class FetchError : public Error {
public:
    FetchError(std::string reason, int status, const std::string& message)
        : Error(ErrorKind::FetchError, "fetch", message), reason_(std::move(reason)), status_(status) {}

    const std::string& reason() const noexcept { return reason_; }
    int status() const noexcept { return status_; }

private:
    std::string reason_;
    int status_;
};

bool is_url(std::string_view input);

/// GET with redirects followed. Throws FetchError.
FetchResult fetch_url(std::string_view url, const FetchOptions& options = {});

/// Writes the body verbatim to `out` and `<out>.meta.json` alongside with
/// the final URL, status and a UTC timestamp.
void save_snapshot(const FetchResult& result, const std::filesystem::path& out);

}  // namespace recordminer
