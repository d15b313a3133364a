#pragma once

// Access-log ingestion: Common/Combined Log Format parsing, sessionization
// into navigations and the human-navigation filters.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wudrift {

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

enum class LogFormat { Common, Combined };

std::optional<LogFormat> parse_log_format(std::string_view name);

struct RawRequest {
    Timestamp timestamp = 0;
    std::string user_key;   // client address, plus "|" + user agent for Combined
    std::string resource;   // URL path without query string or fragment
    int status = 0;
    std::uint64_t bytes = 0;  // 0 when the log says "-"

    bool operator==(const RawRequest&) const = default;
};

struct ParseResult {
    std::vector<RawRequest> requests;
    std::size_t malformed = 0;
    std::size_t lines = 0;
};

// Parses one log line. Returns nullopt for a malformed line.
std::optional<RawRequest> parse_log_line(std::string_view line, LogFormat format);

ParseResult parse_log(std::istream& in, LogFormat format);

// Reads a plain or gzip-compressed log file. Throws Error("io") when the
// file cannot be opened or read.
ParseResult parse_log_file(const std::filesystem::path& path, LogFormat format);

struct Navigation {
    std::uint64_t id = 0;
    std::string user_key;
    std::vector<RawRequest> requests;  // time-ordered, never empty

    Timestamp start() const { return requests.front().timestamp; }
    Timestamp end() const { return requests.back().timestamp; }
    std::int64_t duration() const { return end() - start(); }
    std::size_t size() const { return requests.size(); }

    bool operator==(const Navigation&) const = default;
};

inline constexpr std::int64_t kDefaultSessionTimeout = 30 * 60;

// Groups requests per user and splits a user's stream whenever the gap to the
// previous request strictly exceeds `timeout` seconds. Requests of one user
// sharing a timestamp keep their input order. Navigations are numbered from 1
// in order of (start, user_key).
std::vector<Navigation> sessionize(std::span<const RawRequest> requests,
                                   std::int64_t timeout = kDefaultSessionTimeout);

struct NavigationFilter {
    std::size_t min_requests = 10;
    std::int64_t min_duration = 60;  // seconds
    double min_ratio = 4.0;          // seconds per request
};

bool passes_filter(const Navigation& nav, const NavigationFilter& filter);

std::vector<Navigation> filter_navigations(std::vector<Navigation> navs,
                                           const NavigationFilter& filter = {});

// Drops navigations whose total duration or total transferred size is
// strictly above the given quantile (linear interpolation between order
// statistics) of the input set.
std::vector<Navigation> drop_outliers(std::vector<Navigation> navs, double quantile = 0.99);

// Navigation files: a tab-separated index (id, user_key, start, end,
// request_count) and a sidecar with one request per line (nav_id, timestamp,
// status, bytes, resource). Tabs and line breaks inside text fields are
// written as spaces.
void write_navigations(const std::vector<Navigation>& navs,
                       const std::filesystem::path& index_path,
                       const std::filesystem::path& requests_path);

std::vector<Navigation> read_navigations(const std::filesystem::path& index_path,
                                         const std::filesystem::path& requests_path);

}  // namespace wudrift
