#include "wudrift/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "wudrift/error.hpp"
#include "wudrift/table_io.hpp"

namespace wudrift {

std::optional<LogFormat> parse_log_format(std::string_view name) {
    if (name == "common" || name == "clf") return LogFormat::Common;
    if (name == "combined") return LogFormat::Combined;
    return std::nullopt;
}

namespace {

// Cursor over a single log line.
class LineReader {
public:
    explicit LineReader(std::string_view line) : rest_(line) {}

    void skip_spaces() {
        while (!rest_.empty() && rest_.front() == ' ') rest_.remove_prefix(1);
    }

    std::optional<std::string_view> token() {
        skip_spaces();
        if (rest_.empty()) return std::nullopt;
        auto end = rest_.find(' ');
        auto tok = rest_.substr(0, end);
        rest_.remove_prefix(end == std::string_view::npos ? rest_.size() : end);
        return tok;
    }

    std::optional<std::string_view> bracketed() {
        skip_spaces();
        if (rest_.empty() || rest_.front() != '[') return std::nullopt;
        auto end = rest_.find(']');
        if (end == std::string_view::npos) return std::nullopt;
        auto inner = rest_.substr(1, end - 1);
        rest_.remove_prefix(end + 1);
        return inner;
    }

    // Double-quoted field; backslash escapes the next character.
    std::optional<std::string> quoted() {
        skip_spaces();
        if (rest_.empty() || rest_.front() != '"') return std::nullopt;
        std::string out;
        for (std::size_t i = 1; i < rest_.size(); ++i) {
            char c = rest_[i];
            if (c == '\\' && i + 1 < rest_.size()) {
                out.push_back(rest_[++i]);
            } else if (c == '"') {
                rest_.remove_prefix(i + 1);
                return out;
            } else {
                out.push_back(c);
            }
        }
        return std::nullopt;
    }

private:
    std::string_view rest_;
};

template <typename T>
bool parse_number(std::string_view text, T& value) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

int month_index(std::string_view name) {
    static constexpr std::array<std::string_view, 12> kMonths{
        "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    for (std::size_t i = 0; i < kMonths.size(); ++i)
        if (kMonths[i] == name) return static_cast<int>(i) + 1;
    return 0;
}

// "10/Oct/2000:13:55:36 -0700" -> seconds since epoch (UTC).
std::optional<Timestamp> parse_clf_time(std::string_view text) {
    if (text.size() != 26 || text[2] != '/' || text[6] != '/' || text[11] != ':' ||
        text[14] != ':' || text[17] != ':' || text[20] != ' ')
        return std::nullopt;
    int day = 0, year = 0, hour = 0, minute = 0, second = 0, zone = 0;
    if (!parse_number(text.substr(0, 2), day) || !parse_number(text.substr(7, 4), year) ||
        !parse_number(text.substr(12, 2), hour) || !parse_number(text.substr(15, 2), minute) ||
        !parse_number(text.substr(18, 2), second))
        return std::nullopt;
    const int month = month_index(text.substr(3, 3));
    const char sign = text[21];
    if (month == 0 || (sign != '+' && sign != '-') || !parse_number(text.substr(22, 4), zone))
        return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60 || zone % 100 > 59) return std::nullopt;

    using namespace std::chrono;
    const year_month_day date{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                              std::chrono::day{static_cast<unsigned>(day)}};
    if (!date.ok()) return std::nullopt;
    const std::int64_t offset = (zone / 100 * 3600 + zone % 100 * 60) * (sign == '-' ? -1 : 1);
    const auto local = sys_days{date}.time_since_epoch().count() * 86400LL + hour * 3600LL +
                       minute * 60LL + second;
    return local - offset;
}

std::string normalize_resource(std::string_view url) {
    if (auto scheme = url.find("://"); scheme != std::string_view::npos) {
        auto path = url.find('/', scheme + 3);
        url = path == std::string_view::npos ? std::string_view{} : url.substr(path);
    }
    url = url.substr(0, url.find_first_of("?#"));
    if (url.empty()) return "/";
    return std::string(url);
}

}  // namespace

std::optional<RawRequest> parse_log_line(std::string_view line, LogFormat format) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
    LineReader reader(line);

    auto host = reader.token();
    auto ident = reader.token();
    auto user = reader.token();
    if (!host || !ident || !user) return std::nullopt;

    auto when = reader.bracketed();
    if (!when) return std::nullopt;
    auto timestamp = parse_clf_time(*when);
    if (!timestamp) return std::nullopt;

    auto request = reader.quoted();
    if (!request) return std::nullopt;
    LineReader request_reader(*request);
    auto method = request_reader.token();
    auto url = request_reader.token();
    if (!method || !url) return std::nullopt;

    auto status_text = reader.token();
    auto bytes_text = reader.token();
    if (!status_text || !bytes_text) return std::nullopt;

    RawRequest out;
    out.timestamp = *timestamp;
    if (!parse_number(*status_text, out.status) || out.status < 100 || out.status > 999)
        return std::nullopt;
    if (*bytes_text != "-" && !parse_number(*bytes_text, out.bytes)) return std::nullopt;
    out.resource = normalize_resource(*url);
    out.user_key = std::string(*host);

    if (format == LogFormat::Combined) {
        auto referrer = reader.quoted();
        auto agent = reader.quoted();
        if (!referrer || !agent) return std::nullopt;
        out.user_key += '|';
        out.user_key += *agent;
    }
    return out;
}

ParseResult parse_log(std::istream& in, LogFormat format) {
    ParseResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++result.lines;
        if (auto req = parse_log_line(line, format))
            result.requests.push_back(std::move(*req));
        else
            ++result.malformed;
    }
    if (in.bad()) throw Error("io", "read error while parsing log stream");
    return result;
}

ParseResult parse_log_file(const std::filesystem::path& path, LogFormat format) {
    // gzread passes uncompressed files through unchanged.
    gzFile file = gzopen(path.c_str(), "rb");
    if (file == nullptr) throw Error("io", "cannot open log file: " + path.string());
    std::string contents;
    std::array<char, 1 << 16> buffer{};
    int read = 0;
    while ((read = gzread(file, buffer.data(), static_cast<unsigned>(buffer.size()))) > 0)
        contents.append(buffer.data(), static_cast<std::size_t>(read));
    int errnum = Z_OK;
    const char* message = gzerror(file, &errnum);
    const bool failed = read < 0 || (errnum != Z_OK && errnum != Z_STREAM_END);
    const std::string detail = failed ? message : "";
    gzclose(file);
    if (failed) throw Error("io", "cannot read log file " + path.string() + ": " + detail);

    std::istringstream in(std::move(contents));
    return parse_log(in, format);
}

std::vector<Navigation> sessionize(std::span<const RawRequest> requests, std::int64_t timeout) {
    if (timeout <= 0) throw Error("invalid_argument", "session timeout must be positive");

    // Input order within a user is kept for equal timestamps.
    std::map<std::string_view, std::vector<std::size_t>> by_user;
    for (std::size_t i = 0; i < requests.size(); ++i) by_user[requests[i].user_key].push_back(i);

    std::vector<Navigation> navs;
    for (auto& [user, indices] : by_user) {
        std::stable_sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
            return requests[a].timestamp < requests[b].timestamp;
        });
        Navigation current;
        current.user_key = std::string(user);
        for (std::size_t idx : indices) {
            const auto& req = requests[idx];
            if (!current.requests.empty() && req.timestamp - current.end() > timeout) {
                navs.push_back(std::move(current));
                current = Navigation{};
                current.user_key = std::string(user);
            }
            current.requests.push_back(req);
        }
        if (!current.requests.empty()) navs.push_back(std::move(current));
    }

    std::stable_sort(navs.begin(), navs.end(), [](const Navigation& a, const Navigation& b) {
        if (a.start() != b.start()) return a.start() < b.start();
        return a.user_key < b.user_key;
    });
    for (std::size_t i = 0; i < navs.size(); ++i) navs[i].id = i + 1;
    return navs;
}

bool passes_filter(const Navigation& nav, const NavigationFilter& filter) {
    const auto count = nav.size();
    const auto duration = nav.duration();
    return count >= filter.min_requests && duration >= filter.min_duration &&
           static_cast<double>(duration) >= filter.min_ratio * static_cast<double>(count);
}

std::vector<Navigation> filter_navigations(std::vector<Navigation> navs,
                                           const NavigationFilter& filter) {
    std::erase_if(navs, [&](const Navigation& nav) { return !passes_filter(nav, filter); });
    return navs;
}

namespace {

double quantile_of(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double total_size(const Navigation& nav) {
    double total = 0.0;
    for (const auto& req : nav.requests) total += static_cast<double>(req.bytes);
    return total;
}

}  // namespace

std::vector<Navigation> drop_outliers(std::vector<Navigation> navs, double quantile) {
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw Error("invalid_argument", "outlier quantile must lie in (0, 1]");
    if (navs.empty()) return navs;
    std::vector<double> durations, sizes;
    for (const auto& nav : navs) {
        durations.push_back(static_cast<double>(nav.duration()));
        sizes.push_back(total_size(nav));
    }
    const double duration_cut = quantile_of(durations, quantile);
    const double size_cut = quantile_of(sizes, quantile);
    std::erase_if(navs, [&](const Navigation& nav) {
        return static_cast<double>(nav.duration()) > duration_cut || total_size(nav) > size_cut;
    });
    return navs;
}

void write_navigations(const std::vector<Navigation>& navs,
                       const std::filesystem::path& index_path,
                       const std::filesystem::path& requests_path) {
    auto index = io::open_output(index_path);
    auto sidecar = io::open_output(requests_path);
    index << "id\tuser_key\tstart\tend\trequest_count\n";
    sidecar << "nav_id\ttimestamp\tstatus\tbytes\tresource\n";
    for (const auto& nav : navs) {
        index << nav.id << '\t' << io::sanitize_field(nav.user_key) << '\t' << nav.start() << '\t'
              << nav.end() << '\t' << nav.size() << '\n';
        for (const auto& req : nav.requests)
            sidecar << nav.id << '\t' << req.timestamp << '\t' << req.status << '\t' << req.bytes
                    << '\t' << io::sanitize_field(req.resource) << '\n';
    }
    if (!index || !sidecar) throw Error("io", "failed writing navigation files");
}

std::vector<Navigation> read_navigations(const std::filesystem::path& index_path,
                                         const std::filesystem::path& requests_path) {
    auto index = io::open_input(index_path);
    auto sidecar = io::open_input(requests_path);
    std::vector<Navigation> navs;
    std::unordered_map<std::uint64_t, std::size_t> position;
    std::vector<std::size_t> expected;

    std::string line;
    std::getline(index, line);  // header
    while (std::getline(index, line)) {
        if (line.empty()) continue;
        auto fields = io::split(line, '\t');
        if (fields.size() != 5) throw Error("parse", "bad navigation index line: " + line);
        Navigation nav;
        nav.id = io::parse_uint(fields[0]);
        nav.user_key = std::string(fields[1]);
        position[nav.id] = navs.size();
        expected.push_back(io::parse_uint(fields[4]));
        navs.push_back(std::move(nav));
    }

    std::getline(sidecar, line);  // header
    while (std::getline(sidecar, line)) {
        if (line.empty()) continue;
        auto fields = io::split(line, '\t');
        if (fields.size() != 5) throw Error("parse", "bad request sidecar line: " + line);
        auto it = position.find(io::parse_uint(fields[0]));
        if (it == position.end()) throw Error("parse", "request refers to unknown navigation: " + line);
        auto& nav = navs[it->second];
        RawRequest req;
        req.timestamp = io::parse_int(fields[1]);
        req.status = static_cast<int>(io::parse_int(fields[2]));
        req.bytes = io::parse_uint(fields[3]);
        req.resource = std::string(fields[4]);
        req.user_key = nav.user_key;
        nav.requests.push_back(std::move(req));
    }
    for (std::size_t i = 0; i < navs.size(); ++i)
        if (navs[i].requests.size() != expected[i] || navs[i].requests.empty())
            throw Error("parse", "request count mismatch for navigation " + std::to_string(navs[i].id));
    return navs;
}

}  // namespace wudrift
