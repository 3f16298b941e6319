#pragma once

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rocp/errors.hpp"
#include "rocp/regression.hpp"
#include "rocp/series.hpp"

namespace rocp {

namespace detail {

// All floating-point output uses 17 significant digits so values
// round-trip exactly.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::optional<double> parse_double(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
    return v;
}

// days since 1970-01-01 for a proleptic Gregorian civil date
inline long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned long long>(y - era * 400);
    const unsigned long long doy = (153ULL * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned long long doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

// Timestamps may be plain numbers or ISO-8601 dates
// (YYYY-MM-DD or YYYY-MM-DDTHH:MM:SS, optional trailing Z); ISO input is
// converted to epoch seconds.
inline std::optional<double> parse_timestamp(const std::string& raw) {
    const std::string s = trim(raw);
    if (auto num = parse_double(s)) return num;
    int y = 0, mo = 0, d = 0, hh = 0, mi = 0, ss = 0;
    char sep = 0;
    const int n_date = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &hh, &mi, &ss);
    if (n_date < 3 || mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
    if (n_date > 3 && sep != 'T' && sep != ' ') return std::nullopt;
    const long long days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    return static_cast<double>(days) * 86400.0 + hh * 3600.0 + mi * 60.0 + ss;
}

}  // namespace detail

// Reads one or more series from a CSV file. Header row required; columns:
// `value` (required), `timestamp`, `id`, `freq` (optional). A long-format
// file with an `id` column yields one series per id, in order of first
// appearance.
inline std::vector<TimeSeries> read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Err::IoError, "cannot open input file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw Error(Err::EmptySeries, "empty CSV file: " + path);
    const auto header = detail::split_csv_line(line);
    int col_value = -1, col_ts = -1, col_id = -1, col_freq = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = detail::trim(header[i]);
        if (name == "value") col_value = static_cast<int>(i);
        else if (name == "timestamp") col_ts = static_cast<int>(i);
        else if (name == "id") col_id = static_cast<int>(i);
        else if (name == "freq") col_freq = static_cast<int>(i);
    }
    if (col_value < 0) throw Error(Err::BadConfig, "CSV header must contain a `value` column: " + path);

    struct Bucket {
        std::vector<double> values;
        std::vector<double> timestamps;
        std::optional<std::string> freq;
    };
    std::vector<std::string> order;
    std::map<std::string, Bucket> buckets;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        auto field = [&](int idx) -> std::string {
            return (idx >= 0 && static_cast<std::size_t>(idx) < fields.size())
                       ? detail::trim(fields[static_cast<std::size_t>(idx)])
                       : std::string{};
        };
        const std::string key = field(col_id);
        if (buckets.find(key) == buckets.end()) order.push_back(key);
        Bucket& b = buckets[key];

        const auto value = detail::parse_double(field(col_value));
        if (!value)
            throw Error(Err::NonFiniteValue, "unparsable value on line " + std::to_string(line_no),
                        line_no);
        b.values.push_back(*value);

        if (col_ts >= 0) {
            const std::string raw_ts = field(col_ts);
            if (!raw_ts.empty()) {
                const auto ts = detail::parse_timestamp(raw_ts);
                if (!ts)
                    throw Error(Err::BadConfig,
                                "unparsable timestamp on line " + std::to_string(line_no), line_no);
                b.timestamps.push_back(*ts);
            }
        }
        if (col_freq >= 0 && !b.freq) {
            const std::string f = field(col_freq);
            if (!f.empty()) b.freq = f;
        }
    }

    std::vector<TimeSeries> out;
    for (const auto& key : order) {
        Bucket& b = buckets[key];
        std::optional<std::vector<double>> ts;
        if (!b.timestamps.empty()) {
            if (b.timestamps.size() != b.values.size())
                throw Error(Err::NonMonotoneTimestamps,
                            "timestamps present for only part of series " + key);
            ts = std::move(b.timestamps);
        }
        out.push_back(validate_series(std::move(b.values),
                                      key.empty() ? std::nullopt : std::make_optional(key),
                                      b.freq, std::move(ts)));
    }
    if (out.empty()) throw Error(Err::EmptySeries, "no data rows in " + path);
    return out;
}

// Interchange format between the rolling engine and calibration/selection:
// origin,horizon,score,sigma with sigma left empty when absent.
inline std::string scores_to_csv(const std::vector<ScoreRecord>& scores) {
    std::string out = "origin,horizon,score,sigma\n";
    for (const auto& r : scores) {
        out += std::to_string(r.origin);
        out += ',';
        out += std::to_string(r.horizon);
        out += ',';
        out += detail::fmt_double(r.score);
        out += ',';
        if (r.sigma) out += detail::fmt_double(*r.sigma);
        out += '\n';
    }
    return out;
}

inline std::vector<ScoreRecord> read_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Err::IoError, "cannot open input file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error(Err::EmptyInput, "empty score file: " + path);
    const auto header = detail::split_csv_line(line);
    int col_origin = -1, col_h = -1, col_score = -1, col_sigma = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = detail::trim(header[i]);
        if (name == "origin") col_origin = static_cast<int>(i);
        else if (name == "horizon") col_h = static_cast<int>(i);
        else if (name == "score") col_score = static_cast<int>(i);
        else if (name == "sigma") col_sigma = static_cast<int>(i);
    }
    if (col_origin < 0 || col_score < 0)
        throw Error(Err::BadConfig, "score CSV needs `origin` and `score` columns: " + path);

    std::vector<ScoreRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        auto field = [&](int idx) -> std::string {
            return (idx >= 0 && static_cast<std::size_t>(idx) < fields.size())
                       ? detail::trim(fields[static_cast<std::size_t>(idx)])
                       : std::string{};
        };
        ScoreRecord rec;
        const auto origin = detail::parse_double(field(col_origin));
        const auto score = detail::parse_double(field(col_score));
        if (!origin || !score || *score < 0.0)
            throw Error(Err::BadConfig, "bad score row on line " + std::to_string(line_no), line_no);
        rec.origin = static_cast<std::size_t>(*origin);
        rec.score = *score;
        if (col_h >= 0)
            if (const auto h = detail::parse_double(field(col_h))) rec.horizon = static_cast<int>(*h);
        if (col_sigma >= 0) rec.sigma = detail::parse_double(field(col_sigma));
        out.push_back(rec);
    }
    return out;
}

inline std::string scaling_rows_to_csv(const std::vector<ScalingRow>& rows) {
    std::string out = "series_id,freq,T,m_star,boundary,coverage,winkler\n";
    for (const auto& r : rows) {
        out += r.series_id;
        out += ',';
        out += r.freq_tag;
        out += ',';
        out += std::to_string(r.length);
        out += ',';
        out += std::to_string(r.m_star);
        out += ',';
        out += r.at_boundary ? "1" : "0";
        out += ',';
        out += detail::fmt_double(r.coverage);
        out += ',';
        out += detail::fmt_double(r.mean_winkler);
        out += '\n';
    }
    return out;
}

// Atomic write: the file appears complete or not at all.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Err::IoError, "cannot write " + tmp.string());
        out << content;
        if (!out.good()) throw Error(Err::IoError, "failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace rocp
