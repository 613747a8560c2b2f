#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "zloss/error.hpp"

namespace zloss::csv {

inline constexpr int significant_digits = 9;

/// Fixed-precision, locale-independent rendering used for every CSV cell.
inline std::string format_number(double v, int digits = significant_digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

/// Shortest text that parses back to exactly `v`.
inline std::string format_roundtrip(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// RFC 4180 output: CRLF record terminators, fields quoted only when needed.
class Writer {
public:
    explicit Writer(const std::vector<std::string>& header) : width_(header.size()) { row(header); }

    void row(const std::vector<std::string>& fields) {
        if (fields.size() != width_) fail(errc::invalid_input, "csv: row width does not match header");
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) text_ += ',';
            text_ += quote(fields[i]);
        }
        text_ += "\r\n";
        ++rows_;
    }

    const std::string& str() const noexcept { return text_; }
    std::size_t data_rows() const noexcept { return rows_ - 1; }

private:
    std::size_t width_;
    std::size_t rows_ = 0;
    std::string text_;
};

struct Record {
    std::size_t line = 0; // 1-based line where the record starts
    std::vector<std::string> fields;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Record> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }
};

/// Parses RFC 4180 text (CRLF or LF line ends). Blank lines are skipped.
/// Unterminated quotes raise invalid_input naming the line.
inline Table parse(std::string_view text) {
    std::vector<Record> records;
    Record cur;
    std::string field;
    std::size_t line = 1;
    bool in_quotes = false, field_quoted = false, any = false;
    cur.line = 1;

    auto end_field = [&] {
        cur.fields.push_back(std::move(field));
        field.clear();
        field_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = cur.fields.size() == 1 && cur.fields[0].empty() && !any;
        if (!blank) records.push_back(std::move(cur));
        cur = Record{};
        any = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty() && !field_quoted) {
            in_quotes = field_quoted = any = true;
        } else if (c == ',') {
            any = true;
            end_field();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            continue;
        } else if (c == '\n') {
            end_record();
            cur.line = ++line;
        } else {
            any = true;
            field += c;
        }
    }
    if (in_quotes) fail(errc::invalid_input, "csv: unterminated quote starting on line " + std::to_string(cur.line));
    if (any || !field.empty() || !cur.fields.empty()) end_record();

    Table t;
    if (records.empty()) fail(errc::invalid_input, "csv: missing header row");
    t.header = std::move(records.front().fields);
    t.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
    return t;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::invalid_input, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for " + path);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<int> parse_label(std::string_view s) {
    s = trim(s);
    if (s == "0") return 0;
    if (s == "1") return 1;
    return std::nullopt;
}

} // namespace zloss::csv
