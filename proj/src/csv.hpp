#pragma once

// Small CSV helpers shared by the file loaders. Not part of the public API.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "tipcue/error.hpp"

namespace tipcue::csv {

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct Row {
    std::size_t line{};
    std::vector<std::string_view> fields;
};

/// Reads a file, checks the header against `expected` and hands back the
/// raw text plus the data rows (string_views into the text).
class Reader {
public:
    Reader(const std::filesystem::path& path, std::string_view expected_header) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open file: " + path.string());
        text_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        std::string_view rest(text_);
        std::size_t line_no = 0;
        bool header_seen = false;
        while (!rest.empty()) {
            const std::size_t nl = rest.find('\n');
            std::string_view line = trim(rest.substr(0, nl));
            rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
            ++line_no;
            if (line.empty() || line.front() == '#') continue;
            if (!header_seen) {
                if (line != expected_header) {
                    throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                      ": expected header '" + std::string(expected_header) + "'");
                }
                header_seen = true;
                continue;
            }
            Row row{line_no, split(line)};
            for (auto& f : row.fields) f = trim(f);
            rows_.push_back(std::move(row));
        }
        columns_ = split(expected_header).size();
    }

    const std::vector<Row>& rows() const { return rows_; }

    [[noreturn]] void fail(const Row& row, const std::string& what) const {
        throw ConfigError(path_.string() + ":" + std::to_string(row.line) + ": " + what);
    }

    void expect_columns(const Row& row) const {
        if (row.fields.size() != columns_) {
            fail(row, "expected " + std::to_string(columns_) + " fields, got " +
                          std::to_string(row.fields.size()));
        }
    }

    double number(const Row& row, std::size_t col) const {
        const std::string_view f = row.fields.at(col);
        double v{};
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty()) {
            fail(row, "field " + std::to_string(col + 1) + " is not a number: '" + std::string(f) + "'");
        }
        return v;
    }

private:
    std::filesystem::path path_;
    std::string text_;
    std::vector<Row> rows_;
    std::size_t columns_{};
};

}  // namespace tipcue::csv
