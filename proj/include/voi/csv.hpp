#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "voi/error.hpp"

namespace voi::csv {

/// Shortest decimal text that round-trips to the same double.
inline std::string format(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw Error("cannot format floating-point value");
    }
    return {buf, end};
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first < last && (*first == ' ' || *first == '\t')) {
        ++first;
    }
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) {
        --last;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ContractError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
        out.back().pop_back();
    }
    return out;
}

/// Row-oriented CSV builder. Every row ends with '\n'; the header is mandatory.
class Writer {
public:
    explicit Writer(std::vector<std::string> header) : columns_(header.size()) {
        row_strings(header);
    }

    Writer& row_strings(const std::vector<std::string>& cells) {
        require(cells.size() == columns_, "csv row has wrong number of cells");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i != 0) {
                out_ << ',';
            }
            out_ << cells[i];
        }
        out_ << '\n';
        return *this;
    }

    template <class... Cells>
    Writer& row(const Cells&... cells) {
        std::vector<std::string> text;
        text.reserve(sizeof...(cells));
        (text.push_back(cell(cells)), ...);
        return row_strings(text);
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

    void save(const std::string& path) const {
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw Error("cannot open '" + path + "' for writing");
        }
        file << out_.str();
        if (!file) {
            throw Error("failed writing '" + path + "'");
        }
    }

private:
    static std::string cell(double v) { return format(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <class I>
        requires std::is_integral_v<I>
    static std::string cell(I v) { return std::to_string(v); }

    std::size_t columns_;
    std::ostringstream out_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline Table read(const std::string& path) {
    std::ifstream file(path);
    if (!file) {
        throw Error("cannot open '" + path + "'");
    }
    Table table;
    std::string line;
    bool first = true;
    while (std::getline(file, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        if (first) {
            table.header = split(line);
            first = false;
        } else {
            table.rows.push_back(split(line));
        }
    }
    if (first) {
        throw ContractError("'" + path + "' has no header row");
    }
    return table;
}

}  // namespace voi::csv
