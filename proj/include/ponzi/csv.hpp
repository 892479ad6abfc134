#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ponzi::csv {

/// A parsed CSV file with a mandatory header row.
class Table {
public:
    /// Parses RFC 4180 text (quoted fields, CRLF tolerated). `source` names the input in errors.
    static Table parse(std::string_view text, std::string source);
    static Table read_file(const std::string& path);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }
    /// 1-based line number of row i in the source, for error messages.
    std::size_t line_of(std::size_t i) const { return lines_[i]; }
    const std::string& source() const { return source_; }

    /// Column index by name; throws InputError when absent.
    std::size_t column(std::string_view name) const;
    std::optional<std::size_t> find_column(std::string_view name) const;
    /// Throws InputError unless every name is present.
    void require_columns(std::initializer_list<std::string_view> names) const;

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::size_t> lines_;
};

std::string escape(std::string_view field);

/// Appends one CSV row (LF terminated) to `out`.
void append_row(std::string& out, const std::vector<std::string>& fields);

}  // namespace ponzi::csv
