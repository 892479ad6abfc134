#include "ponzi/csv.hpp"

#include "ponzi/errors.hpp"

#include <fstream>
#include <sstream>

namespace ponzi::csv {

Table Table::parse(std::string_view text, std::string source) {
    Table t;
    t.source_ = std::move(source);
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false, field_started = false;
    std::size_t line = 1, record_line = 1;
    bool header_done = false;

    auto finish_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        const bool blank = record.size() == 1 && record[0].empty();
        if (!blank) {
            if (!header_done) {
                t.header_ = std::move(record);
                header_done = true;
            } else {
                if (record.size() != t.header_.size())
                    throw InputError(t.source_ + ":" + std::to_string(record_line) + ": expected " +
                                     std::to_string(t.header_.size()) + " fields, found " +
                                     std::to_string(record.size()));
                t.rows_.push_back(std::move(record));
                t.lines_.push_back(record_line);
            }
        }
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty())
                    throw InputError(t.source_ + ":" + std::to_string(line) + ": stray quote");
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                field_started = false;
                break;
            case '\r':
                break;
            case '\n':
                finish_record();
                ++line;
                record_line = line;
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes) throw InputError(t.source_ + ": unterminated quoted field");
    if (!field.empty() || !record.empty()) finish_record();
    if (!header_done) throw InputError(t.source_ + ": missing header row");
    return t;
}

Table Table::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::optional<std::size_t> Table::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return i;
    return std::nullopt;
}

std::size_t Table::column(std::string_view name) const {
    if (auto c = find_column(name)) return *c;
    throw InputError(source_ + ": missing column '" + std::string(name) + "'");
}

void Table::require_columns(std::initializer_list<std::string_view> names) const {
    for (auto n : names) (void)column(n);
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    out.push_back('\n');
}

}  // namespace ponzi::csv
