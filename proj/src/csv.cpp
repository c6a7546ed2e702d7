#include "litpipe/csv.hpp"

#include "litpipe/error.hpp"

namespace litpipe::csv {

std::string escape_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string write(const std::vector<Row>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += escape_field(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

std::vector<Row> parse(std::string_view data) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t i = 0;
    auto end_record = [&] {
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        field_started = false;
    };
    while (i < data.size()) {
        const char c = data[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                if (i < data.size() && data[i] != ',' && data[i] != '\r' && data[i] != '\n') {
                    throw Error("malformed-csv", "unexpected character after closing quote at byte " +
                                                     std::to_string(i));
                }
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        if (c == '"') {
            if (!field.empty()) throw Error("malformed-csv", "quote inside unquoted field at byte " + std::to_string(i));
            quoted = true;
            field_started = true;
            ++i;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            field_started = true;
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_record();
            i += (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') ? 2 : 1;
        } else {
            field += c;
            field_started = true;
            ++i;
        }
    }
    if (quoted) throw Error("malformed-csv", "unterminated quoted field");
    if (field_started || !row.empty()) end_record();
    return rows;
}

}  // namespace litpipe::csv
