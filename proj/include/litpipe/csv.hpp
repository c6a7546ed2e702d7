#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace litpipe::csv {

using Row = std::vector<std::string>;

/// RFC-4180 field: quoted when it holds a comma, quote, CR or LF.
std::string escape_field(std::string_view field);

/// Records joined with CRLF, including after the last record.
std::string write(const std::vector<Row>& rows);

/// Throws Error("malformed-csv") on an unterminated quote or stray quote.
std::vector<Row> parse(std::string_view data);

}  // namespace litpipe::csv
