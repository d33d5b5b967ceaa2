#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace pkm::csv {

using Record = std::vector<std::string>;

/// Reads RFC-4180 style records: comma separated, double-quote quoting with
/// "" as an escaped quote, CRLF or LF line endings. Blank lines are skipped.
std::vector<Record> read_records(std::istream& in);

/// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);

std::string join(const Record& fields);

}  // namespace pkm::csv
