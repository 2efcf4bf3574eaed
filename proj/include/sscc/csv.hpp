#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sscc::csv {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and newlines.
/// A trailing CR before LF is dropped. Blank lines are skipped.
std::vector<Record> parse(std::string_view text);

/// Quotes a field when it contains a comma, quote, CR or LF (or when forced).
std::string escape(std::string_view field, bool force_quote = false);

/// Joins escaped fields with commas and appends "\n".
std::string join(const std::vector<std::string>& fields, const std::vector<bool>& force_quote = {});

}  // namespace sscc::csv
