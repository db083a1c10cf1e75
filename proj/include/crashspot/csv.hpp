#pragma once

#include <istream>
#include <string>
#include <vector>

namespace crashspot {

// Minimal delimited-text reader: one record per line, fields optionally
// enclosed in double quotes with "" as the embedded-quote escape. Embedded
// newlines inside quoted fields are not supported.
class CsvReader {
 public:
  CsvReader(std::istream& in, char delimiter = ',');

  // Reads the next record; returns false at end of input. Blank lines are
  // skipped. line_number() reports the 1-based physical line just read.
  bool next(std::vector<std::string>& fields);
  std::size_t line_number() const { return line_number_; }

 private:
  std::istream& in_;
  char delimiter_;
  std::size_t line_number_ = 0;
};

std::vector<std::string> split_csv_line(const std::string& line, char delimiter);

// Quotes a field if it contains the delimiter, a quote, or leading/trailing
// whitespace.
std::string csv_escape(const std::string& field, char delimiter);

std::string join_csv(const std::vector<std::string>& fields, char delimiter);

}  // namespace crashspot
