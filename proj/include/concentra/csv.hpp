#pragma once

#include "concentra/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace concentra::csv {

// Splits one line on commas. No quoting: none of the pipeline formats need it.
std::vector<std::string_view> split(std::string_view line);

bool parse_double(std::string_view field, double& out);
bool parse_int64(std::string_view field, std::int64_t& out);
bool parse_int(std::string_view field, int& out);
bool parse_bool(std::string_view field, bool& out);

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double value);

std::string trim(std::string_view field);

// Line-oriented reader over a whole file; throws DataError when unreadable.
class Reader {
 public:
  explicit Reader(const std::string& path);

  // Returns false at end of input. Skips a trailing '\r'.
  bool next_line(std::string_view& line);

  std::size_t line_number() const { return line_number_; }

 private:
  std::string content_;
  std::size_t pos_ = 0;
  std::size_t line_number_ = 0;
};

// Buffered writer; throws DataError on open failure.
class Writer {
 public:
  explicit Writer(const std::string& path);
  ~Writer();

  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void write(std::string_view text);
  void write_line(std::string_view text);
  void close();

 private:
  std::string path_;
  std::string buffer_;
  int fd_ = -1;
  void flush();
};

}  // namespace concentra::csv
