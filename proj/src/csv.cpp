#include "concentra/csv.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>

namespace concentra::csv {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string trim(std::string_view field) {
  std::size_t b = 0;
  std::size_t e = field.size();
  while (b < e && (field[b] == ' ' || field[b] == '\t')) ++b;
  while (e > b && (field[e - 1] == ' ' || field[e - 1] == '\t')) --e;
  return std::string(field.substr(b, e - b));
}

bool parse_double(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc() && result.ptr == last;
}

bool parse_int64(std::string_view field, std::int64_t& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc() && result.ptr == last;
}

bool parse_int(std::string_view field, int& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc() && result.ptr == last;
}

bool parse_bool(std::string_view field, bool& out) {
  if (field == "true" || field == "1") {
    out = true;
    return true;
  }
  if (field == "false" || field == "0") {
    out = false;
    return true;
  }
  return false;
}

std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

Reader::Reader(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  content_.resize(static_cast<std::size_t>(size));
  if (size > 0) in.read(content_.data(), size);
  if (!in) throw DataError("cannot read file: " + path);
}

bool Reader::next_line(std::string_view& line) {
  if (pos_ >= content_.size()) return false;
  const std::size_t nl = content_.find('\n', pos_);
  std::size_t end = nl == std::string::npos ? content_.size() : nl;
  std::size_t begin = pos_;
  pos_ = nl == std::string::npos ? content_.size() : nl + 1;
  if (end > begin && content_[end - 1] == '\r') --end;
  line = std::string_view(content_).substr(begin, end - begin);
  ++line_number_;
  return true;
}

Writer::Writer(const std::string& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd_ < 0) throw DataError("cannot open file for writing: " + path);
  buffer_.reserve(1 << 20);
}

Writer::~Writer() {
  if (fd_ >= 0) {
    flush();
    ::close(fd_);
  }
}

void Writer::write(std::string_view text) {
  buffer_.append(text);
  if (buffer_.size() >= (1 << 20)) flush();
}

void Writer::write_line(std::string_view text) {
  write(text);
  buffer_.push_back('\n');
}

void Writer::flush() {
  std::size_t done = 0;
  while (done < buffer_.size()) {
    const ssize_t n = ::write(fd_, buffer_.data() + done, buffer_.size() - done);
    if (n < 0) throw DataError("write failed: " + path_ + ": " + std::strerror(errno));
    done += static_cast<std::size_t>(n);
  }
  buffer_.clear();
}

void Writer::close() {
  if (fd_ >= 0) {
    flush();
    ::close(fd_);
    fd_ = -1;
  }
}

}  // namespace concentra::csv
