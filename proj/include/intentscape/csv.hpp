#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace intentscape::csv {

// Streaming RFC 4180 reader: comma separated, double-quoted fields with ""
// escapes, CRLF or LF record terminators, newlines allowed inside quotes.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Throws RecordError on an
  // unterminated quoted field.
  std::optional<std::vector<std::string>> next();

  // 1-based index of the record last returned (header is record 1).
  std::size_t record_number() const { return record_; }

 private:
  std::istream& in_;
  std::size_t record_ = 0;
};

// Column index lookup over a header record.
class Header {
 public:
  explicit Header(std::vector<std::string> names);
  std::optional<std::size_t> find(std::string_view name) const;
  // First present name among `aliases`.
  std::optional<std::size_t> find_any(std::initializer_list<std::string_view> aliases) const;

 private:
  std::vector<std::string> names_;
};

}  // namespace intentscape::csv
