#include "intentscape/csv.hpp"

#include "intentscape/error.hpp"
#include "intentscape/text.hpp"

namespace intentscape::csv {

std::optional<std::vector<std::string>> Reader::next() {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  bool quoted_field = false;

  for (;;) {
    const int ch = in_.get();
    if (ch == std::char_traits<char>::eof()) {
      if (in_quotes) throw RecordError(record_ + 1, "unterminated quoted field");
      if (!any) return std::nullopt;
      fields.push_back(std::move(field));
      break;
    }
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !quoted_field) {
      in_quotes = true;
      quoted_field = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      quoted_field = false;
    } else if (c == '\r' && in_.peek() == '\n') {
      // CRLF: the LF terminates the record on the next iteration.
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      break;
    } else {
      field.push_back(c);
    }
  }
  ++record_;
  return fields;
}

Header::Header(std::vector<std::string> names) : names_(std::move(names)) {
  // Tolerate a UTF-8 byte-order mark on the first column.
  if (!names_.empty() && names_[0].rfind("\xEF\xBB\xBF", 0) == 0) names_[0].erase(0, 3);
  for (auto& n : names_) n = std::string(text::trim(n));
}

std::optional<std::size_t> Header::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> Header::find_any(std::initializer_list<std::string_view> aliases) const {
  for (auto a : aliases)
    if (auto idx = find(a)) return idx;
  return std::nullopt;
}

}  // namespace intentscape::csv
