#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace intentscape::text {

// Byte offset of every code point in `s`, plus a final entry equal to
// s.size(). Throws Error on malformed UTF-8.
std::vector<std::size_t> codepoint_offsets(std::string_view s);

// Number of Unicode scalar values in `s`.
std::size_t codepoint_length(std::string_view s);

bool is_valid_utf8(std::string_view s);

std::string_view trim(std::string_view s);

// Replace each run of CR/LF characters by a single space.
std::string collapse_newlines(std::string_view s);

// Split on ASCII whitespace, dropping empty tokens.
std::vector<std::string_view> whitespace_tokens(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace intentscape::text
