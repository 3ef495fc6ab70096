#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Offsets exposed by this library (answer_start, start_char, end_char) count
// Unicode code points, the same unit SQuAD-format files use.
namespace odqa::utf8 {

[[nodiscard]] bool is_valid(std::string_view text) noexcept;

[[nodiscard]] std::size_t length(std::string_view text);

/// Byte offset of every code point boundary: result[i] is where code point i
/// starts, result.back() == text.size(). Size is length(text) + 1.
[[nodiscard]] std::vector<std::size_t> boundaries(std::string_view text);

/// Substring by code point range [begin, end). Throws std::out_of_range.
[[nodiscard]] std::string substr(std::string_view text, std::size_t begin, std::size_t end);

}  // namespace odqa::utf8
