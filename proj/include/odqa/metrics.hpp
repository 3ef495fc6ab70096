#pragma once

#include <span>
#include <string>
#include <string_view>

namespace odqa {

/// 1 iff normalize_answer(pred) equals normalize_answer of some gold.
/// Throws UsageError on an empty gold list.
[[nodiscard]] int exact_match(std::string_view pred, std::span<const std::string> golds);

/// Token-multiset F1 of tokenize(pred) against tokenize(gold), maximized
/// over golds. Both empty gives 1, exactly one empty gives 0.
[[nodiscard]] double token_f1(std::string_view pred, std::span<const std::string> golds);
[[nodiscard]] double token_f1(std::string_view pred, std::string_view gold);

}  // namespace odqa
