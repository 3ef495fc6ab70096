#include "odqa/utf8.hpp"

#include <unicode/utf8.h>

#include <stdexcept>

namespace odqa::utf8 {

bool is_valid(std::string_view text) noexcept
{
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto n = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < n) {
        UChar32 c;
        U8_NEXT(s, i, n, c);
        if (c < 0) {
            return false;
        }
    }
    return true;
}

std::vector<std::size_t> boundaries(std::string_view text)
{
    std::vector<std::size_t> out;
    out.reserve(text.size() + 1);
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto n = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < n) {
        out.push_back(static_cast<std::size_t>(i));
        UChar32 c;
        U8_NEXT(s, i, n, c);
    }
    out.push_back(text.size());
    return out;
}

std::size_t length(std::string_view text)
{
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto n = static_cast<int32_t>(text.size());
    int32_t i = 0;
    std::size_t count = 0;
    while (i < n) {
        UChar32 c;
        U8_NEXT(s, i, n, c);
        ++count;
    }
    return count;
}

std::string substr(std::string_view text, std::size_t begin, std::size_t end)
{
    if (begin > end) {
        throw std::out_of_range("utf8::substr: begin > end");
    }
    const auto bounds = boundaries(text);
    if (end >= bounds.size()) {
        throw std::out_of_range("utf8::substr: end past text length");
    }
    return std::string(text.substr(bounds[begin], bounds[end] - bounds[begin]));
}

}  // namespace odqa::utf8
