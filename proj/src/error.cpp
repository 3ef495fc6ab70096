#include "odqa/error.hpp"

namespace odqa {

ParseError::ParseError(const std::string& what, std::size_t byte_offset)
    : DataError(what + " (at byte " + std::to_string(byte_offset) + ")"), byte_offset_(byte_offset)
{}

}  // namespace odqa
