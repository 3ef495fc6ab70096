#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace odqa::io {

static_assert(std::endian::native == std::endian::little, "index files are little-endian");

class BinaryWriter {
  public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(std::string_view s);
    void raw(std::string_view bytes);

  private:
    std::ostream& out_;
};

/// Throws DataError("<what>: truncated or corrupt") on short reads.
class BinaryReader {
  public:
    BinaryReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();
    void expect_magic(std::string_view magic);

  private:
    void read(void* dst, std::size_t n);

    std::istream& in_;
    std::string what_;
};

}  // namespace odqa::io
