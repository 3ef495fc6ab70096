#include "odqa/binary_io.hpp"

#include "odqa/error.hpp"

#include <istream>
#include <ostream>

namespace odqa::io {

void BinaryWriter::u32(std::uint32_t v)
{
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void BinaryWriter::u64(std::uint64_t v)
{
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void BinaryWriter::f64(double v)
{
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void BinaryWriter::str(std::string_view s)
{
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryWriter::raw(std::string_view bytes)
{
    out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void BinaryReader::read(void* dst, std::size_t n)
{
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
        throw DataError(what_ + ": truncated or corrupt");
    }
}

std::uint32_t BinaryReader::u32()
{
    std::uint32_t v;
    read(&v, sizeof v);
    return v;
}

std::uint64_t BinaryReader::u64()
{
    std::uint64_t v;
    read(&v, sizeof v);
    return v;
}

double BinaryReader::f64()
{
    double v;
    read(&v, sizeof v);
    return v;
}

std::string BinaryReader::str()
{
    const auto n = u64();
    if (n > (std::uint64_t{1} << 32)) {
        throw DataError(what_ + ": truncated or corrupt");
    }
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
}

void BinaryReader::expect_magic(std::string_view magic)
{
    std::string got(magic.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(magic.size()));
    if (got != magic) {
        throw DataError(what_ + ": not an index file of the expected kind");
    }
}

}  // namespace odqa::io
