#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace odqa {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
    success = 0,
    usage = 1,
    data = 2,
    network = 3,
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode exit_code() const noexcept { return ExitCode::data; }
};

/// Bad arguments or configuration.
class UsageError : public Error {
  public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::usage; }
};

/// Missing, malformed, or inconsistent on-disk data.
class DataError : public Error {
  public:
    using Error::Error;
};

class ParseError : public DataError {
  public:
    ParseError(const std::string& what, std::size_t byte_offset);
    [[nodiscard]] std::size_t byte_offset() const noexcept { return byte_offset_; }

  private:
    std::size_t byte_offset_;
};

class SegmenterError : public Error {
  public:
    using Error::Error;
};

class NetworkError : public Error {
  public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::network; }
};

/// A remote reader answered with something that violates the wire contract.
class ProtocolError : public NetworkError {
  public:
    using NetworkError::NetworkError;
};

}  // namespace odqa
