#pragma once

#include "odqa/reader.hpp"

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odqa {

/// Client side of the reader wire protocol:
///   POST /read   {"question": str, "passages": [{"id": str, "text": str}]}
///             -> {"candidates": [{"passage_id", "answer", "start_char",
///                                 "end_char", "score"}]}
///   GET /health -> {"status": "ok", "model": str}
/// Offsets are code points into the passage text.
struct RemoteReaderConfig {
    std::string endpoint;  // e.g. "http://127.0.0.1:8000"
    std::chrono::milliseconds timeout{30'000};
    std::size_t max_parallel = 4;
    /// Throw ProtocolError once all requests finish if any response was
    /// malformed; otherwise report it in the outcome.
    bool throw_on_protocol_error = true;
};

[[nodiscard]] std::string make_read_request(std::string_view question, std::span<const Passage> passages);

/// Parses and validates a /read response for `passages`. Scores outside
/// [0, 1] are clamped and counted in *clamped. Throws ProtocolError naming
/// the offending field.
[[nodiscard]] std::vector<SpanCandidate> parse_read_response(std::string_view body, std::span<const Passage> passages,
                                                             std::size_t* clamped = nullptr);

/// One request per passage, at most max_parallel in flight, results in
/// input order. Network failures and timeouts become network_error outcomes.
[[nodiscard]] std::vector<ReadOutcome> remote_read(std::string_view question, std::span<const Passage> passages,
                                                   const RemoteReaderConfig& config);

struct HealthStatus {
    std::string status;
    std::string model;
};

/// Throws NetworkError when the service is unreachable, ProtocolError on a
/// malformed reply.
[[nodiscard]] HealthStatus check_health(const RemoteReaderConfig& config);

class RemoteReader final : public Reader {
  public:
    explicit RemoteReader(RemoteReaderConfig config);

    [[nodiscard]] std::vector<ReadOutcome> read(std::string_view question,
                                                std::span<const Passage> passages) const override;
    [[nodiscard]] std::string_view name() const noexcept override { return "remote"; }

  private:
    RemoteReaderConfig config_;
};

}  // namespace odqa
