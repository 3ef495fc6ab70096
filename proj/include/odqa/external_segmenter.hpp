#pragma once

#include <chrono>
#include <mutex>
#include <string>
#include <string_view>

#include <sys/types.h>

namespace odqa {

/// Line-oriented child process: one UTF-8 line in, one segmented line out
/// (syllables of a word joined by '_'). The process is started lazily, kept
/// alive between calls, and restarted after any failure. Calls are
/// serialized.
class ExternalSegmenter {
  public:
    ExternalSegmenter(std::string command, std::chrono::milliseconds timeout);
    ~ExternalSegmenter();

    ExternalSegmenter(const ExternalSegmenter&) = delete;
    ExternalSegmenter& operator=(const ExternalSegmenter&) = delete;

    /// Throws SegmenterError naming the command on spawn failure, early
    /// exit, or timeout.
    [[nodiscard]] std::string segment_line(std::string_view line);

    [[nodiscard]] const std::string& command() const noexcept { return command_; }

  private:
    void start();
    void stop() noexcept;
    [[noreturn]] void fail(const std::string& reason);

    std::string command_;
    std::chrono::milliseconds timeout_;
    std::mutex mutex_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string pending_;
};

}  // namespace odqa
