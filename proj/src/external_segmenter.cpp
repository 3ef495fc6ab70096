#include "odqa/external_segmenter.hpp"

#include "odqa/error.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace odqa {

ExternalSegmenter::ExternalSegmenter(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout)
{}

ExternalSegmenter::~ExternalSegmenter()
{
    stop();
}

void ExternalSegmenter::start()
{
    // A dead child must surface as EPIPE, not kill the process.
    std::signal(SIGPIPE, SIG_IGN);

    int in_pipe[2];
    int out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0) {
        throw SegmenterError("segmenter '" + command_ + "': pipe failed: " + std::strerror(errno));
    }
    if (pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw SegmenterError("segmenter '" + command_ + "': pipe failed: " + std::strerror(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    std::string shell = "/bin/sh";
    std::string flag = "-c";
    char* argv[] = {shell.data(), flag.data(), command_.data(), nullptr};
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);
    pid_t pid = -1;
    const int rc = posix_spawn(&pid, "/bin/sh", &actions, &attr, argv, environ);
    posix_spawnattr_destroy(&attr);
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        throw SegmenterError("segmenter '" + command_ + "': spawn failed: " + std::strerror(rc));
    }
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    pending_.clear();
}

void ExternalSegmenter::stop() noexcept
{
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        ::close(from_child_);
        from_child_ = -1;
    }
    if (pid_ > 0) {
        int status = 0;
        if (waitpid(pid_, &status, WNOHANG) == 0) {
            ::kill(-pid_, SIGKILL);
            waitpid(pid_, &status, 0);
        }
        pid_ = -1;
    }
    pending_.clear();
}

void ExternalSegmenter::fail(const std::string& reason)
{
    std::string message = "segmenter '" + command_ + "' " + reason;
    if (pid_ > 0) {
        int status = 0;
        // Give an exiting child a moment so its status can be reported.
        for (int attempt = 0; attempt < 50; ++attempt) {
            const pid_t done = waitpid(pid_, &status, WNOHANG);
            if (done == pid_) {
                if (WIFEXITED(status)) {
                    message += " (exit status " + std::to_string(WEXITSTATUS(status)) + ")";
                } else if (WIFSIGNALED(status)) {
                    message += " (killed by signal " + std::to_string(WTERMSIG(status)) + ")";
                }
                ::kill(-pid_, SIGKILL);
                pid_ = -1;
                break;
            }
            if (done < 0) {
                pid_ = -1;
                break;
            }
            ::usleep(2000);
        }
    }
    stop();
    throw SegmenterError(message);
}

std::string ExternalSegmenter::segment_line(std::string_view line)
{
    std::lock_guard lock(mutex_);
    if (pid_ < 0) {
        start();
    }

    std::string payload(line);
    payload.push_back('\n');
    std::size_t written = 0;
    while (written < payload.size()) {
        const ssize_t n = ::write(to_child_, payload.data() + written, payload.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail(errno == EPIPE ? std::string("exited before reading input")
                                : std::string("stopped accepting input: ") + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }

    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
        const auto newline = pending_.find('\n');
        if (newline != std::string::npos) {
            std::string result = pending_.substr(0, newline);
            pending_.erase(0, newline + 1);
            if (!result.empty() && result.back() == '\r') {
                result.pop_back();
            }
            return result;
        }
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            fail("timed out after " + std::to_string(timeout_.count()) + " ms");
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (ready < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail(std::string("poll failed: ") + std::strerror(errno));
        }
        if (ready == 0) {
            continue;
        }
        char buffer[4096];
        const ssize_t n = ::read(from_child_, buffer, sizeof buffer);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            fail(std::string("read failed: ") + std::strerror(errno));
        }
        if (n == 0) {
            fail("exited before answering");
        }
        pending_.append(buffer, static_cast<std::size_t>(n));
    }
}

}  // namespace odqa
