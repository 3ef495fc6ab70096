#pragma once

// In-process HTTP server standing in for a remote reader.

#include <httplib.h>

#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace odqa::testing {

class StubServer {
  public:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    explicit StubServer(Handler read_handler)
    {
        server_.Post("/read", [this, read_handler](const httplib::Request& req, httplib::Response& res) {
            {
                std::lock_guard lock(mutex_);
                bodies_.push_back(req.body);
            }
            read_handler(req, res);
        });
        server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"status":"ok","model":"stub"})", "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer()
    {
        server_.stop();
        thread_.join();
    }

    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    [[nodiscard]] std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

    [[nodiscard]] std::vector<std::string> bodies() const
    {
        std::lock_guard lock(mutex_);
        return bodies_;
    }

  private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    mutable std::mutex mutex_;
    std::vector<std::string> bodies_;
};

}  // namespace odqa::testing
