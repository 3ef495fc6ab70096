#include "odqa/remote_reader.hpp"

#include "odqa/error.hpp"
#include "odqa/utf8.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <regex>
#include <thread>

namespace odqa {

using nlohmann::json;

std::string make_read_request(std::string_view question, std::span<const Passage> passages)
{
    nlohmann::ordered_json body;
    body["question"] = question;
    body["passages"] = nlohmann::ordered_json::array();
    for (const auto& p : passages) {
        body["passages"].push_back({{"id", p.id}, {"text", p.text}});
    }
    return body.dump();
}

std::vector<SpanCandidate> parse_read_response(std::string_view body, std::span<const Passage> passages,
                                               std::size_t* clamped)
{
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("reader response is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("candidates") || !doc["candidates"].is_array()) {
        throw ProtocolError("reader response: field 'candidates' missing or not an array");
    }
    const auto& list = doc["candidates"];
    if (list.size() != passages.size()) {
        throw ProtocolError("reader response: field 'candidates' has " + std::to_string(list.size()) +
                            " entries, expected " + std::to_string(passages.size()));
    }

    std::vector<SpanCandidate> out;
    out.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& c = list[i];
        const auto field = [i](std::string_view name) {
            return "candidates[" + std::to_string(i) + "]." + std::string(name);
        };
        auto require = [&](std::string_view name, auto&& check, std::string_view expected) -> const json& {
            if (!c.is_object() || !c.contains(name) || !check(c[std::string(name)])) {
                throw ProtocolError("reader response: field '" + field(name) + "' missing or not " +
                                    std::string(expected));
            }
            return c[std::string(name)];
        };
        const auto is_string = [](const json& v) { return v.is_string(); };
        const auto is_int = [](const json& v) { return v.is_number_integer(); };
        const auto is_number = [](const json& v) { return v.is_number(); };

        SpanCandidate candidate;
        candidate.passage_id = require("passage_id", is_string, "a string").get<std::string>();
        if (candidate.passage_id != passages[i].id) {
            throw ProtocolError("reader response: field '" + field("passage_id") + "' is '" + candidate.passage_id +
                                "', expected '" + passages[i].id + "'");
        }
        candidate.answer_text = require("answer", is_string, "a string").get<std::string>();
        const auto start = require("start_char", is_int, "an integer").get<std::int64_t>();
        const auto end = require("end_char", is_int, "an integer").get<std::int64_t>();
        const auto score = require("score", is_number, "a number").get<double>();

        const auto length = static_cast<std::int64_t>(utf8::length(passages[i].text));
        if (start < 0) {
            throw ProtocolError("reader response: field '" + field("start_char") + "' is negative");
        }
        if (start >= end) {
            throw ProtocolError("reader response: field '" + field("start_char") + "' (" + std::to_string(start) +
                                ") is not below end_char (" + std::to_string(end) + ")");
        }
        if (end > length) {
            throw ProtocolError("reader response: field '" + field("end_char") + "' (" + std::to_string(end) +
                                ") is past the passage end (" + std::to_string(length) + ")");
        }
        candidate.start_char = static_cast<std::size_t>(start);
        candidate.end_char = static_cast<std::size_t>(end);
        if (!is_substring_consistent(candidate, passages[i].text)) {
            throw ProtocolError("reader response: field '" + field("answer") +
                                "' does not match the passage text at [" + std::to_string(start) + ", " +
                                std::to_string(end) + ")");
        }
        if (!std::isfinite(score)) {
            throw ProtocolError("reader response: field '" + field("score") + "' is not finite");
        }
        candidate.reader_score = std::clamp(score, 0.0, 1.0);
        if (candidate.reader_score != score) {
            std::clog << "remote reader: clamped score " << score << " for passage " << candidate.passage_id
                      << " to " << candidate.reader_score << '\n';
            if (clamped != nullptr) {
                ++*clamped;
            }
        }
        out.push_back(std::move(candidate));
    }
    return out;
}

namespace {

httplib::Client make_client(const RemoteReaderConfig& config)
{
    static const std::regex url(R"(https?://[A-Za-z0-9.\-]+(:[0-9]{1,5})?/?)");
    if (!std::regex_match(config.endpoint, url)) {
        throw UsageError("invalid reader endpoint '" + config.endpoint + "'; expected http://host[:port]");
    }
    httplib::Client client(config.endpoint);
    if (!client.is_valid()) {
        throw UsageError("invalid reader endpoint '" + config.endpoint + "'");
    }
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    return client;
}

ReadOutcome read_one(httplib::Client& client, std::string_view question, const Passage& passage)
{
    const std::span<const Passage> single(&passage, 1);
    const auto result = client.Post("/read", make_read_request(question, single), "application/json");
    if (!result) {
        return {ReadStatus::network_error, std::nullopt,
                "passage " + passage.id + ": " + httplib::to_string(result.error())};
    }
    if (result->status != 200) {
        return {ReadStatus::network_error, std::nullopt,
                "passage " + passage.id + ": HTTP " + std::to_string(result->status)};
    }
    try {
        auto candidates = parse_read_response(result->body, single);
        return {ReadStatus::ok, std::move(candidates.front()), {}};
    } catch (const ProtocolError& e) {
        return {ReadStatus::protocol_error, std::nullopt, "passage " + passage.id + ": " + e.what()};
    }
}

}  // namespace

std::vector<ReadOutcome> remote_read(std::string_view question, std::span<const Passage> passages,
                                     const RemoteReaderConfig& config)
{
    if (passages.empty()) {
        throw UsageError("remote_read: no passages");
    }
    if (config.max_parallel < 1) {
        throw UsageError("remote_read: max_parallel must be at least 1");
    }
    make_client(config);  // validates the endpoint up front

    std::vector<ReadOutcome> out(passages.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        auto client = make_client(config);
        for (auto i = next.fetch_add(1); i < passages.size(); i = next.fetch_add(1)) {
            out[i] = read_one(client, question, passages[i]);
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto n = std::min(config.max_parallel, passages.size());
        for (std::size_t t = 0; t < n; ++t) {
            pool.emplace_back(worker);
        }
    }

    if (config.throw_on_protocol_error) {
        for (const auto& o : out) {
            if (o.status == ReadStatus::protocol_error) {
                throw ProtocolError(o.error);
            }
        }
    }
    return out;
}

HealthStatus check_health(const RemoteReaderConfig& config)
{
    auto client = make_client(config);
    const auto result = client.Get("/health");
    if (!result) {
        throw NetworkError("reader at " + config.endpoint + " unreachable: " + httplib::to_string(result.error()));
    }
    if (result->status != 200) {
        throw NetworkError("reader at " + config.endpoint + " answered HTTP " + std::to_string(result->status));
    }
    try {
        const auto doc = json::parse(result->body);
        return {doc.at("status").get<std::string>(), doc.value("model", std::string())};
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed /health reply: ") + e.what());
    }
}

RemoteReader::RemoteReader(RemoteReaderConfig config) : config_(std::move(config)) {}

std::vector<ReadOutcome> RemoteReader::read(std::string_view question, std::span<const Passage> passages) const
{
    if (passages.empty()) {
        return {};
    }
    return remote_read(question, passages, config_);
}

}  // namespace odqa
