#include "pog/llm.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace pog {

const char* purpose_to_string(Purpose p) {
    switch (p) {
    case Purpose::Analysis: return "analysis";
    case Purpose::Supplement: return "supplement";
    case Purpose::PreciseSelect: return "precise_select";
    case Purpose::Summarize: return "summarize";
    case Purpose::Evaluate: return "evaluate";
    case Purpose::Generate: return "generate";
    case Purpose::Extract: return "extract";
    }
    return "?";
}

Purpose purpose_from_string(const std::string& s) {
    if (s == "analysis") return Purpose::Analysis;
    if (s == "supplement") return Purpose::Supplement;
    if (s == "precise_select") return Purpose::PreciseSelect;
    if (s == "summarize") return Purpose::Summarize;
    if (s == "evaluate") return Purpose::Evaluate;
    if (s == "generate") return Purpose::Generate;
    if (s == "extract") return Purpose::Extract;
    throw ConfigError("unknown llm purpose: " + s);
}

double temperature_for(Purpose p, const PipelineConfig& config) {
    switch (p) {
    case Purpose::Analysis:
    case Purpose::Supplement:
    case Purpose::PreciseSelect:
    case Purpose::Extract:
        return config.exploration_temperature;
    case Purpose::Summarize:
    case Purpose::Evaluate:
    case Purpose::Generate:
        return config.reasoning_temperature;
    }
    return config.reasoning_temperature;
}

std::size_t Transcript::call_count(Purpose p) const {
    std::size_t n = 0;
    for (const auto& r : records_)
        if (r.purpose == p) ++n;
    return n;
}

std::uint64_t Transcript::total_prompt_chars() const {
    std::uint64_t n = 0;
    for (const auto& r : records_) n += r.prompt_chars;
    return n;
}

std::uint64_t Transcript::total_reply_chars() const {
    std::uint64_t n = 0;
    for (const auto& r : records_) n += r.reply_chars;
    return n;
}

std::string TranscribingLlm::complete(const LlmRequest& request) {
    auto start = std::chrono::steady_clock::now();
    std::string reply = backend_.complete(request);
    auto elapsed = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    transcript_.append(TranscriptRecord{request.purpose, request.prompt, reply,
                                        request.prompt.size(), reply.size(), elapsed});
    return reply;
}

MockLlm MockLlm::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock script: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json_text(text);
}

MockLlm MockLlm::from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    std::vector<Entry> entries;
    for (const auto& item : doc) {
        Entry e;
        e.purpose = purpose_from_string(item.at("purpose").get<std::string>());
        if (item.contains("match")) e.match = item.at("match").get<std::string>();
        e.reply = item.at("reply").get<std::string>();
        entries.push_back(std::move(e));
    }
    return MockLlm(std::move(entries));
}

std::string MockLlm::complete(const LlmRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (used_.size() != entries_.size()) used_.assign(entries_.size(), false);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (used_[i]) continue;
        const Entry& e = entries_[i];
        if (e.purpose != request.purpose) continue;
        if (e.match && request.prompt.find(*e.match) == std::string::npos) continue;
        used_[i] = true;
        return e.reply;
    }
    throw ConfigError(std::string("mock script exhausted for purpose: ") +
                      purpose_to_string(request.purpose));
}

std::size_t MockLlm::remaining() const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (used_.empty()) return entries_.size();
    std::size_t n = 0;
    for (bool u : used_)
        if (!u) ++n;
    return n;
}

HttpLlm::HttpLlm(std::string endpoint_url, std::string model) : model_(std::move(model)) {
    std::size_t scheme = endpoint_url.find("://");
    std::size_t path_start =
        endpoint_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        host_ = endpoint_url;
        path_ = "/v1/chat/completions";
    } else {
        host_ = endpoint_url.substr(0, path_start);
        path_ = endpoint_url.substr(path_start);
    }
}

std::string HttpLlm::complete(const LlmRequest& request) {
    nlohmann::json payload{
        {"model", model_},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    httplib::Headers headers;
    if (const char* key = std::getenv("POG_API_KEY"))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500));
        httplib::Client client(host_);
        client.set_read_timeout(120, 0);
        auto res = client.Post(path_, headers, payload.dump(), "application/json");
        if (!res) {
            last_error = "LLM endpoint unreachable: " + host_ + path_;
            continue;
        }
        if (res->status != 200) {
            last_error = "LLM endpoint returned status " + std::to_string(res->status);
            continue;
        }
        nlohmann::json body = nlohmann::json::parse(res->body);
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    }
    throw TransportError(last_error);
}

} // namespace pog
