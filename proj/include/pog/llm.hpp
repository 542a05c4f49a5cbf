#pragma once
// Pluggable chat-completion backend: a remote HTTP client and a scripted
// deterministic mock for offline runs. The transcript records every
// completed call for exact call/token accounting.

#include "pog/config.hpp"
#include "pog/errors.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pog {

enum class Purpose {
    Analysis,
    Supplement,
    PreciseSelect,
    Summarize,
    Evaluate,
    Generate,
    Extract,
};

const char* purpose_to_string(Purpose p);
Purpose purpose_from_string(const std::string& s);

struct LlmRequest {
    std::string prompt;
    double temperature = 0.0;
    int max_tokens = 256;
    Purpose purpose = Purpose::Evaluate;
};

// Exploration-side purposes run warm, reasoning-side purposes run cold.
double temperature_for(Purpose p, const PipelineConfig& config);

struct TranscriptRecord {
    Purpose purpose;
    std::string prompt;
    std::string reply;
    std::size_t prompt_chars = 0;
    std::size_t reply_chars = 0;
    double wall_ms = 0.0;
};

class Transcript {
public:
    void append(TranscriptRecord record) { records_.push_back(std::move(record)); }

    const std::vector<TranscriptRecord>& records() const { return records_; }
    std::size_t call_count() const { return records_.size(); }
    std::size_t call_count(Purpose p) const;
    std::uint64_t total_prompt_chars() const;
    std::uint64_t total_reply_chars() const;

private:
    std::vector<TranscriptRecord> records_;
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const LlmRequest& request) = 0;
};

// Records every call of a wrapped backend into a per-question transcript.
class TranscribingLlm final : public LlmBackend {
public:
    TranscribingLlm(LlmBackend& backend, Transcript& transcript)
        : backend_(backend), transcript_(transcript) {}

    std::string complete(const LlmRequest& request) override;

private:
    LlmBackend& backend_;
    Transcript& transcript_;
};

// Scripted playback: each entry answers the first request with a matching
// purpose whose prompt contains the optional match substring. Entries are
// consumed in order; a request with no remaining entry is a configuration
// error naming the purpose.
class MockLlm final : public LlmBackend {
public:
    struct Entry {
        Purpose purpose;
        std::optional<std::string> match;
        std::string reply;
    };

    MockLlm() = default;
    explicit MockLlm(std::vector<Entry> script) : entries_(std::move(script)) {}
    MockLlm(MockLlm&& other) noexcept
        : entries_(std::move(other.entries_)), used_(std::move(other.used_)) {}
    MockLlm& operator=(MockLlm&& other) noexcept {
        entries_ = std::move(other.entries_);
        used_ = std::move(other.used_);
        return *this;
    }

    // JSON list of {"purpose": ..., "match"?: ..., "reply": ...}.
    static MockLlm from_json_file(const std::string& path);
    static MockLlm from_json_text(const std::string& text);

    void add(Purpose purpose, std::string reply) {
        entries_.push_back(Entry{purpose, std::nullopt, std::move(reply)});
    }
    void add(Purpose purpose, std::string match, std::string reply) {
        entries_.push_back(Entry{purpose, std::move(match), std::move(reply)});
    }

    std::string complete(const LlmRequest& request) override;

    std::size_t remaining() const;

private:
    std::vector<Entry> entries_;
    std::vector<bool> used_;
    mutable std::mutex mutex_;
};

// Chat-completion over HTTP: {model, messages, temperature, max_tokens}.
// API key read from the POG_API_KEY environment variable when present.
// Transport failures are retried once with backoff.
class HttpLlm final : public LlmBackend {
public:
    HttpLlm(std::string endpoint_url, std::string model = "gpt-3.5-turbo");

    std::string complete(const LlmRequest& request) override;

private:
    std::string host_;
    std::string path_;
    std::string model_;
};

} // namespace pog
