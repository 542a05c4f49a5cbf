#include "pog/embed.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>

namespace pog {

HashingEmbedder::HashingEmbedder(int dimension) : dim_(dimension) {
    if (dimension < 1) throw ConfigError("embedder dimension must be >= 1");
    name_ = "fallback-hash-" + std::to_string(dimension);
}

std::uint64_t HashingEmbedder::fnv1a64(const std::string& token) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : token) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<EmbeddingVector> HashingEmbedder::embed(
    const std::vector<std::string>& texts) const {
    if (texts.empty()) throw PreconditionError("embed requires at least one text");
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        EmbeddingVector v = EmbeddingVector::Zero(dim_);
        std::string token;
        auto flush = [&] {
            if (token.empty()) return;
            v[static_cast<int>(fnv1a64(token) % static_cast<std::uint64_t>(dim_))] += 1.0f;
            token.clear();
        };
        for (unsigned char c : text) {
            if (std::isalnum(c))
                token += static_cast<char>(std::tolower(c));
            else
                flush();
        }
        flush();
        float norm = v.norm();
        if (norm > 0.0f) v /= norm;
        out.push_back(std::move(v));
    }
    return out;
}

HttpEmbedder::HttpEmbedder(std::string endpoint_url) {
    std::size_t scheme = endpoint_url.find("://");
    std::size_t path_start =
        endpoint_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        host_ = endpoint_url;
        path_ = "/";
    } else {
        host_ = endpoint_url.substr(0, path_start);
        path_ = endpoint_url.substr(path_start);
    }
    name_ = "http:" + endpoint_url;
}

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) const {
    if (texts.empty()) throw PreconditionError("embed requires at least one text");
    nlohmann::json payload{{"texts", texts}};
    httplib::Client client(host_);
    client.set_read_timeout(60, 0);
    auto res = client.Post(path_, payload.dump(), "application/json");
    if (!res) throw TransportError("embedding endpoint unreachable: " + host_ + path_);
    if (res->status != 200)
        throw TransportError("embedding endpoint returned status " +
                             std::to_string(res->status));
    nlohmann::json body = nlohmann::json::parse(res->body);
    std::vector<EmbeddingVector> out;
    for (const auto& row : body.at("vectors")) {
        EmbeddingVector v(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) v[static_cast<int>(i)] = row[i].get<float>();
        int expected = -1;
        dim_.compare_exchange_strong(expected, static_cast<int>(row.size()));
        if (v.size() != dim_.load())
            throw TransportError("embedding endpoint returned mixed dimensions");
        out.push_back(std::move(v));
    }
    if (out.size() != texts.size())
        throw TransportError("embedding endpoint returned wrong vector count");
    return out;
}

float cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size())
        throw PreconditionError("cosine over mismatched dimensions");
    float na = a.norm(), nb = b.norm();
    if (na == 0.0f || nb == 0.0f) return 0.0f;
    return a.dot(b) / (na * nb);
}

} // namespace pog
