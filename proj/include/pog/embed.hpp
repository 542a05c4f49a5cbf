#pragma once
// Dense text embeddings and cosine top-k selection. Ships a deterministic
// hashing embedder so the whole pipeline runs offline; any sentence encoder
// can be dropped in behind the same interface (e.g. over HTTP).

#include "pog/errors.hpp"

#include <Eigen/Core>

#include <atomic>
#include <string>
#include <utility>
#include <vector>

namespace pog {

using EmbeddingVector = Eigen::VectorXf;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual const std::string& name() const = 0;
    virtual int dimension() const = 0;

    // One vector per input text, all of dimension(). texts must be non-empty.
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const = 0;

    EmbeddingVector embed_one(const std::string& text) const {
        return embed(std::vector<std::string>{text}).front();
    }
};

// L2-normalized bag of token hashes.
//
// Construction (stable across platforms and processes):
//   tokens   = maximal runs of ASCII alphanumerics, lowercased
//   bucket   = fnv1a64(token) mod dimension
//   v[bucket] += 1 per occurrence, then v /= ||v||  (zero vector stays zero)
class HashingEmbedder final : public EmbeddingProvider {
public:
    explicit HashingEmbedder(int dimension = 256);

    const std::string& name() const override { return name_; }
    int dimension() const override { return dim_; }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;

    static std::uint64_t fnv1a64(const std::string& token);

private:
    int dim_;
    std::string name_;
};

// Remote provider: POST {"texts": [...]} -> {"vectors": [[...], ...]}.
class HttpEmbedder final : public EmbeddingProvider {
public:
    explicit HttpEmbedder(std::string endpoint_url);

    const std::string& name() const override { return name_; }
    int dimension() const override { return dim_; }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const override;

private:
    std::string host_;
    std::string path_;
    std::string name_;
    mutable std::atomic<int> dim_{-1}; // learned from the first reply
};

// Cosine similarity with the zero-norm convention: any pair involving a
// zero-norm vector scores 0.
float cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Keys of the min(k, |candidates|) most similar candidates, descending
// similarity, ties broken by ascending insertion index.
template <typename Key>
std::vector<Key> cosine_top_k(const EmbeddingVector& query,
                              const std::vector<std::pair<Key, EmbeddingVector>>& candidates,
                              int k) {
    if (k < 1) throw PreconditionError("k must be >= 1");
    std::vector<std::pair<float, std::size_t>> scored;
    scored.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        scored.emplace_back(cosine_similarity(query, candidates[i].second), i);
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
    std::vector<Key> keys;
    keys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) keys.push_back(candidates[scored[i].second].first);
    return keys;
}

} // namespace pog
