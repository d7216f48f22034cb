#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace decentmem {

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

/// Unit-norm vector. Construction normalizes; zero vectors are rejected.
class EmbeddingVector {
public:
    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t dimension() const { return values_.size(); }

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<double> values_;
};

/// Cosine similarity of two unit vectors (their dot product).
double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b);

/// Deterministic signed-hashing bag-of-words embedding.
/// Tokens are split on non-alphanumeric boundaries and lowercased; each
/// token lands in one of `dimension` buckets with a sign from a second
/// hash. Fixed algorithm (FNV-1a 64), no platform dependence.
EmbeddingVector hash_embed(const std::string& text,
                           std::size_t dimension = kDefaultEmbeddingDim);

std::uint64_t fnv1a64(const std::string& s, std::uint64_t basis);

/// Contract an embedder (built-in or remote) must satisfy: deterministic,
/// fixed dimension, unit-norm output.
struct EmbedderContract {
    std::function<EmbeddingVector(const std::string&)> embed;
    std::size_t dimension = kDefaultEmbeddingDim;
};

EmbedderContract make_hash_embedder(std::size_t dimension = kDefaultEmbeddingDim);

} // namespace decentmem
