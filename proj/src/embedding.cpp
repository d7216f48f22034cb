#include "decentmem/embedding.hpp"
#include "decentmem/errors.hpp"

#include <cctype>
#include <cmath>

namespace decentmem {

EmbeddingVector::EmbeddingVector(std::vector<double> values)
    : values_(std::move(values)) {
    double norm2 = 0.0;
    for (double v : values_) norm2 += v * v;
    if (norm2 == 0.0) {
        throw DimensionError("cannot normalize a zero vector");
    }
    // Idempotent: re-wrapping an already-unit vector (e.g. when loading a
    // store) must not perturb its bits.
    if (std::abs(norm2 - 1.0) > 1e-12) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : values_) v *= inv;
    }
}

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw DimensionError("cosine_sim: dimension mismatch (" +
                             std::to_string(a.dimension()) + " vs " +
                             std::to_string(b.dimension()) + ")");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        dot += a.values()[i] * b.values()[i];
    }
    return dot;
}

std::uint64_t fnv1a64(const std::string& s, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {
constexpr std::uint64_t kBucketBasis = 14695981039346656037ULL; // FNV offset
constexpr std::uint64_t kSignBasis = 0x5bd1e9955bd1e995ULL;     // second stream
} // namespace

EmbeddingVector hash_embed(const std::string& text, std::size_t dimension) {
    std::vector<double> acc(dimension, 0.0);
    std::string token;
    bool any = false;
    auto flush = [&] {
        if (token.empty()) return;
        const std::uint64_t bucket = fnv1a64(token, kBucketBasis) % dimension;
        const double sign = (fnv1a64(token, kSignBasis) & 1u) ? 1.0 : -1.0;
        acc[bucket] += sign;
        any = true;
        token.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    if (!any) {
        throw DimensionError("hash_embed: text has no tokens");
    }
    return EmbeddingVector(std::move(acc));
}

EmbedderContract make_hash_embedder(std::size_t dimension) {
    return EmbedderContract{
        [dimension](const std::string& text) { return hash_embed(text, dimension); },
        dimension};
}

} // namespace decentmem
