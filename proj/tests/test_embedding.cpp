#include "decentmem/embedding.hpp"
#include "decentmem/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace decentmem;

namespace {

// Independent FNV-1a reimplementation used as an oracle for hash_embed.
std::uint64_t oracle_fnv(const std::string& s, std::uint64_t h) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

TEST_CASE("embedding vector normalizes on construction") {
    EmbeddingVector v(std::vector<double>{3.0, 4.0});
    CHECK(v.values()[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(v.values()[1] == doctest::Approx(0.8).epsilon(1e-15));
    double norm2 = 0.0;
    for (double x : v.values()) norm2 += x * x;
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero vector is rejected") {
    CHECK_THROWS_AS(EmbeddingVector(std::vector<double>{0.0, 0.0}), DimensionError);
}

TEST_CASE("cosine of identical vectors is 1, antipodal is -1") {
    EmbeddingVector a(std::vector<double>{1.0, 2.0, -3.0});
    EmbeddingVector b(std::vector<double>{-1.0, -2.0, 3.0});
    CHECK(cosine_sim(a, a) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cosine_sim(a, b) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("cosine against a hand-computed dot product") {
    // (3,4)/5 . (4,3)/5 = (12 + 12) / 25 = 0.96
    EmbeddingVector a(std::vector<double>{3.0, 4.0});
    EmbeddingVector b(std::vector<double>{4.0, 3.0});
    CHECK(cosine_sim(a, b) == doctest::Approx(0.96).epsilon(1e-14));
}

TEST_CASE("cosine rejects dimension mismatch") {
    EmbeddingVector a(std::vector<double>{1.0, 0.0});
    EmbeddingVector b(std::vector<double>{1.0, 0.0, 0.0});
    CHECK_THROWS_AS(cosine_sim(a, b), DimensionError);
}

TEST_CASE("hash embedding matches an independent reimplementation") {
    constexpr std::uint64_t kBucketBasis = 14695981039346656037ULL;
    constexpr std::uint64_t kSignBasis = 0x5bd1e9955bd1e995ULL;
    const std::size_t dim = 32;
    const std::vector<std::string> tokens{"alpha", "beta", "gamma", "delta42"};

    std::vector<double> acc(dim, 0.0);
    for (const auto& t : tokens) {
        CHECK(fnv1a64(t, kBucketBasis) == oracle_fnv(t, kBucketBasis));
        const std::size_t bucket = oracle_fnv(t, kBucketBasis) % dim;
        const double sign = (oracle_fnv(t, kSignBasis) & 1u) ? 1.0 : -1.0;
        acc[bucket] += sign;
    }
    const EmbeddingVector expected{std::move(acc)};
    const EmbeddingVector got = hash_embed("alpha beta gamma delta42", dim);
    REQUIRE(got.dimension() == dim);
    for (std::size_t i = 0; i < dim; ++i) {
        CHECK(got.values()[i] == doctest::Approx(expected.values()[i]).epsilon(1e-15));
    }
}

TEST_CASE("tokenization lowercases and splits on non-alphanumerics") {
    const auto a = hash_embed("Alpha, BETA!!  gamma");
    const auto b = hash_embed("alpha beta gamma");
    CHECK(a == b);
}

TEST_CASE("text without tokens is rejected") {
    CHECK_THROWS_AS(hash_embed("!!! ... ---"), DimensionError);
}

TEST_CASE("hash embedding is deterministic") {
    const std::string text = "solve the routing subproblem for node seven";
    CHECK(hash_embed(text) == hash_embed(text));
    CHECK(cosine_sim(hash_embed(text), hash_embed(text)) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("embedder contract wraps hash_embed") {
    const auto embedder = make_hash_embedder(64);
    CHECK(embedder.dimension == 64);
    CHECK(embedder.embed("token stream") == hash_embed("token stream", 64));
}

TEST_CASE("distinct vocabularies embed nearly orthogonally") {
    const auto a = hash_embed(
        "fam0u0 fam0u1 fam0u2 fam0u3 fam0u4 fam0u5 fam0u6 fam0u7 fam0u8 fam0u9");
    const auto b = hash_embed(
        "fam7u0 fam7u1 fam7u2 fam7u3 fam7u4 fam7u5 fam7u6 fam7u7 fam7u8 fam7u9");
    CHECK(std::abs(cosine_sim(a, b)) <= 0.2);
}
