#include "decentmem/memory.hpp"
#include "decentmem/errors.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace decentmem {

const char* to_string(ActionType t) {
    switch (t) {
        case ActionType::Decompose: return "decompose";
        case ActionType::DirectAnswer: return "direct_answer";
        case ActionType::Forward: return "forward";
    }
    return "?";
}

const char* to_string(PieceOrigin o) {
    return o == PieceOrigin::Consolidated ? "consolidated" : "exploratory";
}

bool DualPoolMemory::has_id(std::uint64_t id) const {
    auto match = [id](const MemoryPiece& p) { return p.id == id; };
    return std::any_of(e_pool_.begin(), e_pool_.end(), match) ||
           std::any_of(x_pool_.begin(), x_pool_.end(), match);
}

void DualPoolMemory::add_exploratory(MemoryPiece piece) {
    if (piece.origin != PieceOrigin::Exploratory) {
        throw DuplicateIdError("add_exploratory: piece origin must be exploratory");
    }
    if (has_id(piece.id)) {
        throw DuplicateIdError("add_exploratory: duplicate piece id " +
                               std::to_string(piece.id));
    }
    x_pool_.push_back(std::move(piece));
}

std::size_t DualPoolMemory::consolidate() {
    const std::size_t moved = x_pool_.size();
    for (auto& p : x_pool_) {
        p.origin = PieceOrigin::Consolidated;
        e_pool_.push_back(std::move(p));
    }
    x_pool_.clear();
    return moved;
}

void DualPoolMemory::restore(std::vector<MemoryPiece> e_pool,
                             std::vector<MemoryPiece> x_pool) {
    e_pool_ = std::move(e_pool);
    x_pool_ = std::move(x_pool);
}

void DualPoolMemory::validate() const {
    std::vector<std::uint64_t> ids;
    ids.reserve(e_pool_.size() + x_pool_.size());
    auto check_piece = [&](const MemoryPiece& p, bool in_x) {
        double norm2 = 0.0;
        for (double v : p.context_embedding.values()) norm2 += v * v;
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9) {
            throw StoreFormatError("piece " + std::to_string(p.id) +
                                   ": embedding not unit-norm", -1);
        }
        if (p.quality < 0.0 || p.quality > 10.0) {
            throw StoreFormatError("piece " + std::to_string(p.id) +
                                   ": quality out of [0,10]", -1);
        }
        if (in_x && p.origin != PieceOrigin::Exploratory) {
            throw StoreFormatError("piece " + std::to_string(p.id) +
                                   ": X-pool piece not exploratory", -1);
        }
        if (!p.trajectory.allocation.empty() &&
            p.trajectory.action_type != ActionType::Decompose) {
            throw StoreFormatError("piece " + std::to_string(p.id) +
                                   ": allocation on non-decompose action", -1);
        }
        ids.push_back(p.id);
    };
    for (const auto& p : e_pool_) check_piece(p, false);
    for (const auto& p : x_pool_) check_piece(p, true);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw StoreFormatError("duplicate piece id across pools", -1);
    }
    if (router_.w_e < router_.floor) {
        throw StoreFormatError("router weight below floor", -1);
    }
}

std::vector<std::pair<MemoryPiece, double>>
retrieve(const std::vector<MemoryPiece>& pool, const EmbeddingVector& query,
         std::size_t k, double tau) {
    const std::size_t n = pool.size();
    for (const auto& p : pool) {
        if (p.context_embedding.dimension() != query.dimension()) {
            throw DimensionError("retrieve: stored piece " + std::to_string(p.id) +
                                 " has dimension " +
                                 std::to_string(p.context_embedding.dimension()) +
                                 ", query has " + std::to_string(query.dimension()));
        }
    }
    std::vector<double> sims(n);

    // Scoring is a pure read; safe to fan out.
#pragma omp parallel for schedule(static) if (n > 256)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const auto& vals = pool[static_cast<std::size_t>(i)].context_embedding.values();
        double dot = 0.0;
        for (std::size_t j = 0; j < vals.size(); ++j) dot += query.values()[j] * vals[j];
        sims[static_cast<std::size_t>(i)] = dot;
    }

    std::vector<std::size_t> idx;
    idx.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (sims[i] >= tau) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (sims[a] != sims[b]) return sims[a] > sims[b];
        if (pool[a].created_at != pool[b].created_at)
            return pool[a].created_at < pool[b].created_at;
        return pool[a].id < pool[b].id;
    });
    if (idx.size() > k) idx.resize(k);

    std::vector<std::pair<MemoryPiece, double>> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.emplace_back(pool[i], sims[i]);
    return out;
}

} // namespace decentmem
