#pragma once

#include "decentmem/embedding.hpp"
#include "decentmem/router.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace decentmem {

enum class ActionType { Decompose, DirectAnswer, Forward };
enum class PieceOrigin { Consolidated, Exploratory };

struct SubtaskAllocation {
    std::string subtask;
    std::string agent_id;
    bool operator==(const SubtaskAllocation&) const = default;
};

/// The action half of a memory piece: what was done, plus the sub-task
/// allocation handed to the next stage (non-empty only for Decompose).
struct TrajectoryRecord {
    ActionType action_type = ActionType::DirectAnswer;
    std::string payload;
    std::vector<SubtaskAllocation> allocation;
    int stage_index = 1;

    bool operator==(const TrajectoryRecord&) const = default;
};

/// One stored experience z = (context prototype, action prototype).
struct MemoryPiece {
    std::uint64_t id = 0;
    std::string context_prototype;
    EmbeddingVector context_embedding;
    TrajectoryRecord trajectory;
    std::string commentary;
    double quality = 0.0;          // in [0, 10]
    std::uint64_t created_at = 0;  // task index, monotone
    PieceOrigin origin = PieceOrigin::Exploratory;

    bool operator==(const MemoryPiece&) const = default;
};

/// Records who touched which agent's pools; used to assert that no
/// agent ever reads another agent's memory.
struct PoolAccessLog {
    struct Entry {
        std::string accessor;
        std::string owner;
        std::string op;
    };
    std::vector<Entry> entries;

    long cross_agent_reads() const {
        long n = 0;
        for (const auto& e : entries)
            if (e.accessor != e.owner) ++n;
        return n;
    }
};

/// An agent's private dual-pool memory. Exclusively owned by one
/// execution context at a time; never shared for concurrent mutation.
class DualPoolMemory {
public:
    DualPoolMemory() = default;
    explicit DualPoolMemory(std::string agent_id, RouterState router = {})
        : agent_id_(std::move(agent_id)), router_(router) {}

    const std::string& agent_id() const { return agent_id_; }
    const std::vector<MemoryPiece>& e_pool() const { return e_pool_; }
    const std::vector<MemoryPiece>& x_pool() const { return x_pool_; }
    RouterState& router() { return router_; }
    const RouterState& router() const { return router_; }

    /// Appends an exploratory piece to the X-pool. The id must be fresh
    /// across both pools and origin must be Exploratory.
    void add_exploratory(MemoryPiece piece);

    /// Moves every X-pool piece into the E-pool (origin rewritten to
    /// Consolidated) and resets the X-pool. Returns the count moved.
    std::size_t consolidate();

    bool has_id(std::uint64_t id) const;

    /// Restores pools verbatim (store loading); caller guarantees
    /// invariants, which can be re-checked with validate().
    void restore(std::vector<MemoryPiece> e_pool, std::vector<MemoryPiece> x_pool);

    /// Re-checks all pool invariants; throws on violation.
    void validate() const;

    bool operator==(const DualPoolMemory&) const = default;

private:
    std::string agent_id_;
    std::vector<MemoryPiece> e_pool_;
    std::vector<MemoryPiece> x_pool_;
    RouterState router_;
};

/// Top-K similarity retrieval over a pool: every piece with cosine
/// similarity >= tau, sorted by similarity descending, ties broken by
/// lower created_at then lower id, truncated to k. An empty result tells
/// the caller to fall back to the X-pool.
std::vector<std::pair<MemoryPiece, double>>
retrieve(const std::vector<MemoryPiece>& pool, const EmbeddingVector& query,
         std::size_t k, double tau);

const char* to_string(ActionType t);
const char* to_string(PieceOrigin o);

} // namespace decentmem
