#pragma once

#include "decentmem/embedding.hpp"
#include "decentmem/judge.hpp"
#include "decentmem/memory.hpp"
#include "decentmem/router.hpp"
#include "decentmem/rng.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace decentmem::sim {

struct TaskSpec {
    std::uint64_t task_id = 0;
    int family_id = 0;
    std::string prompt;
    std::string hidden_answer; // simulated environments only
};

/// Synthetic environment parameters. Families render prompts from
/// family-distinctive vocabularies so hash embeddings of same-family
/// tasks are similar. Families come in sibling pairs (2p, 2p+1) that
/// share a fraction of their vocabulary; a sibling's pieces retrieve
/// above threshold but carry the wrong answer, which is the mismatched
/// reuse a pure-exploitation router cannot escape.
struct EnvConfig {
    int families = 10;
    int family_tokens = 12;
    int instance_tokens = 2;
    double sibling_overlap = 0.0; // fraction of family tokens shared in a pair
    double p_guided = 0.9;        // matching retrieved answer
    double p_direct = 0.4;        // retrieval hit with a mismatched answer
    double p_explore = 0.55;      // exploratory attempt
};

enum class Schedule {
    Cycle,  // task i belongs to family i mod F
    Mixed,  // first half cycles even ("core") families, second half
            // alternates core and odd ("sibling") families
};

TaskSpec generate_task(const EnvConfig& env, int family, std::uint64_t task_index,
                       Rng& rng);
std::vector<TaskSpec> make_task_stream(const EnvConfig& env, std::size_t count,
                                       Schedule schedule, Rng& rng);

struct LocalContext {
    const TaskSpec* task = nullptr;
    int stage_index = 1;
    std::vector<std::string> neighbor_info;
    // Top-K retrieval result, or empty when the agent explores.
    std::vector<std::pair<MemoryPiece, double>> retrieved;
    bool exploratory = false;
};

enum class AttemptKind { Guided, Direct, Exploratory };

struct ActionOutput {
    TrajectoryRecord trajectory;
    std::string answer;
    AttemptKind kind = AttemptKind::Exploratory;
    bool memory_guided = false;
    bool failed = false;
};

using PolicyContract = std::function<ActionOutput(const LocalContext&, Rng&)>;

/// Environment-scripted policy: success probability per attempt kind,
/// answers resolved against the task's hidden answer. Reuses a retrieved
/// Decompose allocation as a coordination prior when present.
PolicyContract make_scripted_policy(const EnvConfig& env);

struct AgentSpec {
    std::string agent_id;
    std::string role;
    PolicyContract policy;
    DualPoolMemory memory;
    std::uint64_t next_piece_id = 0;
};

struct RouterTraceRow {
    std::uint64_t task_id = 0;
    int stage_index = 0;
    std::string agent_id;
    PoolChoice choice = PoolChoice::Explore;
    int delta = 0;
    double w_e_before = 1.0;
    double w_e_after = 1.0;
};

struct StageAggregate {
    std::vector<ActionOutput> outputs;
    std::string aggregate_answer;
    bool all_failed = false;
    StageTranscript transcript;
};

struct TaskOutcome {
    std::string final_answer;
    bool success = false;
    std::vector<std::optional<StageEvaluation>> stage_evaluations;
    std::vector<RouterTraceRow> router_trace;
    std::vector<std::pair<std::string, PoolChoice>> stage_choices; // debug
};

struct SimOptions {
    int stages = 3;
    std::size_t retrieval_k = 3;
    double retrieval_tau = 0.6;
    std::size_t embedding_dim = kDefaultEmbeddingDim;
    // Online routing when empty; a fixed alpha bypasses choose(). The
    // alpha = 0 baseline also bypasses the weight floor (it never
    // exploits at all).
    std::optional<double> fixed_alpha;
};

/// One stage: every active agent independently routes, retrieves or
/// explores, and acts; outputs are aggregated by majority vote.
StageAggregate run_stage(const TaskSpec& task, int stage_index,
                         std::vector<AgentSpec>& agents,
                         const std::vector<std::string>& prior_outputs,
                         const SimOptions& opts, Rng& rng,
                         std::vector<std::pair<std::string, PoolChoice>>& choices,
                         PoolAccessLog* access_log);

/// Full loop: route, retrieve or explore, act, aggregate, evaluate,
/// update in stage order (stage 1 has no predecessor score and is
/// skipped), consolidate.
TaskOutcome run_task(const TaskSpec& task, std::vector<AgentSpec>& agents,
                     const EvaluatorContract& judge, const SimOptions& opts,
                     Rng& rng, PoolAccessLog* access_log = nullptr);

std::vector<AgentSpec> make_agents(int count, const EnvConfig& env,
                                   const RouterState& router_init);

struct WorkloadResult {
    std::vector<int> success; // 0/1 per task
    std::vector<int> family;  // family id per task
    std::vector<RouterTraceRow> router_trace;
    std::vector<double> final_w_e; // per agent
    std::vector<DualPoolMemory> final_memories;
    PoolAccessLog access_log;
    std::size_t total_e_pool = 0;
    std::size_t total_x_pool_after = 0; // must be 0 after every task
};

struct WorkloadConfig {
    EnvConfig env;
    Schedule schedule = Schedule::Cycle;
    std::size_t tasks = 200;
    int agents = 3;
    SimOptions options;
    RouterState router_init;
    double judge_noise = 0.5;
    std::uint64_t seed = 0;
};

WorkloadResult run_workload(const WorkloadConfig& config);

/// Mean success per seed; seeds fan out over OpenMP with per-seed
/// streams and seed-ordered reduction.
std::vector<double> mean_success_per_seed(const WorkloadConfig& base,
                                          std::size_t seeds, bool serial = false);

} // namespace decentmem::sim
