#include "decentmem/sim.hpp"
#include "decentmem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace decentmem::sim {

TaskSpec generate_task(const EnvConfig& env, int family, std::uint64_t task_index,
                       Rng& rng) {
    if (family < 0 || family >= env.families) {
        throw ConfigError("generate_task: family out of range");
    }
    const int overlap =
        static_cast<int>(std::lround(env.sibling_overlap * env.family_tokens));
    const int pair = family / 2;

    std::string prompt;
    for (int i = 0; i < env.family_tokens; ++i) {
        if (!prompt.empty()) prompt += ' ';
        if (i < overlap) {
            prompt += "pair" + std::to_string(pair) + "s" + std::to_string(i);
        } else {
            prompt += "fam" + std::to_string(family) + "u" + std::to_string(i);
        }
    }
    for (int i = 0; i < env.instance_tokens; ++i) {
        prompt += " inst" + std::to_string(rng.below(1'000'000));
    }

    TaskSpec task;
    task.task_id = task_index;
    task.family_id = family;
    task.prompt = std::move(prompt);
    task.hidden_answer = "answer-fam" + std::to_string(family);
    return task;
}

std::vector<TaskSpec> make_task_stream(const EnvConfig& env, std::size_t count,
                                       Schedule schedule, Rng& rng) {
    std::vector<TaskSpec> tasks;
    tasks.reserve(count);
    const int f = env.families;
    for (std::size_t i = 0; i < count; ++i) {
        int family = 0;
        if (schedule == Schedule::Cycle) {
            family = static_cast<int>(i % static_cast<std::size_t>(f));
        } else {
            // Mixed: core (even) families only in the first half, then
            // alternate core and sibling (odd) families.
            if (f < 2 || f % 2 != 0) {
                throw ConfigError("mixed schedule needs an even family count >= 2");
            }
            const std::size_t pairs = static_cast<std::size_t>(f) / 2;
            if (i < count / 2) {
                family = static_cast<int>(2 * (i % pairs));
            } else {
                const std::size_t j = i - count / 2;
                const std::size_t p = (j / 2) % pairs;
                family = static_cast<int>(2 * p + (j % 2));
            }
        }
        tasks.push_back(generate_task(env, family, i, rng));
    }
    return tasks;
}

PolicyContract make_scripted_policy(const EnvConfig& env) {
    return [env](const LocalContext& ctx, Rng& rng) -> ActionOutput {
        ActionOutput out;
        out.trajectory.stage_index = ctx.stage_index;
        const std::string& hidden = ctx.task->hidden_answer;
        // Failed attempts produce a plausible but wrong answer (another
        // family's), so vote ties carry no systematic bias toward the
        // reference answer.
        auto wrong_answer = [&rng, &ctx, &env]() {
            const int shift =
                1 + static_cast<int>(rng.below(
                        static_cast<std::uint64_t>(std::max(1, env.families - 1))));
            const int fam = (ctx.task->family_id + shift) % env.families;
            return "answer-fam" + std::to_string(fam);
        };

        if (!ctx.exploratory && !ctx.retrieved.empty()) {
            const MemoryPiece* best = &ctx.retrieved.front().first;
            for (const auto& [piece, sim] : ctx.retrieved) {
                if (piece.quality > best->quality) best = &piece;
            }
            const bool matching = best->trajectory.payload == hidden;
            out.kind = matching ? AttemptKind::Guided : AttemptKind::Direct;
            out.memory_guided = matching;
            const double p = matching ? env.p_guided : env.p_direct;
            out.failed = !rng.bernoulli(p);
            out.answer = out.failed ? wrong_answer() : hidden;
            if (best->trajectory.action_type == ActionType::Decompose &&
                !best->trajectory.allocation.empty()) {
                // coordination-prior reuse
                out.trajectory.action_type = ActionType::Decompose;
                out.trajectory.allocation = best->trajectory.allocation;
            }
            out.trajectory.payload = out.answer;
            return out;
        }

        out.kind = AttemptKind::Exploratory;
        out.failed = !rng.bernoulli(env.p_explore);
        out.answer = out.failed ? wrong_answer() : hidden;
        out.trajectory.payload = out.answer;
        return out;
    };
}

namespace {

std::string majority_vote(const std::vector<ActionOutput>& outputs) {
    std::map<std::string, int> counts;
    for (const auto& o : outputs) ++counts[o.answer];
    // max count; ties resolve to the lexicographically smallest answer
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

} // namespace

StageAggregate run_stage(const TaskSpec& task, int stage_index,
                         std::vector<AgentSpec>& agents,
                         const std::vector<std::string>& prior_outputs,
                         const SimOptions& opts, Rng& rng,
                         std::vector<std::pair<std::string, PoolChoice>>& choices,
                         PoolAccessLog* access_log) {
    if (agents.empty()) throw ConfigError("run_stage: empty active set");

    StageAggregate agg;
    const EmbeddingVector query = hash_embed(task.prompt, opts.embedding_dim);

    for (auto& agent : agents) {
        LocalContext ctx;
        ctx.task = &task;
        ctx.stage_index = stage_index;
        ctx.neighbor_info = prior_outputs;

        PoolChoice choice;
        if (opts.fixed_alpha) {
            choice = rng.bernoulli(*opts.fixed_alpha) ? PoolChoice::Exploit
                                                      : PoolChoice::Explore;
        } else {
            choice = choose(agent.memory.router(), rng);
        }
        choices.emplace_back(agent.agent_id, choice);

        if (choice == PoolChoice::Exploit) {
            if (access_log) {
                access_log->entries.push_back(
                    {agent.agent_id, agent.memory.agent_id(), "retrieve"});
            }
            ctx.retrieved = retrieve(agent.memory.e_pool(), query,
                                     opts.retrieval_k, opts.retrieval_tau);
            if (ctx.retrieved.empty()) ctx.exploratory = true; // X-pool fallback
        } else {
            ctx.exploratory = true;
        }

        ActionOutput out = agent.policy(ctx, rng);

        if (ctx.exploratory) {
            MemoryPiece piece;
            piece.id = ++agent.next_piece_id;
            piece.context_prototype = task.prompt;
            piece.context_embedding = query;
            piece.trajectory = out.trajectory;
            piece.commentary = out.failed ? "attempt missed" : "attempt succeeded";
            piece.quality = out.failed ? 2.0 : 9.0;
            piece.created_at = task.task_id;
            piece.origin = PieceOrigin::Exploratory;
            if (access_log) {
                access_log->entries.push_back(
                    {agent.agent_id, agent.memory.agent_id(), "add_exploratory"});
            }
            agent.memory.add_exploratory(std::move(piece));
        }

        agg.outputs.push_back(std::move(out));
    }

    agg.all_failed = std::all_of(agg.outputs.begin(), agg.outputs.end(),
                                 [](const ActionOutput& o) { return o.failed; });
    agg.aggregate_answer = majority_vote(agg.outputs);

    agg.transcript.task_index = task.task_id;
    agg.transcript.stage_index = stage_index;
    agg.transcript.agents_total = static_cast<int>(agents.size());
    agg.transcript.agents_correct = static_cast<int>(
        std::count_if(agg.outputs.begin(), agg.outputs.end(),
                      [&](const ActionOutput& o) { return o.answer == task.hidden_answer; }));
    agg.transcript.aggregate_correct = agg.aggregate_answer == task.hidden_answer;
    return agg;
}

TaskOutcome run_task(const TaskSpec& task, std::vector<AgentSpec>& agents,
                     const EvaluatorContract& judge, const SimOptions& opts,
                     Rng& rng, PoolAccessLog* access_log) {
    if (opts.stages < 1) throw ConfigError("run_task: needs at least one stage");

    TaskOutcome outcome;
    std::vector<StageAggregate> aggregates;
    std::vector<std::string> prior;
    // One choice row per agent per stage, in stage-major order.
    for (int t = 1; t <= opts.stages; ++t) {
        StageAggregate agg = run_stage(task, t, agents, prior, opts, rng,
                                       outcome.stage_choices, access_log);
        prior.clear();
        for (const auto& o : agg.outputs) prior.push_back(o.answer);
        aggregates.push_back(std::move(agg));
    }

    outcome.stage_evaluations.resize(static_cast<std::size_t>(opts.stages));
    for (int t = 0; t < opts.stages; ++t) {
        try {
            outcome.stage_evaluations[static_cast<std::size_t>(t)] =
                judge.evaluate(aggregates[static_cast<std::size_t>(t)].transcript);
        } catch (const EvalParseError&) {
            // unevaluated stage: router updates touching it are skipped
        }
    }

    if (!opts.fixed_alpha) {
        const std::size_t n_agents = agents.size();
        for (int t = 2; t <= opts.stages; ++t) {
            const auto& prev_eval = outcome.stage_evaluations[static_cast<std::size_t>(t - 2)];
            const auto& curr_eval = outcome.stage_evaluations[static_cast<std::size_t>(t - 1)];
            if (!prev_eval || !curr_eval) continue;
            const int d = delta(prev_eval->score, curr_eval->score);
            for (std::size_t a = 0; a < n_agents; ++a) {
                const PoolChoice choice =
                    outcome.stage_choices[static_cast<std::size_t>(t - 1) * n_agents + a]
                        .second;
                RouterState& r = agents[a].memory.router();
                RouterTraceRow row;
                row.task_id = task.task_id;
                row.stage_index = t;
                row.agent_id = agents[a].agent_id;
                row.choice = choice;
                row.delta = d;
                row.w_e_before = r.w_e;
                r = update(r, choice, d);
                row.w_e_after = r.w_e;
                outcome.router_trace.push_back(std::move(row));
            }
        }
    }

    for (auto& agent : agents) agent.memory.consolidate();

    outcome.final_answer = aggregates.back().aggregate_answer;
    outcome.success = aggregates.back().transcript.aggregate_correct;
    return outcome;
}

std::vector<AgentSpec> make_agents(int count, const EnvConfig& env,
                                   const RouterState& router_init) {
    std::vector<AgentSpec> agents;
    agents.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        AgentSpec a;
        a.agent_id = "agent-" + std::to_string(i);
        a.role = "solver";
        a.policy = make_scripted_policy(env);
        a.memory = DualPoolMemory(a.agent_id, router_init);
        agents.push_back(std::move(a));
    }
    return agents;
}

WorkloadResult run_workload(const WorkloadConfig& config) {
    Rng rng(config.seed);
    const std::vector<TaskSpec> tasks =
        make_task_stream(config.env, config.tasks, config.schedule, rng);
    std::vector<AgentSpec> agents =
        make_agents(config.agents, config.env, config.router_init);

    const SimulatedJudge sim_judge{config.judge_noise, Rng::mix(config.seed, 0x6a)};
    const EvaluatorContract judge{
        [sim_judge](const StageTranscript& t) { return sim_judge(t); }};

    WorkloadResult result;
    result.success.reserve(tasks.size());
    result.family.reserve(tasks.size());
    for (const TaskSpec& task : tasks) {
        TaskOutcome outcome =
            run_task(task, agents, judge, config.options, rng, &result.access_log);
        result.success.push_back(outcome.success ? 1 : 0);
        result.family.push_back(task.family_id);
        for (auto& row : outcome.router_trace) {
            result.router_trace.push_back(std::move(row));
        }
        for (const auto& agent : agents) {
            result.total_x_pool_after += agent.memory.x_pool().size();
        }
    }
    for (auto& agent : agents) {
        result.final_w_e.push_back(agent.memory.router().w_e);
        result.total_e_pool += agent.memory.e_pool().size();
        result.final_memories.push_back(std::move(agent.memory));
    }
    return result;
}

std::vector<double> mean_success_per_seed(const WorkloadConfig& base,
                                          std::size_t seeds, bool serial) {
    std::vector<double> means(seeds, 0.0);
#pragma omp parallel for schedule(dynamic) if (!serial)
    for (long long s = 0; s < static_cast<long long>(seeds); ++s) {
        WorkloadConfig cfg = base;
        cfg.seed = Rng::mix(base.seed, static_cast<std::uint64_t>(s));
        const WorkloadResult res = run_workload(cfg);
        double sum = 0.0;
        for (int v : res.success) sum += v;
        means[static_cast<std::size_t>(s)] =
            sum / static_cast<double>(res.success.size());
    }
    return means;
}

} // namespace decentmem::sim
