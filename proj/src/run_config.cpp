#include "decentmem/run_config.hpp"
#include "decentmem/errors.hpp"

#include <fstream>

namespace decentmem {

using nlohmann::json;

namespace {

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
        throw ConfigError("config file is not valid JSON: " + path.string());
    }
    // manifest files carry the resolved config under "config"
    if (j.is_object() && j.contains("config") && j["config"].is_object()) {
        return j["config"];
    }
    return j;
}

double require_probability(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_number()) {
        throw ConfigError("field '" + field + "' missing or not a number");
    }
    const double v = j[field].get<double>();
    if (v < 0.0 || v > 1.0) {
        throw ConfigError("field '" + field + "' must lie in [0,1], got " +
                          std::to_string(v));
    }
    return v;
}

template <typename T>
T value_or(const json& j, const std::string& field, T fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j[field].get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + field + "' has the wrong type");
    }
}

} // namespace

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    cfg.workload.seed = value_or<std::uint64_t>(j, "seed", 42);
    cfg.out_dir = value_or<std::string>(j, "out_dir", "out");
    cfg.workload.tasks = value_or<std::size_t>(j, "tasks", 200);
    cfg.workload.agents = value_or<int>(j, "agents", 3);
    cfg.workload.options.stages = value_or<int>(j, "stages", 3);
    if (cfg.workload.tasks < 1) throw ConfigError("field 'tasks' must be >= 1");
    if (cfg.workload.agents < 1) throw ConfigError("field 'agents' must be >= 1");
    if (cfg.workload.options.stages < 1)
        throw ConfigError("field 'stages' must be >= 1");

    const std::string schedule = value_or<std::string>(j, "schedule", "cycle");
    if (schedule == "cycle") cfg.workload.schedule = sim::Schedule::Cycle;
    else if (schedule == "mixed") cfg.workload.schedule = sim::Schedule::Mixed;
    else throw ConfigError("field 'schedule' must be 'cycle' or 'mixed'");

    if (j.contains("environment")) {
        const json& e = j["environment"];
        auto& env = cfg.workload.env;
        env.families = value_or<int>(e, "families", env.families);
        if (env.families < 1)
            throw ConfigError("field 'environment.families' must be >= 1");
        env.family_tokens = value_or<int>(e, "family_tokens", env.family_tokens);
        env.instance_tokens =
            value_or<int>(e, "instance_tokens", env.instance_tokens);
        if (e.contains("sibling_overlap"))
            env.sibling_overlap = require_probability(e, "sibling_overlap");
        if (e.contains("p_guided")) env.p_guided = require_probability(e, "p_guided");
        if (e.contains("p_direct")) env.p_direct = require_probability(e, "p_direct");
        if (e.contains("p_explore"))
            env.p_explore = require_probability(e, "p_explore");
    }

    if (j.contains("router")) {
        const json& r = j["router"];
        cfg.workload.router_init.increment =
            value_or<double>(r, "increment", 0.5);
        cfg.workload.router_init.decay = value_or<double>(r, "decay", 0.5);
        cfg.workload.router_init.floor = value_or<double>(r, "floor", 1.0);
        cfg.workload.router_init.w_e = cfg.workload.router_init.floor;
        if (cfg.workload.router_init.increment <= 0.0)
            throw ConfigError("field 'router.increment' must be > 0");
        if (cfg.workload.router_init.decay <= 0.0 ||
            cfg.workload.router_init.decay >= 1.0)
            throw ConfigError("field 'router.decay' must lie in (0,1)");
    }

    if (j.contains("retrieval")) {
        const json& r = j["retrieval"];
        cfg.workload.options.retrieval_k = value_or<std::size_t>(r, "k", 3);
        if (cfg.workload.options.retrieval_k < 1)
            throw ConfigError("field 'retrieval.k' must be >= 1");
        cfg.workload.options.retrieval_tau = value_or<double>(r, "tau", 0.6);
        if (cfg.workload.options.retrieval_tau < -1.0 ||
            cfg.workload.options.retrieval_tau > 1.0)
            throw ConfigError("field 'retrieval.tau' must lie in [-1,1]");
        cfg.workload.options.embedding_dim =
            value_or<std::size_t>(r, "dimension", kDefaultEmbeddingDim);
        if (cfg.workload.options.embedding_dim < 1)
            throw ConfigError("field 'retrieval.dimension' must be >= 1");
    }

    if (j.contains("judge")) {
        const json& jd = j["judge"];
        cfg.judge_mode = value_or<std::string>(jd, "mode", "simulated");
        if (cfg.judge_mode != "simulated" && cfg.judge_mode != "llm")
            throw ConfigError("field 'judge.mode' must be 'simulated' or 'llm'");
        cfg.workload.judge_noise = value_or<double>(jd, "noise", 0.5);
        if (cfg.workload.judge_noise < 0.0)
            throw ConfigError("field 'judge.noise' must be >= 0");
    }

    if (j.contains("routing")) {
        const json& r = j["routing"];
        const std::string mode = value_or<std::string>(r, "mode", "online");
        if (mode == "online") {
            cfg.workload.options.fixed_alpha.reset();
        } else if (mode == "fixed") {
            cfg.workload.options.fixed_alpha = require_probability(r, "alpha");
        } else {
            throw ConfigError("field 'routing.mode' must be 'online' or 'fixed'");
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    return from_json(read_json_file(path));
}

json RunConfig::to_json() const {
    const auto& w = workload;
    json routing;
    if (w.options.fixed_alpha) {
        routing = {{"mode", "fixed"}, {"alpha", *w.options.fixed_alpha}};
    } else {
        routing = {{"mode", "online"}};
    }
    return json{
        {"seed", w.seed},
        {"out_dir", out_dir},
        {"tasks", w.tasks},
        {"agents", w.agents},
        {"stages", w.options.stages},
        {"schedule", w.schedule == sim::Schedule::Cycle ? "cycle" : "mixed"},
        {"environment",
         {{"families", w.env.families},
          {"family_tokens", w.env.family_tokens},
          {"instance_tokens", w.env.instance_tokens},
          {"sibling_overlap", w.env.sibling_overlap},
          {"p_guided", w.env.p_guided},
          {"p_direct", w.env.p_direct},
          {"p_explore", w.env.p_explore}}},
        {"router",
         {{"increment", w.router_init.increment},
          {"decay", w.router_init.decay},
          {"floor", w.router_init.floor}}},
        {"retrieval",
         {{"k", w.options.retrieval_k},
          {"tau", w.options.retrieval_tau},
          {"dimension", w.options.embedding_dim}}},
        {"judge", {{"mode", judge_mode}, {"noise", w.judge_noise}}},
        {"routing", routing},
    };
}

TheoryConfig TheoryConfig::from_json(const json& j) {
    TheoryConfig cfg;
    cfg.seed = value_or<std::uint64_t>(j, "seed", 7);
    cfg.out_dir = value_or<std::string>(j, "out_dir", "out");
    if (j.contains("reach")) {
        const json& r = j["reach"];
        cfg.reach.instances = value_or<std::size_t>(r, "instances", 100);
        cfg.reach.max_states = value_or<std::size_t>(r, "max_states", 200);
        if (cfg.reach.max_states < 2)
            throw ConfigError("field 'reach.max_states' must be >= 2");
        cfg.reach.alpha_max = value_or<double>(r, "alpha_max", 0.99);
        if (cfg.reach.alpha_max < 0.0 || cfg.reach.alpha_max >= 1.0)
            throw ConfigError("field 'reach.alpha_max' must lie in [0,1)");
        cfg.reach.tol = value_or<double>(r, "tol", 1e-10);
    }
    if (j.contains("regret")) {
        const json& r = j["regret"];
        cfg.regret.horizon = value_or<std::size_t>(r, "horizon", 100'000);
        cfg.regret.seeds = value_or<std::size_t>(r, "seeds", 200);
        if (cfg.regret.seeds < 1)
            throw ConfigError("field 'regret.seeds' must be >= 1");
        cfg.regret.fixed_alphas = value_or<std::vector<double>>(
            r, "fixed_alphas", std::vector<double>{0.5});
        cfg.regret.window_lo = value_or<std::size_t>(r, "window_lo", 1'000);
        cfg.regret.window_hi =
            value_or<std::size_t>(r, "window_hi", cfg.regret.horizon);
        if (cfg.regret.window_lo >= cfg.regret.window_hi)
            throw ConfigError("field 'regret.window_lo' must be < window_hi");
    }
    return cfg;
}

TheoryConfig TheoryConfig::load(const std::filesystem::path& path) {
    return from_json(read_json_file(path));
}

json TheoryConfig::to_json() const {
    return json{
        {"seed", seed},
        {"out_dir", out_dir},
        {"reach",
         {{"instances", reach.instances},
          {"max_states", reach.max_states},
          {"alpha_max", reach.alpha_max},
          {"tol", reach.tol}}},
        {"regret",
         {{"horizon", regret.horizon},
          {"seeds", regret.seeds},
          {"fixed_alphas", regret.fixed_alphas},
          {"window_lo", regret.window_lo},
          {"window_hi", regret.window_hi}}},
    };
}

} // namespace decentmem
