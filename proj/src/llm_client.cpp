#include "decentmem/llm_client.hpp"
#include "decentmem/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace decentmem {

using nlohmann::json;

void EndpointConfig::validate() const {
    if (timeout_seconds <= 0.0) throw ConfigError("endpoint: timeout must be > 0");
    if (max_retries < 0) throw ConfigError("endpoint: retries must be >= 0");
    if (base_url.empty()) throw ConfigError("endpoint: base_url is empty");
}

EndpointConfig EndpointConfig::from_env() { return from_env(EndpointConfig{}); }

EndpointConfig EndpointConfig::from_env(EndpointConfig base) {
    if (const char* url = std::getenv("DECENTMEM_BASE_URL")) base.base_url = url;
    if (const char* model = std::getenv("DECENTMEM_MODEL")) base.model_name = model;
    return base;
}

namespace {

// POSTs with retry on transport errors and 5xx; 4xx is terminal.
json post_json(const EndpointConfig& cfg, const std::string& path, const json& body) {
    cfg.validate();
    httplib::Client client(cfg.base_url);
    const auto timeout =
        std::chrono::milliseconds(static_cast<long>(cfg.timeout_seconds * 1000.0));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(
                cfg.retry_backoff_ms * (1L << (attempt - 1))));
        }
        httplib::Result res = client.Post(path, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue; // transport error: retry
        }
        if (res->status >= 500) {
            last_error = "server returned status " + std::to_string(res->status);
            continue; // retry
        }
        if (res->status >= 400) {
            throw EndpointError("endpoint " + path + " returned status " +
                                    std::to_string(res->status),
                                res->status);
        }
        json parsed = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded()) {
            throw MalformedResponseError("endpoint " + path +
                                         ": response body is not valid JSON");
        }
        return parsed;
    }
    throw TransportError("endpoint " + path + " unreachable after " +
                         std::to_string(cfg.max_retries + 1) + " attempts: " +
                         last_error);
}

} // namespace

ChatExchange chat(const EndpointConfig& cfg, const std::string& system,
                  const std::string& user) {
    const json body{
        {"model", cfg.model_name},
        {"stream", false},
        {"messages",
         json::array({{{"role", "system"}, {"content", system}},
                      {{"role", "user"}, {"content", user}}})},
    };
    const json res = post_json(cfg, cfg.chat_path, body);
    if (!res.contains("message") || !res["message"].contains("content") ||
        !res["message"]["content"].is_string()) {
        throw MalformedResponseError("chat response missing message.content");
    }
    ChatExchange ex;
    ex.system_prompt = system;
    ex.user_prompt = user;
    ex.response = res["message"]["content"].get<std::string>();
    if (res.contains("prompt_eval_count") && res["prompt_eval_count"].is_number()) {
        const long n = res["prompt_eval_count"].get<long>();
        if (n >= 0) ex.prompt_tokens = n;
    }
    if (res.contains("eval_count") && res["eval_count"].is_number()) {
        const long n = res["eval_count"].get<long>();
        if (n >= 0) ex.completion_tokens = n;
    }
    return ex;
}

EmbeddingVector embed_remote(const EndpointConfig& cfg, const std::string& text,
                             std::size_t expected_dim) {
    const json body{{"model", cfg.model_name}, {"prompt", text}};
    const json res = post_json(cfg, cfg.embeddings_path, body);
    if (!res.contains("embedding") || !res["embedding"].is_array()) {
        throw MalformedResponseError("embeddings response missing embedding array");
    }
    auto values = res["embedding"].get<std::vector<double>>();
    if (expected_dim != 0 && values.size() != expected_dim) {
        throw DimensionError("remote embedding has dimension " +
                             std::to_string(values.size()) + ", expected " +
                             std::to_string(expected_dim));
    }
    double norm2 = 0.0;
    for (double v : values) norm2 += v * v;
    if (norm2 == 0.0) {
        throw MalformedResponseError("remote embedding is the zero vector");
    }
    return EmbeddingVector(std::move(values)); // normalizes
}

EmbedderContract make_remote_embedder(EndpointConfig cfg, std::size_t dimension) {
    return EmbedderContract{
        [cfg, dimension](const std::string& text) {
            return embed_remote(cfg, text, dimension);
        },
        dimension};
}

std::string judge_system_prompt() {
    return "You are an expert evaluator. Evaluate the overall quality of work "
           "done in this stage and respond ONLY with a JSON object of the form "
           "{\"score\": <0-10>, \"stage_quality\": \"<poor/fair/good/excellent>\", "
           "\"reasoning\": \"...\", \"strengths\": \"...\", \"weaknesses\": \"...\", "
           "\"agent_coordination\": \"...\"}";
}

std::string judge_user_prompt(const StageTranscript& t) {
    std::string criteria;
    switch (t.stage_index) {
        case 1:
            criteria = "problem understanding, decomposition quality, solution "
                       "clarity, and whether this stage laid a good foundation";
            break;
        case 2:
            criteria = "processing quality, building on the previous stage, task "
                       "allocation, and coherence of the intermediate solutions";
            break;
        default:
            criteria = "refinement quality, integration of all previous work, "
                       "completeness, and final answer quality";
            break;
    }
    return "STAGE " + std::to_string(t.stage_index) + " of task " +
           std::to_string(t.task_index) + ". Agents involved: " +
           std::to_string(t.agents_total) + ", of which " +
           std::to_string(t.agents_correct) +
           " produced the aggregate answer. Evaluate this stage on: " + criteria +
           ".";
}

EvaluatorContract make_llm_judge(EndpointConfig cfg) {
    return EvaluatorContract{[cfg](const StageTranscript& t) {
        const ChatExchange ex = chat(cfg, judge_system_prompt(), judge_user_prompt(t));
        return parse_evaluation(ex.response);
    }};
}

} // namespace decentmem
