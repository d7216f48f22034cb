#pragma once

#include "decentmem/embedding.hpp"
#include "decentmem/judge.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace decentmem {

/// Ollama-compatible endpoint. Paths are configurable so any server
/// speaking the same request/response shapes works (see docs/wire.md).
struct EndpointConfig {
    std::string base_url = "http://localhost:11434";
    std::string model_name = "qwen3:8b";
    std::string chat_path = "/api/chat";
    std::string embeddings_path = "/api/embeddings";
    double timeout_seconds = 60.0;
    int max_retries = 2;
    int retry_backoff_ms = 100; // doubles per retry

    void validate() const;

    /// DECENTMEM_BASE_URL / DECENTMEM_MODEL override config-file values.
    static EndpointConfig from_env();
    static EndpointConfig from_env(EndpointConfig base);
};

struct ChatExchange {
    std::string system_prompt;
    std::string user_prompt;
    std::string response;
    std::optional<long> prompt_tokens;
    std::optional<long> completion_tokens;
};

/// Single-turn completion. Retries transport failures and 5xx with
/// exponential backoff; 4xx fails immediately. Throws TransportError,
/// EndpointError, or MalformedResponseError.
ChatExchange chat(const EndpointConfig& cfg, const std::string& system,
                  const std::string& user);

/// Remote embedding, L2-normalized locally. expected_dim = 0 accepts any
/// dimension. Throws the same error kinds plus DimensionError.
EmbeddingVector embed_remote(const EndpointConfig& cfg, const std::string& text,
                             std::size_t expected_dim = 0);

EmbedderContract make_remote_embedder(EndpointConfig cfg, std::size_t dimension);

/// LLM-backed stage judge: sends the stage transcript through chat() and
/// parses the structured evaluation object from the reply.
EvaluatorContract make_llm_judge(EndpointConfig cfg);

/// Prompt assembly for the LLM judge (exposed for tests).
std::string judge_system_prompt();
std::string judge_user_prompt(const StageTranscript& t);

} // namespace decentmem
