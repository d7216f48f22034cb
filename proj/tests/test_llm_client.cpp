#include "decentmem/errors.hpp"
#include "decentmem/llm_client.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <string>
#include <thread>

using namespace decentmem;
using nlohmann::json;

namespace {

// One mock endpoint per suite run; routes emulate the wire protocol.
struct MockServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> flaky_calls{0};
    std::atomic<int> missing_calls{0};

    MockServer() {
        server.Post("/api/chat", [](const httplib::Request& req,
                                    httplib::Response& res) {
            const json body = json::parse(req.body);
            REQUIRE(body.at("model").is_string());
            REQUIRE(body.at("messages").size() == 2);
            REQUIRE(body["messages"][0]["role"] == "system");
            REQUIRE(body["messages"][1]["role"] == "user");
            const json reply{
                {"message", {{"role", "assistant"}, {"content", "echo: pong"}}},
                {"prompt_eval_count", 12},
                {"eval_count", 34},
            };
            res.set_content(reply.dump(), "application/json");
        });
        server.Post("/judge", [](const httplib::Request&, httplib::Response& res) {
            const json reply{{"message",
                              {{"content", "Evaluation follows. {\"score\": 8.5, "
                                           "\"stage_quality\": \"good\", "
                                           "\"reasoning\": \"coherent\"}"}}}};
            res.set_content(reply.dump(), "application/json");
        });
        server.Post("/flaky", [this](const httplib::Request&, httplib::Response& res) {
            if (flaky_calls.fetch_add(1) < 2) {
                res.status = 500;
                res.set_content("overloaded", "text/plain");
                return;
            }
            const json reply{{"message", {{"content", "recovered"}}}};
            res.set_content(reply.dump(), "application/json");
        });
        server.Post("/missing", [this](const httplib::Request&, httplib::Response& res) {
            missing_calls.fetch_add(1);
            res.status = 404;
            res.set_content("no such model", "text/plain");
        });
        server.Post("/notjson", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html>definitely not json</html>", "text/html");
        });
        server.Post("/api/embeddings",
                    [](const httplib::Request& req, httplib::Response& res) {
                        const json body = json::parse(req.body);
                        REQUIRE(body.at("prompt").is_string());
                        res.set_content(json{{"embedding", {3.0, 4.0}}}.dump(),
                                        "application/json");
                    });
        server.Post("/zero", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(json{{"embedding", {0.0, 0.0}}}.dump(),
                            "application/json");
        });

        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~MockServer() {
        server.stop();
        thread.join();
    }

    EndpointConfig config() const {
        EndpointConfig cfg;
        cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
        cfg.model_name = "mock-model";
        cfg.timeout_seconds = 5.0;
        cfg.max_retries = 2;
        cfg.retry_backoff_ms = 1;
        return cfg;
    }
};

} // namespace

TEST_CASE("llm client against a mock endpoint") {
    MockServer mock;

    SUBCASE("chat round trip with token counts") {
        const ChatExchange ex = chat(mock.config(), "be brief", "ping");
        CHECK(ex.response == "echo: pong");
        CHECK(ex.system_prompt == "be brief");
        CHECK(ex.user_prompt == "ping");
        REQUIRE(ex.prompt_tokens.has_value());
        REQUIRE(ex.completion_tokens.has_value());
        CHECK(*ex.prompt_tokens == 12);
        CHECK(*ex.completion_tokens == 34);
    }

    SUBCASE("transient 5xx responses are retried until success") {
        EndpointConfig cfg = mock.config();
        cfg.chat_path = "/flaky";
        const ChatExchange ex = chat(cfg, "s", "u"); // 500, 500, then 200
        CHECK(ex.response == "recovered");
        CHECK(mock.flaky_calls.load() == 3);
    }

    SUBCASE("4xx responses fail immediately without retries") {
        EndpointConfig cfg = mock.config();
        cfg.chat_path = "/missing";
        try {
            chat(cfg, "s", "u");
            FAIL("expected EndpointError");
        } catch (const EndpointError& e) {
            CHECK(e.status == 404);
        }
        CHECK(mock.missing_calls.load() == 1);
    }

    SUBCASE("unparseable response bodies are malformed, not retried") {
        EndpointConfig cfg = mock.config();
        cfg.chat_path = "/notjson";
        CHECK_THROWS_AS(chat(cfg, "s", "u"), MalformedResponseError);
    }

    SUBCASE("unreachable endpoints exhaust retries with a transport error") {
        EndpointConfig cfg = mock.config();
        cfg.base_url = "http://127.0.0.1:1"; // nothing listens here
        cfg.timeout_seconds = 0.5;
        CHECK_THROWS_AS(chat(cfg, "s", "u"), TransportError);
    }

    SUBCASE("remote embeddings are normalized locally") {
        const EmbeddingVector v = embed_remote(mock.config(), "some text");
        REQUIRE(v.dimension() == 2);
        CHECK(v.values()[0] == doctest::Approx(0.6).epsilon(1e-14)); // 3/5
        CHECK(v.values()[1] == doctest::Approx(0.8).epsilon(1e-14)); // 4/5
    }

    SUBCASE("remote embedding dimension is enforced") {
        CHECK_THROWS_AS(embed_remote(mock.config(), "some text", 3), DimensionError);
        const auto embedder = make_remote_embedder(mock.config(), 2);
        CHECK(embedder.embed("x").dimension() == 2);
    }

    SUBCASE("zero-vector embeddings are rejected as malformed") {
        EndpointConfig cfg = mock.config();
        cfg.embeddings_path = "/zero";
        CHECK_THROWS_AS(embed_remote(cfg, "text"), MalformedResponseError);
    }

    SUBCASE("llm judge parses the evaluation out of prose") {
        EndpointConfig cfg = mock.config();
        cfg.chat_path = "/judge";
        const EvaluatorContract judge = make_llm_judge(cfg);
        StageTranscript t;
        t.task_index = 2;
        t.stage_index = 2;
        t.agents_total = 3;
        t.agents_correct = 2;
        const StageEvaluation e = judge.evaluate(t);
        CHECK(e.score == doctest::Approx(8.5));
        CHECK(e.stage_quality == "good");
    }
}

TEST_CASE("judge prompts carry the schema and the stage context") {
    const std::string sys = judge_system_prompt();
    CHECK(sys.find("\"score\"") != std::string::npos);
    CHECK(sys.find("agent_coordination") != std::string::npos);

    StageTranscript t;
    t.task_index = 41;
    t.stage_index = 2;
    t.agents_total = 3;
    t.agents_correct = 1;
    const std::string user = judge_user_prompt(t);
    CHECK(user.find("STAGE 2") != std::string::npos);
    CHECK(user.find("41") != std::string::npos);
    // Stage-specific criteria differ.
    StageTranscript t3 = t;
    t3.stage_index = 3;
    CHECK(judge_user_prompt(t3) != user);
}

TEST_CASE("endpoint config validation and environment overrides") {
    EndpointConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.timeout_seconds = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    setenv("DECENTMEM_BASE_URL", "http://example.test:9999", 1);
    setenv("DECENTMEM_MODEL", "other-model", 1);
    const EndpointConfig env = EndpointConfig::from_env();
    CHECK(env.base_url == "http://example.test:9999");
    CHECK(env.model_name == "other-model");
    unsetenv("DECENTMEM_BASE_URL");
    unsetenv("DECENTMEM_MODEL");
}
