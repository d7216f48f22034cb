#include "decentmem/judge.hpp"
#include "decentmem/errors.hpp"
#include "decentmem/rng.hpp"

#include <json.hpp>

#include <algorithm>

namespace decentmem {

using nlohmann::json;

StageEvaluation parse_evaluation(const std::string& text, bool* clamped_out_of_range) {
    if (clamped_out_of_range) *clamped_out_of_range = false;

    // Scan for the first brace-balanced object that parses and carries a
    // score field; judges often wrap the object in explanatory prose.
    for (std::size_t start = text.find('{'); start != std::string::npos;
         start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                if (--depth == 0) {
                    json j = json::parse(text.substr(start, i - start + 1), nullptr,
                                         /*allow_exceptions=*/false);
                    if (j.is_discarded() || !j.is_object() ||
                        !j.contains("score") || !j["score"].is_number()) {
                        break; // try the next candidate object
                    }
                    StageEvaluation e;
                    e.score = j["score"].get<double>();
                    if (e.score < 0.0 || e.score > 10.0) {
                        e.score = std::clamp(e.score, 0.0, 10.0);
                        if (clamped_out_of_range) *clamped_out_of_range = true;
                    }
                    e.stage_quality = j.value("stage_quality", "");
                    e.reasoning = j.value("reasoning", "");
                    e.strengths = j.value("strengths", "");
                    e.weaknesses = j.value("weaknesses", "");
                    e.agent_coordination = j.value("agent_coordination", "");
                    return e;
                }
            }
        }
    }
    throw EvalParseError("no parsable evaluation object with a score field");
}

std::string render_evaluation(const StageEvaluation& e) {
    json j{
        {"score", e.score},
        {"stage_quality", e.stage_quality},
        {"reasoning", e.reasoning},
        {"strengths", e.strengths},
        {"weaknesses", e.weaknesses},
        {"agent_coordination", e.agent_coordination},
    };
    return j.dump(2);
}

StageEvaluation SimulatedJudge::operator()(const StageTranscript& t) const {
    double base;
    std::string quality;
    if (t.aggregate_correct) {
        base = kCorrectScore;
        quality = "excellent";
    } else if (t.agents_correct > 0) {
        base = kPartialScore;
        quality = "fair";
    } else {
        base = kIncorrectScore;
        quality = "poor";
    }
    double score = base;
    if (noise_amplitude > 0.0) {
        Rng rng(Rng::mix(seed, t.task_index * 64 + static_cast<std::uint64_t>(t.stage_index)));
        score += rng.uniform(-noise_amplitude, noise_amplitude);
    }
    score = std::clamp(score, 0.0, 10.0);

    StageEvaluation e;
    e.score = score;
    e.stage_quality = quality;
    e.reasoning = "simulated: " + std::to_string(t.agents_correct) + "/" +
                  std::to_string(t.agents_total) + " agents correct";
    e.strengths = t.aggregate_correct ? "aggregate matched the reference" : "";
    e.weaknesses = t.aggregate_correct ? "" : "aggregate missed the reference";
    e.agent_coordination = "simulated";
    return e;
}

} // namespace decentmem
