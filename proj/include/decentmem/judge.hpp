#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace decentmem {

/// Structured judge output for one stage.
struct StageEvaluation {
    double score = 0.0; // q in [0, 10]
    std::string stage_quality; // poor / fair / good / excellent
    std::string reasoning;
    std::string strengths;
    std::string weaknesses;
    std::string agent_coordination;

    bool operator==(const StageEvaluation&) const = default;
};

/// Improvement indicator: 1 iff q_curr strictly exceeds q_prev.
inline int delta(double q_prev, double q_curr) {
    return q_curr > q_prev ? 1 : 0;
}

/// Extracts the evaluation object from judge output, tolerating
/// surrounding prose. Scores outside [0,10] are clamped (with
/// clamped_out_of_range set so callers can log it). Throws
/// EvalParseError when no object or no score field is found.
StageEvaluation parse_evaluation(const std::string& text,
                                 bool* clamped_out_of_range = nullptr);

/// Renders an evaluation back to its JSON object form;
/// parse_evaluation(render_evaluation(e)) == e.
std::string render_evaluation(const StageEvaluation& e);

/// What the simulated judge sees for one stage.
struct StageTranscript {
    std::uint64_t task_index = 0;
    int stage_index = 1;
    int agents_total = 0;
    int agents_correct = 0;
    bool aggregate_correct = false;
};

struct EvaluatorContract {
    std::function<StageEvaluation(const StageTranscript&)> evaluate;
};

/// Deterministic stand-in for the LLM evaluator. Scores the stage's
/// aggregate correctness against the environment's hidden answer
/// (correct 9.0, partially correct 5.5, incorrect 2.0) plus bounded
/// seeded noise, clamped to [0, 10].
struct SimulatedJudge {
    double noise_amplitude = 0.5;
    std::uint64_t seed = 0;

    StageEvaluation operator()(const StageTranscript& t) const;

    static constexpr double kCorrectScore = 9.0;
    static constexpr double kPartialScore = 5.5;
    static constexpr double kIncorrectScore = 2.0;
};

} // namespace decentmem
