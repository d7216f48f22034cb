#include "decentmem/errors.hpp"
#include "decentmem/judge.hpp"

#include <doctest.h>

#include <cmath>

using namespace decentmem;

TEST_CASE("delta is the strict improvement indicator") {
    CHECK(delta(5.0, 6.0) == 1);
    CHECK(delta(5.0, 5.0) == 0); // ties are not improvements
    CHECK(delta(5.0, 4.9) == 0);
    CHECK(delta(5.0, 5.0 + 1e-9) == 1);
}

TEST_CASE("parse extracts the evaluation object from surrounding prose") {
    const std::string text =
        "Sure! Here is my evaluation of the stage:\n"
        "{\"score\": 7.5, \"stage_quality\": \"good\", \"reasoning\": \"solid "
        "decomposition\", \"strengths\": \"clear plan\", \"weaknesses\": \"slow\", "
        "\"agent_coordination\": \"smooth\"}\n"
        "Hope that helps.";
    const StageEvaluation e = parse_evaluation(text);
    CHECK(e.score == doctest::Approx(7.5));
    CHECK(e.stage_quality == "good");
    CHECK(e.reasoning == "solid decomposition");
    CHECK(e.strengths == "clear plan");
    CHECK(e.weaknesses == "slow");
    CHECK(e.agent_coordination == "smooth");
}

TEST_CASE("parse skips earlier objects without a score") {
    const std::string text =
        "Metadata: {\"model\": \"x\"} and now {\"score\": 3, \"reasoning\": \"ok\"}";
    const StageEvaluation e = parse_evaluation(text);
    CHECK(e.score == doctest::Approx(3.0));
    CHECK(e.reasoning == "ok");
}

TEST_CASE("parse handles braces inside string values") {
    const std::string text =
        "{\"score\": 4, \"reasoning\": \"used {curly} notation and a \\\" quote\"}";
    const StageEvaluation e = parse_evaluation(text);
    CHECK(e.score == doctest::Approx(4.0));
    CHECK(e.reasoning == "used {curly} notation and a \" quote");
}

TEST_CASE("out-of-range scores are clamped and flagged") {
    bool clamped = false;
    CHECK(parse_evaluation("{\"score\": 12.0}", &clamped).score == 10.0);
    CHECK(clamped);
    clamped = false;
    CHECK(parse_evaluation("{\"score\": -1.0}", &clamped).score == 0.0);
    CHECK(clamped);
    clamped = true;
    CHECK(parse_evaluation("{\"score\": 9.0}", &clamped).score == 9.0);
    CHECK_FALSE(clamped);
}

TEST_CASE("unparseable judge output raises EvalParseError") {
    CHECK_THROWS_AS(parse_evaluation("no json here"), EvalParseError);
    CHECK_THROWS_AS(parse_evaluation("{\"quality\": \"good\"}"), EvalParseError);
    CHECK_THROWS_AS(parse_evaluation("{\"score\": \"seven\"}"), EvalParseError);
    CHECK_THROWS_AS(parse_evaluation("{\"score\": 5"), EvalParseError); // unbalanced
}

TEST_CASE("render then parse is the identity") {
    StageEvaluation e;
    e.score = 8.25;
    e.stage_quality = "excellent";
    e.reasoning = "multi-line\nreasoning with \"quotes\"";
    e.strengths = "thorough";
    e.weaknesses = "verbose";
    e.agent_coordination = "tight";
    CHECK(parse_evaluation(render_evaluation(e)) == e);
}

TEST_CASE("simulated judge applies the scoring rubric exactly at zero noise") {
    SimulatedJudge judge{0.0, 42};
    StageTranscript t;
    t.agents_total = 3;

    t.aggregate_correct = true;
    t.agents_correct = 3;
    CHECK(judge(t).score == doctest::Approx(9.0));
    CHECK(judge(t).stage_quality == "excellent");

    t.aggregate_correct = false;
    t.agents_correct = 1;
    CHECK(judge(t).score == doctest::Approx(5.5));
    CHECK(judge(t).stage_quality == "fair");

    t.agents_correct = 0;
    CHECK(judge(t).score == doctest::Approx(2.0));
    CHECK(judge(t).stage_quality == "poor");
}

TEST_CASE("simulated judge noise is bounded and deterministic per stage") {
    SimulatedJudge judge{0.5, 7};
    StageTranscript t;
    t.agents_total = 3;
    t.agents_correct = 3;
    t.aggregate_correct = true;
    for (std::uint64_t task = 0; task < 50; ++task) {
        for (int stage = 1; stage <= 3; ++stage) {
            t.task_index = task;
            t.stage_index = stage;
            const double s1 = judge(t).score;
            const double s2 = judge(t).score; // pure function of the transcript
            CHECK(s1 == s2);
            CHECK(std::abs(s1 - 9.0) <= 0.5);
        }
    }
    // Different stages see different noise.
    t.task_index = 0;
    t.stage_index = 1;
    const double a = judge(t).score;
    t.stage_index = 2;
    const double b = judge(t).score;
    CHECK(a != b);
}

TEST_CASE("simulated judge output round trips through the wire format") {
    SimulatedJudge judge{0.5, 11};
    StageTranscript t;
    t.task_index = 4;
    t.stage_index = 2;
    t.agents_total = 3;
    t.agents_correct = 2;
    t.aggregate_correct = true;
    const StageEvaluation e = judge(t);
    CHECK(parse_evaluation(render_evaluation(e)) == e);
}
