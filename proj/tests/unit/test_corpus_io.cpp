#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "atceval/corpus_io.hpp"

using namespace atceval;

namespace {

const char* kHeader = R"({"format":"atc-corpus","version":1,"metadata":{"source":"test"}})";

std::string record(const std::string& id, const std::string& action = "STANDBY",
                   const std::string& risk = "LOW") {
  return R"({"id":")" + id + R"(","transcript":"thai four standby","speaker":"CONTROLLER",)"
         R"("intent":"INSTRUCTION","action":{"type":")" + action +
         R"(","slots":{"callsign":"thai 4"}},"entities":[{"type":"CALLSIGN","text":"thai 4"}],)"
         R"("risk_level":")" + risk + R"("})";
}

Corpus load(const std::string& text) {
  std::istringstream in(text);
  return load_corpus(in);
}

std::string error_of(const std::string& text) {
  try {
    load(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("three records load in file order") {
  Corpus c = load(std::string(kHeader) + "\n" + record("b") + "\n" + record("a") + "\n" +
                  record("c") + "\n");
  REQUIRE(c.size() == 3);
  CHECK(c.utterances[0].id == "b");
  CHECK(c.utterances[1].id == "a");
  CHECK(c.utterances[2].id == "c");
  CHECK(c.metadata.at("source") == "test");
}

TEST_CASE("duplicate id names the id") {
  auto msg = error_of(std::string(kHeader) + "\n" + record("u7") + "\n" + record("u7") + "\n");
  CHECK(msg.find("u7") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("HOLD claiming LOW risk is rejected") {
  auto bad = R"({"id":"h","transcript":"x hold position","speaker":"CONTROLLER","intent":"INSTRUCTION",)"
             R"("action":{"type":"HOLD","slots":{}},"entities":[],"risk_level":"LOW"})";
  auto msg = error_of(std::string(kHeader) + "\n" + bad + "\n");
  CHECK(msg.find("HIGH") != std::string::npos);
}

TEST_CASE("malformed lines and headers") {
  CHECK(error_of("").find("missing header") != std::string::npos);
  CHECK(error_of(std::string(kHeader) + "\n{not json\n").find("line 2") != std::string::npos);
  CHECK(error_of(record("a") + "\n").find("format") != std::string::npos);
  auto no_field = std::string(kHeader) + "\n" + R"({"id":"q","speaker":"PILOT"})" + "\n";
  CHECK(error_of(no_field).find("line 2") != std::string::npos);
}

TEST_CASE("validate_corpus lists every violation") {
  std::istringstream in(std::string(kHeader) + "\n" + record("a") + "\n" + record("a") + "\n" +
                        record("b", "HOLD", "LOW") + "\n{bad\n");
  auto v = validate_corpus(in);
  CHECK(v.size() == 3);
}

TEST_CASE("round trip keeps unknown extra slots") {
  Corpus c = generate_synthetic_corpus(3, 40);
  c.utterances[0].action.slots["note"] = "extra, not scored";
  c.metadata["id"] = "rt";
  CHECK(load(corpus_to_string(c)) == c);
  CHECK(corpus_hash(load(corpus_to_string(c))) == corpus_hash(c));
}

TEST_CASE("predictions: empty, duplicate, missing action") {
  std::istringstream empty("");
  CHECK(load_predictions(empty).predictions.empty());

  std::istringstream dup(R"({"utterance_id":"u1"})" "\n" R"({"utterance_id":"u1"})" "\n");
  try {
    load_predictions(dup);
    FAIL("expected a duplicate error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("u1") != std::string::npos);
  }

  std::istringstream no_action(R"({"format":"atc-predictions","version":1,"model_name":"m"})" "\n"
                               R"({"utterance_id":"u1","speaker":"PILOT"})" "\n");
  PredictionSet ps = load_predictions(no_action);
  CHECK(ps.model_name == "m");
  REQUIRE(ps.find("u1"));
  CHECK_FALSE(ps.find("u1")->action);
  CHECK(ps.find("u1")->speaker == Speaker::Pilot);
}

TEST_CASE("prediction sets round trip") {
  PredictionSet ps;
  ps.model_name = "x";
  Prediction p;
  p.utterance_id = "u1";
  p.action = ActionAnnotation{ActionType::Taxi, {{"taxiway", "a e1"}}};
  p.latency_seconds = 1.0 / 3.0;
  ps.predictions["u1"] = p;
  std::ostringstream out;
  write_predictions(out, ps);
  std::istringstream in(out.str());
  CHECK(load_predictions(in) == ps);
}

TEST_CASE("atomic write replaces the target") {
  auto dir = std::filesystem::temp_directory_path() / "atceval_io_test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "f.txt").string();
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  CHECK(read_file(path) == "two");
  CHECK_THROWS_AS(read_file((dir / "missing").string()), IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("template parse: clean TAXI answer with five slots") {
  const char* raw =
      "SPEAKER: CONTROLLER\n"
      "INTENT: INSTRUCTION\n"
      "ACTION: TAXI\n"
      "SLOTS:\n"
      "- callsign: singapore 321\n"
      "- taxiway: a b\n"
      "- boundary: runway 02l\n"
      "- qualifier: left\n"
      "- runway: 02l\n"
      "ENTITIES:\n"
      "- CALLSIGN: singapore 321\n"
      "- TAXIWAY: a b\n";
  auto out = parse_model_output(raw, "u1");
  CHECK(out.diagnostics.empty());
  CHECK(out.populated.size() == 4);
  const Prediction& p = out.prediction;
  CHECK(p.utterance_id == "u1");
  CHECK(p.speaker == Speaker::Controller);
  CHECK(p.intent == Intent::Instruction);
  REQUIRE(p.action);
  CHECK(p.action->action_type == ActionType::Taxi);
  CHECK(p.action->slots.size() == 5);
  CHECK(p.action->slots.at("boundary") == "runway 02l");
  CHECK(p.entities.size() == 2);
}

TEST_CASE("template parse: unknown action label") {
  auto out = parse_model_output("SPEAKER: PILOT\nINTENT: READBACK\nACTION: TAXIING\nENTITIES:\n", "u");
  CHECK_FALSE(out.prediction.action);
  bool found = false;
  for (const auto& [field, problem] : out.diagnostics) {
    if (field == "action") {
      found = true;
      CHECK(problem.find("unknown action type") != std::string::npos);
    }
  }
  CHECK(found);
  CHECK(out.prediction.speaker == Speaker::Pilot);
}

TEST_CASE("template parse: empty response") {
  auto out = parse_model_output("", "u");
  CHECK(out.diagnostics.size() == 1);
  CHECK_FALSE(out.prediction.speaker);
  CHECK_FALSE(out.prediction.intent);
  CHECK_FALSE(out.prediction.action);
  CHECK(out.prediction.entities.empty());
  CHECK(out.populated.empty());
}

TEST_CASE("template parse: populated fields are exactly those without a diagnostic") {
  const std::vector<std::string> responses = {
      "",
      "no template here at all",
      "SPEAKER: pilot",
      "**Speaker:** Controller\n**Intent:** greet\nAction: GREET\nSlots:\n- callsign: thai 4\n",
      "SPEAKER: ROBOT\nINTENT: INFORM\nACTION: HOLD; callsign: x\nENTITIES:\n- PLANE: x\n- GATE: b5",
      "ACTION:\nSLOTS:\n- callsign singapore\nENTITIES: none",
      "intent: readback\nentities:\n- runway: 02l\n- callsign: qantas 18\naction: contact",
  };
  for (const auto& r : responses) {
    INFO(r);
    auto out = parse_model_output(r, "u");
    std::set<std::string> diagnosed;
    for (const auto& [field, problem] : out.diagnostics) {
      if (field == "response") {
        for (const char* f : kTemplateFields) diagnosed.insert(f);
      } else if (field.find('.') == std::string::npos) {
        diagnosed.insert(field);
      }
    }
    for (const char* f : kTemplateFields) {
      CHECK(out.populated.count(f) + diagnosed.count(f) == 1);
    }
  }
}

TEST_CASE("rendered predictions parse back") {
  Corpus c = generate_synthetic_corpus(11, 60);
  for (const auto& u : c.utterances) {
    Prediction p;
    p.utterance_id = u.id;
    p.speaker = u.speaker;
    p.intent = u.intent;
    p.action = u.action;
    p.entities = u.entities;
    auto out = parse_model_output(render_model_output(p), u.id);
    CHECK(out.diagnostics.empty());
    CHECK(out.prediction == p);
  }
}

TEST_CASE("prompt template") {
  const auto& t = canonical_prompt_template();
  CHECK(t.find("{{transcript}}") != std::string::npos);
  auto prompt = render_prompt(t, "thai four standby");
  CHECK(prompt.find("thai four standby") != std::string::npos);
  CHECK(prompt.find("{{transcript}}") == std::string::npos);
}

TEST_CASE("synthetic corpus composition") {
  Corpus c = generate_synthetic_corpus(1, 100, {0.48, 0.26, 0.26});
  std::map<RiskLevel, int> counts;
  for (const auto& u : c.utterances) counts[u.risk_level]++;
  CHECK(counts[RiskLevel::High] == 48);
  CHECK(counts[RiskLevel::Medium] == 26);
  CHECK(counts[RiskLevel::Low] == 26);

  CHECK(corpus_to_string(generate_synthetic_corpus(5, 200)) ==
        corpus_to_string(generate_synthetic_corpus(5, 200)));
  CHECK(corpus_to_string(generate_synthetic_corpus(5, 200)) !=
        corpus_to_string(generate_synthetic_corpus(6, 200)));

  Corpus one = generate_synthetic_corpus(1, 1, {1.0, 0.0, 0.0});
  REQUIRE(one.size() == 1);
  const ActionType a = one.utterances[0].action.action_type;
  CHECK((a == ActionType::Hold || a == ActionType::Taxi || a == ActionType::GiveWay));

  CHECK_THROWS_AS(generate_synthetic_corpus(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_synthetic_corpus(1, 10, {0.5, 0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("risk_counts uses largest remainder") {
  auto c = risk_counts(7, {0.5, 0.25, 0.25});
  CHECK(c[RiskLevel::High] + c[RiskLevel::Medium] + c[RiskLevel::Low] == 7);
  CHECK(c[RiskLevel::High] == 3);
  CHECK(c[RiskLevel::Medium] == 2);
  CHECK(c[RiskLevel::Low] == 2);
}

TEST_CASE("synthetic corpora always pass load-time validation") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Corpus c = generate_synthetic_corpus(seed, 1 + seed * 7, {0.2, 0.3, 0.5});
    std::istringstream in(corpus_to_string(c));
    CHECK(validate_corpus(in).empty());
  }
}
