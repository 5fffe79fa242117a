#include <doctest.h>

#include "atceval/baseline_parser.hpp"
#include "atceval/classification_metrics.hpp"
#include "atceval/matching.hpp"
#include "atceval/perturbation.hpp"

using namespace atceval;

TEST_CASE("taxi instruction with a hold-short boundary") {
  auto r = parse_transcript(
      "singapore three two one taxi via alpha bravo hold short of runway zero two left");
  const Prediction& p = r.prediction;
  REQUIRE(p.action);
  CHECK(p.action->action_type == ActionType::Taxi);
  CHECK(p.action->slots.at("callsign") == "singapore 321");
  CHECK(p.action->slots.at("taxiway") == "a b");
  CHECK(p.action->slots.at("boundary") == "runway 02l");
  CHECK(p.speaker == Speaker::Controller);
  CHECK(p.intent == Intent::Instruction);
  CHECK_FALSE(r.trace.matched_rules.empty());
}

TEST_CASE("greeting without a callsign") {
  auto p = parse_transcript("good morning ground").prediction;
  REQUIRE(p.action);
  CHECK(p.action->action_type == ActionType::Greet);
  CHECK_FALSE(p.action->slots.count("callsign"));
}

TEST_CASE("empty transcript") {
  auto r = parse_transcript("");
  REQUIRE(r.prediction.action);
  CHECK(r.prediction.action->action_type == ActionType::Unknown);
  CHECK(r.prediction.action->slots.empty());
  CHECK(r.prediction.entities.empty());
  CHECK(r.trace.normalized.empty());
}

TEST_CASE("parsing is deterministic and normalization is idempotent") {
  Corpus c = generate_synthetic_corpus(21, 150);
  for (const auto& u : c.utterances) {
    auto a = parse_transcript(u.transcript);
    auto b = parse_transcript(u.transcript);
    CHECK(a.prediction == b.prediction);
    CHECK(a.trace == b.trace);
    auto again = parse_transcript(a.trace.normalized);
    CHECK(again.trace.normalized == a.trace.normalized);
    CHECK(again.prediction == a.prediction);
  }
}

TEST_CASE("every filled slot also appears as an entity of its type") {
  const WeightConfig cfg = default_weight_config();
  Corpus c = generate_synthetic_corpus(22, 150);
  auto corrupt = default_noise_profile();
  corrupt.target_wer = 0.3;
  corrupt.seed = 4;
  Corpus noisy = perturb_corpus(c, corrupt);
  for (const Corpus* corpus : {&c, &noisy}) {
    for (const auto& u : corpus->utterances) {
      auto p = parse_transcript(u.transcript).prediction;
      REQUIRE(p.action);
      for (const auto& [slot, value] : p.action->slots) {
        auto it = cfg.slot_entity_map.find({p.action->action_type, slot});
        if (it == cfg.slot_entity_map.end()) continue;
        bool found = false;
        for (const auto& e : p.entities) {
          found |= e.entity_type == it->second && token_overlap(tokenize(e.text), tokenize(value)) == 1.0;
        }
        INFO(u.transcript, " slot ", slot);
        CHECK(found);
      }
    }
  }
}

TEST_CASE("self test on clean synthetic data") {
  auto r = self_test_against(generate_synthetic_corpus(1, 500));
  CHECK(r.action_risk_score >= 0.95);
  CHECK(r.risk_strict >= 0.90);
}

TEST_CASE("blank transcripts are never strictly correct") {
  Corpus c = generate_synthetic_corpus(3, 50);
  for (auto& u : c.utterances) u.transcript = "";
  PredictionSet ps = parse_corpus(c);
  CHECK(risk_strict(c, ps, default_weight_config()) == 0.0);
}

TEST_CASE("noise lowers the score") {
  const WeightConfig cfg = default_weight_config();
  Corpus c = generate_synthetic_corpus(9, 300);
  auto profile = default_noise_profile();
  profile.target_wer = 0.3;
  Corpus noisy = perturb_corpus(c, profile);
  PredictionSet clean_preds = parse_corpus(c);
  PredictionSet noisy_preds = parse_corpus(noisy, default_lexicon(), cfg, 4);
  CHECK(action_risk_score(c, noisy_preds, cfg) < action_risk_score(c, clean_preds, cfg));
  CHECK(entity_macro_f1(c, noisy_preds, cfg) < entity_macro_f1(c, clean_preds, cfg));
}

TEST_CASE("parallel parse equals serial parse") {
  Corpus c = generate_synthetic_corpus(10, 400);
  CHECK(parse_corpus(c, default_lexicon(), default_weight_config(), 1) ==
        parse_corpus(c, default_lexicon(), default_weight_config(), 8));
}

TEST_CASE("lexicon") {
  CHECK(validate_lexicon(default_lexicon()).empty());
  PhraseLexicon broken = default_lexicon();
  broken.phonetic_alphabet.erase("zulu");
  CHECK_FALSE(validate_lexicon(broken).empty());
  CHECK(lexicon_from_json(to_json(default_lexicon())).phonetic_alphabet ==
        default_lexicon().phonetic_alphabet);
  CHECK(spoken_digits("321") == "three two one");
  CHECK(spoken_digit('9') == "niner");
  CHECK(spoken_runway("02l") == "zero two left");
  CHECK(spoken_designator("e1") == "echo one");
  CHECK(spoken_frequency("121.85") == "one two one decimal eight five");
}
