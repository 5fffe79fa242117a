#include <doctest.h>

#include <algorithm>
#include <random>

#include "atceval/classification_metrics.hpp"
#include "atceval/risk_scoring.hpp"
#include "oracle/oracle.hpp"
#include "oracle/random_cases.hpp"

using namespace atceval;

namespace {

Utterance utt(const std::string& id, ActionType a, std::map<std::string, std::string> slots,
              std::vector<EntitySpan> entities = {}) {
  Utterance u;
  u.id = id;
  u.transcript = "x";
  u.speaker = Speaker::Controller;
  u.intent = Intent::Instruction;
  u.action = {a, std::move(slots)};
  u.risk_level = default_weight_config().risk_of(a);
  u.entities = std::move(entities);
  return u;
}

Prediction pred(const std::string& id, std::optional<ActionAnnotation> a,
                std::vector<EntitySpan> entities = {}) {
  Prediction p;
  p.utterance_id = id;
  p.action = std::move(a);
  p.entities = std::move(entities);
  return p;
}

PredictionSet set_of(std::vector<Prediction> ps) {
  PredictionSet out;
  for (auto& p : ps) out.predictions[p.utterance_id] = p;
  return out;
}

}  // namespace

TEST_CASE("HOLD with the callsign right and the boundary missed") {
  const WeightConfig cfg = default_weight_config();
  auto gt = utt("h", ActionType::Hold, {{"callsign", "singapore 321"}, {"boundary", "runway 02l"}});
  auto p = pred("h", ActionAnnotation{ActionType::Hold, {{"callsign", "singapore 321"}}});
  auto s = score_utterance(gt, &p, cfg);
  CHECK(s.type_correct);
  CHECK(s.r_coef == 1.0);
  CHECK(s.score == doctest::Approx(1.0 / 1.95).epsilon(1e-12));
  CHECK(s.score == doctest::Approx(0.51282).epsilon(1e-5));
  CHECK_FALSE(s.strict);
}

TEST_CASE("wrong type keeps 1 - rho of the slot credit") {
  const WeightConfig cfg = default_weight_config();
  auto contact = utt("c", ActionType::Contact, {{"callsign", "thai 4"}, {"frequency", "121.85"}});
  auto p = pred("c", ActionAnnotation{ActionType::Inform, contact.action.slots});
  auto s = score_utterance(contact, &p, cfg);
  CHECK(s.r_coef == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(s.score == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_FALSE(s.strict);

  auto taxi = utt("t", ActionType::Taxi, {{"callsign", "qantas 18"}, {"taxiway", "a e1"}});
  auto q = pred("t", ActionAnnotation{ActionType::Hold, taxi.action.slots});
  CHECK(score_utterance(taxi, &q, cfg).score == 0.0);
}

TEST_CASE("missing prediction scores zero and is not strict") {
  const WeightConfig cfg = default_weight_config();
  auto gt = utt("s", ActionType::Standby, {{"callsign", "thai 4"}});
  auto s = score_utterance(gt, nullptr, cfg);
  CHECK(s.score == 0.0);
  CHECK_FALSE(s.strict);
  auto empty = pred("s", std::nullopt);
  CHECK(score_utterance(gt, &empty, cfg).score == 0.0);
}

TEST_CASE("no annotated critical slots: type correctness decides") {
  const WeightConfig cfg = default_weight_config();
  auto gt = utt("g", ActionType::Greet, {});
  auto right = pred("g", ActionAnnotation{ActionType::Greet, {}});
  auto s = score_utterance(gt, &right, cfg);
  CHECK(s.score == 1.0);
  CHECK(s.strict);
  auto wrong = pred("g", ActionAnnotation{ActionType::Inform, {}});
  s = score_utterance(gt, &wrong, cfg);
  CHECK(s.score == 0.0);
  CHECK_FALSE(s.strict);
}

TEST_CASE("hallucinated critical slots break strict correctness only") {
  const WeightConfig cfg = default_weight_config();
  auto gt = utt("t", ActionType::Taxi, {{"callsign", "x 1"}, {"taxiway", "a"}});
  auto p = pred("t", ActionAnnotation{ActionType::Taxi, {{"callsign", "x 1"}, {"taxiway", "a"},
                                                          {"runway", "02l"}}});
  auto s = score_utterance(gt, &p, cfg);
  CHECK(s.score == 1.0);
  CHECK(s.hallucinated_slots == 1);
  CHECK_FALSE(s.strict);
}

TEST_CASE("RW-ER: callsign found, greeting missed") {
  const WeightConfig cfg = default_weight_config();
  Corpus c;
  c.utterances = {utt("1", ActionType::Greet, {},
                      {make_entity_span(EntityType::Callsign, "thai 4"),
                       make_entity_span(EntityType::Greet, "good day")})};
  auto ps = set_of({pred("1", std::nullopt, {make_entity_span(EntityType::Callsign, "thai 4")})});
  CHECK(rw_er(c, ps, cfg) == doctest::Approx(1.0 / 1.05).epsilon(1e-12));

  Corpus none;
  none.utterances = {utt("1", ActionType::Greet, {})};
  try {
    rw_er(none, ps, cfg);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("no weighted ground truth") != std::string::npos);
  }
}

TEST_CASE("corpus mean, strict share and strata") {
  const WeightConfig cfg = default_weight_config();
  Corpus two;
  two.utterances = {utt("a", ActionType::Standby, {{"callsign", "thai 4"}}),
                    utt("b", ActionType::Contact, {{"callsign", "thai 4"}})};
  auto ps = set_of({pred("a", ActionAnnotation{ActionType::Standby, {{"callsign", "thai 4"}}}),
                    pred("b", ActionAnnotation{ActionType::Inform, {{"callsign", "thai 4"}}})});
  CHECK(action_risk_score(two, ps, cfg) == doctest::Approx(0.7).epsilon(1e-12));

  Corpus ten;
  PredictionSet tp;
  for (int i = 0; i < 10; ++i) {
    auto id = std::to_string(i);
    ten.utterances.push_back(utt(id, ActionType::Standby, {{"callsign", "thai " + id}}));
    tp.predictions[id] = pred(id, ActionAnnotation{ActionType::Standby,
                                                   {{"callsign", i < 3 ? "thai " + id : "x"}}});
  }
  CHECK(risk_strict(ten, tp, cfg) == doctest::Approx(0.3).epsilon(1e-12));

  Corpus high;
  high.utterances = {utt("1", ActionType::Hold, {{"callsign", "a 1"}, {"boundary", "b"}}),
                     utt("2", ActionType::Taxi, {{"callsign", "a 2"}, {"taxiway", "c"}})};
  auto hp = set_of({pred("1", ActionAnnotation{ActionType::Hold, {{"callsign", "a 1"}, {"boundary", "b"}}}),
                    pred("2", ActionAnnotation{ActionType::Hold, {{"callsign", "a 2"}, {"taxiway", "z"}}})});
  auto strata = risk_stratified(high, hp, cfg);
  REQUIRE(strata.count(RiskLevel::High));
  CHECK(strata.at(RiskLevel::High).type_accuracy == 0.5);
  CHECK(strata.at(RiskLevel::High).slot_accuracy == 0.75);
  CHECK(strata.at(RiskLevel::High).utterances == 2);
  CHECK(strata.at(RiskLevel::High).slot_instances == 4);

  Corpus empty;
  CHECK_THROWS_AS(action_risk_score(empty, ps, cfg), ValidationError);
}

TEST_CASE("scores agree with the reference on random corpora") {
  const WeightConfig cfg = default_weight_config();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    oracle::CaseMaker maker(seed);
    auto k = maker.make();
    double mean = 0.0, strict = 0.0;
    for (const auto& u : k.corpus.utterances) {
      auto ref = oracle::score(u, k.preds.find(u.id));
      auto got = score_utterance(u, k.preds.find(u.id), cfg);
      CHECK(got.score == doctest::Approx(ref.score).epsilon(1e-12));
      CHECK(got.r_coef == doctest::Approx(ref.r).epsilon(1e-12));
      CHECK(got.strict == ref.strict);
      mean += ref.score;
      strict += ref.strict ? 1.0 : 0.0;
    }
    const double n = double(k.corpus.size());
    CHECK(action_risk_score(k.corpus, k.preds, cfg) == doctest::Approx(mean / n).epsilon(1e-12));
    CHECK(risk_strict(k.corpus, k.preds, cfg) == doctest::Approx(strict / n).epsilon(1e-12));

    bool has_weight = false;
    for (const auto& u : k.corpus.utterances) has_weight |= !u.entities.empty();
    bool small = true;
    for (const auto& u : k.corpus.utterances) {
      const auto* p = k.preds.find(u.id);
      small &= u.entities.size() <= 6 && (!p || p->entities.size() <= 6);
    }
    if (has_weight && small) {
      CHECK(rw_er(k.corpus, k.preds, cfg) ==
            doctest::Approx(oracle::rw_er(k.corpus, k.preds)).epsilon(1e-12));
    }
  }
}

TEST_CASE("ordering: strict implies full score; score never exceeds the slot fraction") {
  const WeightConfig cfg = default_weight_config();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    oracle::CaseMaker maker(500 + seed);
    auto k = maker.make();
    for (const auto& s : score_corpus(k.corpus, k.preds, cfg)) {
      CHECK(s.score >= 0.0);
      CHECK(s.score <= s.slot_weighted_fraction + 1e-15);
      CHECK(s.slot_weighted_fraction <= 1.0);
      if (s.strict) CHECK(s.score == 1.0);
    }
    auto r = risk_report(k.corpus, k.preds, cfg);
    CHECK(r.risk_strict <= r.action_risk_score + 1e-12);
    CHECK(r.action_risk_score <= r.act_wt + 1e-12);
  }
}

TEST_CASE("scaling every weight leaves the weighted metrics unchanged") {
  const WeightConfig cfg = default_weight_config();
  WeightConfig scaled = cfg;
  for (auto& [e, w] : scaled.entity_weights) w *= 7.3;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    oracle::CaseMaker maker(900 + seed);
    auto k = maker.make();
    auto a = risk_report(k.corpus, k.preds, cfg);
    auto b = risk_report(k.corpus, k.preds, scaled);
    CHECK(a.action_risk_score == doctest::Approx(b.action_risk_score).epsilon(1e-12));
    CHECK(a.act_wt == doctest::Approx(b.act_wt).epsilon(1e-12));
    CHECK(a.rw_er == doctest::Approx(b.rw_er).epsilon(1e-12));
    CHECK(a.risk_ner_f1 == doctest::Approx(b.risk_ner_f1).epsilon(1e-12));
  }
}

TEST_CASE("corpus order does not matter") {
  const WeightConfig cfg = default_weight_config();
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    oracle::CaseMaker maker(1300 + seed);
    auto k = maker.make();
    auto a = risk_report(k.corpus, k.preds, cfg);
    Corpus shuffled = k.corpus;
    std::shuffle(shuffled.utterances.begin(), shuffled.utterances.end(), rng);
    auto b = risk_report(shuffled, k.preds, cfg, 3);
    CHECK(a.action_risk_score == doctest::Approx(b.action_risk_score).epsilon(1e-12));
    CHECK(a.rw_er == doctest::Approx(b.rw_er).epsilon(1e-12));
    CHECK(a.risk_strict == b.risk_strict);
    CHECK(a.act_macro == doctest::Approx(b.act_macro).epsilon(1e-12));
  }
}

TEST_CASE("uniform weights turn Risk-NER into entity macro F1") {
  WeightConfig flat = default_weight_config();
  for (auto& [e, w] : flat.entity_weights) {
    if (e != EntityType::Outside) w = 1.0;
  }
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    oracle::CaseMaker maker(1700 + seed);
    auto k = maker.make();
    if (gt_entity_types(k.corpus).empty()) continue;
    CHECK(risk_weighted_entity_f1(k.corpus, k.preds, flat) ==
          doctest::Approx(entity_macro_f1(k.corpus, k.preds, flat)).epsilon(1e-12));
  }
}

TEST_CASE("perfect predictions score 1 everywhere") {
  const WeightConfig cfg = default_weight_config();
  Corpus c = generate_synthetic_corpus(4, 200);
  PredictionSet ps;
  for (const auto& u : c.utterances) {
    ps.predictions[u.id] = pred(u.id, u.action, u.entities);
  }
  auto r = risk_report(c, ps, cfg);
  CHECK(r.action_risk_score == 1.0);
  CHECK(r.risk_strict == 1.0);
  CHECK(r.rw_er == 1.0);
  CHECK(r.risk_ner_f1 == 1.0);
  CHECK(r.act_macro == 1.0);
  CHECK(r.act_wt == 1.0);
  for (const auto& [a, v] : r.per_action) CHECK(v == 1.0);
}
