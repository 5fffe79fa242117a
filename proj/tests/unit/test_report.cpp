#include <doctest.h>

#include <sstream>

#include "atceval/baseline_parser.hpp"
#include "atceval/report.hpp"
#include "support/golden.hpp"

using namespace atceval;

namespace {

std::map<std::string, double> csv_values(const std::string& csv) {
  std::map<std::string, double> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    out[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  return out;
}

// "risk_score   0.5414" style rows: first number after the label.
double table_value(const std::string& table, const std::string& label) {
  std::istringstream in(table);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(label, 0) == 0 && line.size() > label.size() && line[label.size()] == ' ') {
      return std::stod(line.substr(label.size()));
    }
  }
  FAIL("row not found: " << label);
  return 0.0;
}

PredictionSet perfect(const Corpus& c) {
  PredictionSet ps;
  ps.model_name = "oracle";
  for (const auto& u : c.utterances) {
    Prediction p;
    p.utterance_id = u.id;
    p.speaker = u.speaker;
    p.intent = u.intent;
    p.action = u.action;
    p.entities = u.entities;
    p.latency_seconds = 0.5;
    ps.predictions[u.id] = p;
  }
  return ps;
}

}  // namespace

TEST_CASE("golden report and its warnings") {
  auto r = support::golden_report();
  CHECK(support::golden_mismatches(r, 1e-12).empty());
  CHECK(r.warnings.size() == 2);
  CHECK_FALSE(r.mean_latency);
  CHECK(r.config_hash == config_hash(default_weight_config()));
}

TEST_CASE("perfect predictions") {
  Corpus c = generate_synthetic_corpus(12, 150);
  auto r = evaluate(c, perfect(c), default_weight_config());
  for (double v : {r.speaker_f1, r.intent_f1, r.ner_f1, r.risk.rw_er, r.risk.risk_ner_f1,
                   r.risk.action_risk_score, r.risk.act_wt, r.risk.act_macro, r.risk.risk_strict}) {
    CHECK(v == 1.0);
  }
  // action macro runs over all nine types; ones that never occur count as 0
  std::set<ActionType> present;
  for (const auto& u : c.utterances) present.insert(u.action.action_type);
  CHECK(r.action_f1 == doctest::Approx(double(present.size()) / 9.0).epsilon(1e-12));
  REQUIRE(r.mean_latency);
  CHECK(*r.mean_latency == 0.5);
  CHECK(r.warnings.empty());
}

TEST_CASE("an empty prediction set scores zero and warns") {
  Corpus c = generate_synthetic_corpus(12, 50);
  auto r = evaluate(c, PredictionSet{}, default_weight_config());
  CHECK(r.risk.action_risk_score == 0.0);
  CHECK(r.risk.rw_er == 0.0);
  CHECK(r.missing_predictions == 50);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("the three formats agree") {
  Corpus c = generate_synthetic_corpus(13, 200);
  auto profile_preds = parse_corpus(c);
  profile_preds.predictions.erase(c.utterances[0].id);
  auto r = evaluate(c, profile_preds, default_weight_config());

  auto j = nlohmann::json::parse(format_report(r, OutputFormat::JsonLines));
  auto csv = csv_values(format_report(r, OutputFormat::Csv));
  auto table = format_report(r, OutputFormat::Table);
  const std::map<std::string, double> rows = {{"risk_score", r.risk.action_risk_score},
                                              {"risk_strict", r.risk.risk_strict},
                                              {"rw_er", r.risk.rw_er},
                                              {"speaker_f1", r.speaker_f1},
                                              {"act_macro", r.risk.act_macro}};
  for (const auto& [key, value] : rows) {
    INFO(key);
    CHECK(j["metrics"][key].get<double>() == doctest::Approx(value).epsilon(1e-9));
    CHECK(csv.at(key) == doctest::Approx(value).epsilon(1e-9));
    CHECK(std::fabs(table_value(table, key) - value) <= 5e-5);
  }
}

TEST_CASE("reports are byte-for-byte deterministic") {
  Corpus c = generate_synthetic_corpus(14, 300);
  auto preds = parse_corpus(c);
  for (auto fmt : {OutputFormat::Table, OutputFormat::Csv, OutputFormat::JsonLines}) {
    CHECK(format_report(evaluate(c, preds, default_weight_config(), "", 1), fmt) ==
          format_report(evaluate(c, preds, default_weight_config(), "", 6), fmt));
  }
}

TEST_CASE("JSON round trip") {
  auto r = support::golden_report();
  CHECK(evaluation_report_from_json(to_json(r)) == r);
  Corpus c = generate_synthetic_corpus(15, 40);
  auto p = evaluate(c, perfect(c), default_weight_config());
  CHECK(evaluation_report_from_json(nlohmann::json::parse(format_report(p, OutputFormat::JsonLines))) == p);
}

TEST_CASE("comparison ranks by Risk Score and refuses mixed corpora") {
  Corpus c = generate_synthetic_corpus(16, 100);
  auto best = evaluate(c, perfect(c), default_weight_config());
  PredictionSet half = perfect(c);
  for (std::size_t i = 0; i < c.size(); i += 2) half.predictions.erase(c.utterances[i].id);
  half.model_name = "half";
  auto base = evaluate(c, half, default_weight_config());
  auto none = evaluate(c, PredictionSet{}, default_weight_config());
  none.model_name = "silent";

  auto t = compare_reports({none, base, best});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].model_name == "oracle");
  CHECK(t.rows[2].model_name == "silent");
  CHECK(t.rows[0].time_seconds == 0.5);
  CHECK_FALSE(t.rows[2].time_seconds);

  auto single = compare_reports({base});
  CHECK(single.rows.size() == 1);
  for (auto fmt : {OutputFormat::Table, OutputFormat::Csv, OutputFormat::JsonLines}) {
    auto text = format_comparison(t, fmt);
    CHECK(text.find("oracle") < text.find("silent"));
  }
  CHECK(format_comparison(t, OutputFormat::Csv).find("Model,Time (s),Spk F1") == 0);

  auto other = evaluate(generate_synthetic_corpus(17, 100), PredictionSet{}, default_weight_config());
  other.model_name = "elsewhere";
  try {
    compare_reports({best, base, other});
    FAIL("expected a mismatch");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("#1") != std::string::npos);
    CHECK(msg.find("#3") != std::string::npos);
    CHECK(msg.find("elsewhere") != std::string::npos);
  }
  CHECK_THROWS_AS(compare_reports({}), ValidationError);
}

TEST_CASE("output format names") {
  CHECK(output_format_from_string("csv") == OutputFormat::Csv);
  CHECK(output_format_from_string("json-lines") == OutputFormat::JsonLines);
  CHECK(output_format_from_string("table") == OutputFormat::Table);
  CHECK_FALSE(output_format_from_string("xml"));
}
