#include "atceval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "atceval/classification_metrics.hpp"

namespace atceval {

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Scalar metrics in presentation order.
std::vector<std::pair<std::string, double>> scalar_metrics(const EvaluationReport& r) {
  std::vector<std::pair<std::string, double>> m = {
      {"speaker_f1", r.speaker_f1},
      {"intent_f1", r.intent_f1},
      {"action_f1", r.action_f1},
      {"risk_ner_f1", r.risk.risk_ner_f1},
      {"ner_f1", r.ner_f1},
      {"rw_er", r.risk.rw_er},
      {"act_macro", r.risk.act_macro},
      {"act_wt", r.risk.act_wt},
      {"risk_score", r.risk.action_risk_score},
      {"risk_strict", r.risk.risk_strict},
  };
  for (const auto& [level, s] : r.risk.per_risk_level) {
    const std::string key = "risk_level." + std::string(to_string(level));
    m.emplace_back(key + ".type_accuracy", s.type_accuracy);
    m.emplace_back(key + ".slot_accuracy", s.slot_accuracy);
  }
  for (const auto& [a, v] : r.risk.per_action) {
    m.emplace_back("action_score." + std::string(to_string(a)), v);
  }
  for (const auto& [e, v] : r.per_entity_accuracy) {
    m.emplace_back("entity_accuracy." + std::string(to_string(e)), v);
  }
  if (r.mean_latency) m.emplace_back("mean_latency_seconds", *r.mean_latency);
  return m;
}

template <typename Enum, typename Parse>
Enum parse_enum(const std::string& s, Parse parse, const char* what) {
  auto v = parse(s);
  if (!v) throw ValidationError(std::string("report: unknown ") + what + " '" + s + "'");
  return *v;
}

}  // namespace

std::optional<OutputFormat> output_format_from_string(std::string_view s) {
  if (s == "table") return OutputFormat::Table;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json-lines" || s == "jsonl" || s == "json") return OutputFormat::JsonLines;
  return std::nullopt;
}

EvaluationReport evaluate(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg,
                          const std::string& corpus_id, int jobs) {
  EvaluationReport r;
  r.model_name = preds.model_name;
  r.corpus_id = corpus_id;
  if (r.corpus_id.empty()) {
    auto it = corpus.metadata.find("id");
    if (it != corpus.metadata.end()) r.corpus_id = it->second;
  }
  r.corpus_hash = corpus_hash(corpus);
  r.config_hash = config_hash(cfg);
  r.overlap_threshold = cfg.overlap_threshold;
  r.utterances = corpus.size();

  std::set<std::string> ids;
  for (const auto& u : corpus.utterances) ids.insert(u.id);
  for (const auto& [id, p] : preds.predictions) {
    if (ids.contains(id)) {
      ++r.predictions;
    } else {
      r.unknown_prediction_ids.push_back(id);
    }
  }
  r.missing_predictions = r.utterances - r.predictions;

  const AbsentClass absent =
      cfg.absent_class_scores_zero ? AbsentClass::ScoreZero : AbsentClass::Skip;
  r.speaker_f1 = speaker_f1(corpus, preds, absent);
  r.intent_f1 = intent_f1(corpus, preds, absent);
  r.action_f1 = action_type_f1(corpus, preds, absent);
  r.ner_f1 = entity_macro_f1(corpus, preds, cfg);
  r.risk = risk_report(corpus, preds, cfg, jobs);
  r.per_entity_accuracy = per_entity_accuracy(corpus, preds, cfg);

  double latency = 0.0;
  std::size_t timed = 0;
  for (const auto& u : corpus.utterances) {
    const Prediction* p = preds.find(u.id);
    if (p && p->latency_seconds) {
      latency += *p->latency_seconds;
      ++timed;
    }
  }
  if (timed > 0) r.mean_latency = latency / static_cast<double>(timed);

  if (!r.unknown_prediction_ids.empty()) {
    r.warnings.push_back(std::to_string(r.unknown_prediction_ids.size()) +
                         " prediction(s) reference unknown utterance ids and were skipped");
  }
  if (r.missing_predictions > 0) {
    r.warnings.push_back(std::to_string(r.missing_predictions) +
                         " utterance(s) have no prediction and score as misses");
  }
  return r;
}

nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json strata = nlohmann::json::object();
  for (const auto& [level, s] : r.risk.per_risk_level) {
    strata[std::string(to_string(level))] = {{"type_accuracy", s.type_accuracy},
                                             {"slot_accuracy", s.slot_accuracy},
                                             {"utterances", s.utterances},
                                             {"slot_instances", s.slot_instances}};
  }
  nlohmann::json per_action = nlohmann::json::object();
  for (const auto& [a, v] : r.risk.per_action) per_action[std::string(to_string(a))] = v;
  nlohmann::json per_entity = nlohmann::json::object();
  for (const auto& [e, v] : r.per_entity_accuracy) per_entity[std::string(to_string(e))] = v;

  return nlohmann::json{
      {"model_name", r.model_name},
      {"corpus", {{"id", r.corpus_id}, {"hash", r.corpus_hash}, {"utterances", r.utterances}}},
      {"config", {{"hash", r.config_hash}, {"overlap_threshold", r.overlap_threshold}}},
      {"metrics",
       {{"speaker_f1", r.speaker_f1},
        {"intent_f1", r.intent_f1},
        {"action_f1", r.action_f1},
        {"ner_f1", r.ner_f1},
        {"risk_ner_f1", r.risk.risk_ner_f1},
        {"rw_er", r.risk.rw_er},
        {"act_macro", r.risk.act_macro},
        {"act_wt", r.risk.act_wt},
        {"risk_score", r.risk.action_risk_score},
        {"risk_strict", r.risk.risk_strict}}},
      {"per_risk_level", strata},
      {"per_action", per_action},
      {"per_entity_accuracy", per_entity},
      {"mean_latency_seconds", r.mean_latency ? nlohmann::json(*r.mean_latency) : nlohmann::json()},
      {"predictions", r.predictions},
      {"missing_predictions", r.missing_predictions},
      {"unknown_prediction_ids", r.unknown_prediction_ids},
      {"warnings", r.warnings},
  };
}

EvaluationReport evaluation_report_from_json(const nlohmann::json& j) {
  EvaluationReport r;
  try {
    r.model_name = j.at("model_name").get<std::string>();
    r.corpus_id = j.at("corpus").at("id").get<std::string>();
    r.corpus_hash = j.at("corpus").at("hash").get<std::string>();
    r.utterances = j.at("corpus").at("utterances").get<std::size_t>();
    r.config_hash = j.at("config").at("hash").get<std::string>();
    r.overlap_threshold = j.at("config").at("overlap_threshold").get<double>();
    const auto& m = j.at("metrics");
    r.speaker_f1 = m.at("speaker_f1").get<double>();
    r.intent_f1 = m.at("intent_f1").get<double>();
    r.action_f1 = m.at("action_f1").get<double>();
    r.ner_f1 = m.at("ner_f1").get<double>();
    r.risk.risk_ner_f1 = m.at("risk_ner_f1").get<double>();
    r.risk.rw_er = m.at("rw_er").get<double>();
    r.risk.act_macro = m.at("act_macro").get<double>();
    r.risk.act_wt = m.at("act_wt").get<double>();
    r.risk.action_risk_score = m.at("risk_score").get<double>();
    r.risk.risk_strict = m.at("risk_strict").get<double>();
    for (const auto& [k, v] : j.at("per_risk_level").items()) {
      RiskStratum s;
      s.type_accuracy = v.at("type_accuracy").get<double>();
      s.slot_accuracy = v.at("slot_accuracy").get<double>();
      s.utterances = v.at("utterances").get<std::size_t>();
      s.slot_instances = v.at("slot_instances").get<std::size_t>();
      r.risk.per_risk_level[parse_enum<RiskLevel>(k, risk_level_from_string, "risk level")] = s;
    }
    for (const auto& [k, v] : j.at("per_action").items()) {
      r.risk.per_action[parse_enum<ActionType>(k, action_type_from_string, "action")] =
          v.get<double>();
    }
    for (const auto& [k, v] : j.at("per_entity_accuracy").items()) {
      r.per_entity_accuracy[parse_enum<EntityType>(k, entity_type_from_string, "entity type")] =
          v.get<double>();
    }
    const auto& lat = j.at("mean_latency_seconds");
    if (!lat.is_null()) r.mean_latency = lat.get<double>();
    r.predictions = j.at("predictions").get<std::size_t>();
    r.missing_predictions = j.at("missing_predictions").get<std::size_t>();
    r.unknown_prediction_ids = j.at("unknown_prediction_ids").get<std::vector<std::string>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed evaluation report: ") + e.what());
  }
  return r;
}

EvaluationReport load_evaluation_report(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ValidationError("report '" + path + "' is not json-lines");
    return evaluation_report_from_json(j);
  }
  throw ValidationError("report '" + path + "' is empty");
}

std::string format_report(const EvaluationReport& r, OutputFormat fmt) {
  std::ostringstream out;
  switch (fmt) {
    case OutputFormat::JsonLines:
      out << to_json(r).dump() << '\n';
      break;
    case OutputFormat::Csv:
      out << "metric,value\n";
      for (const auto& [k, v] : scalar_metrics(r)) out << k << ',' << full(v) << '\n';
      break;
    case OutputFormat::Table: {
      out << "model        " << (r.model_name.empty() ? "-" : r.model_name) << '\n';
      out << "corpus       " << (r.corpus_id.empty() ? "-" : r.corpus_id) << "  ("
          << r.utterances << " utterances, sha256 " << r.corpus_hash.substr(0, 12) << ")\n";
      out << "config       sha256 " << r.config_hash.substr(0, 12) << ", overlap threshold "
          << r.overlap_threshold << "\n\n";
      std::size_t width = 0;
      const auto metrics = scalar_metrics(r);
      for (const auto& [k, v] : metrics) width = std::max(width, k.size());
      for (const auto& [k, v] : metrics) {
        out << k << std::string(width - k.size() + 2, ' ') << fixed4(v) << '\n';
      }
      for (const auto& w : r.warnings) out << "warning: " << w << '\n';
      break;
    }
  }
  return out.str();
}

ComparisonTable compare_reports(const std::vector<EvaluationReport>& reports) {
  if (reports.empty()) throw ValidationError("compare: no reports given");
  ComparisonTable t;
  t.corpus_hash = reports.front().corpus_hash;
  t.config_hash = reports.front().config_hash;
  const auto label = [](const EvaluationReport& r, std::size_t i) {
    return "#" + std::to_string(i + 1) + " (" + (r.model_name.empty() ? "unnamed" : r.model_name) + ")";
  };
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (r.corpus_hash != t.corpus_hash) {
      throw ValidationError("corpus hash mismatch between " + label(reports[0], 0) + " and " +
                            label(r, i));
    }
    if (r.config_hash != t.config_hash) {
      throw ValidationError("config hash mismatch between " + label(reports[0], 0) + " and " +
                            label(r, i));
    }
  }
  for (const auto& r : reports) {
    ComparisonRow row;
    row.model_name = r.model_name;
    row.time_seconds = r.mean_latency;
    row.spk_f1 = r.speaker_f1;
    row.intent_f1 = r.intent_f1;
    row.act_f1 = r.action_f1;
    row.risk_ner = r.risk.risk_ner_f1;
    row.ner_f1 = r.ner_f1;
    row.act_macro = r.risk.act_macro;
    row.act_wt = r.risk.act_wt;
    row.risk_score = r.risk.action_risk_score;
    row.risk_strict = r.risk.risk_strict;
    row.rw_er = r.risk.rw_er;
    t.rows.push_back(row);
  }
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.risk_score != b.risk_score) return a.risk_score > b.risk_score;
    return a.model_name < b.model_name;
  });
  return t;
}

std::string format_comparison(const ComparisonTable& t, OutputFormat fmt) {
  std::ostringstream out;
  const auto values = [](const ComparisonRow& r) {
    return std::vector<double>{r.spk_f1, r.intent_f1, r.act_f1,     r.risk_ner,    r.ner_f1,
                               r.act_macro, r.act_wt, r.risk_score, r.risk_strict, r.rw_er};
  };
  switch (fmt) {
    case OutputFormat::JsonLines:
      for (const auto& r : t.rows) {
        nlohmann::json j = {{"model_name", r.model_name},
                            {"time_seconds", r.time_seconds ? nlohmann::json(*r.time_seconds)
                                                            : nlohmann::json()},
                            {"spk_f1", r.spk_f1},
                            {"intent_f1", r.intent_f1},
                            {"act_f1", r.act_f1},
                            {"risk_ner", r.risk_ner},
                            {"ner_f1", r.ner_f1},
                            {"act_macro", r.act_macro},
                            {"act_wt", r.act_wt},
                            {"risk_score", r.risk_score},
                            {"risk_strict", r.risk_strict},
                            {"rw_er", r.rw_er},
                            {"corpus_hash", t.corpus_hash},
                            {"config_hash", t.config_hash}};
        out << j.dump() << '\n';
      }
      break;
    case OutputFormat::Csv: {
      for (std::size_t c = 0; c < kComparisonColumns.size(); ++c) {
        out << (c ? "," : "") << kComparisonColumns[c];
      }
      out << '\n';
      for (const auto& r : t.rows) {
        out << csv_field(r.model_name) << ',' << (r.time_seconds ? full(*r.time_seconds) : "");
        for (double v : values(r)) out << ',' << full(v);
        out << '\n';
      }
      break;
    }
    case OutputFormat::Table: {
      std::vector<std::vector<std::string>> cells;
      cells.emplace_back(kComparisonColumns.begin(), kComparisonColumns.end());
      for (const auto& r : t.rows) {
        std::vector<std::string> line = {r.model_name.empty() ? "-" : r.model_name};
        if (r.time_seconds) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.2f", *r.time_seconds);
          line.emplace_back(buf);
        } else {
          line.emplace_back("--");
        }
        for (double v : values(r)) line.push_back(fixed4(v));
        cells.push_back(std::move(line));
      }
      std::vector<std::size_t> width(kComparisonColumns.size(), 0);
      for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
      }
      for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
          if (c == 0) {
            out << line[c] << std::string(width[c] - line[c].size(), ' ');
          } else {
            out << "  " << std::string(width[c] - line[c].size(), ' ') << line[c];
          }
        }
        out << '\n';
      }
      break;
    }
  }
  return out.str();
}

}  // namespace atceval
