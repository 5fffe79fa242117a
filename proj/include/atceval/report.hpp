#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atceval/corpus_io.hpp"
#include "atceval/risk_scoring.hpp"
#include "atceval/schema.hpp"

namespace atceval {

enum class OutputFormat { Table, Csv, JsonLines };

std::optional<OutputFormat> output_format_from_string(std::string_view s);

struct EvaluationReport {
  std::string model_name;
  std::string corpus_id;
  std::string corpus_hash;
  std::string config_hash;
  double overlap_threshold = 0.0;
  std::size_t utterances = 0;
  std::size_t predictions = 0;

  double speaker_f1 = 0.0;
  double intent_f1 = 0.0;
  double action_f1 = 0.0;
  double ner_f1 = 0.0;
  RiskReport risk;
  std::map<EntityType, double> per_entity_accuracy;
  std::optional<double> mean_latency;

  std::size_t missing_predictions = 0;
  std::vector<std::string> unknown_prediction_ids;
  std::vector<std::string> warnings;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

// Every metric in one pass. Predictions whose id is not in the corpus are
// ignored and listed; utterances without a prediction score as misses.
EvaluationReport evaluate(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg,
                          const std::string& corpus_id = "", int jobs = 1);

nlohmann::json to_json(const EvaluationReport& r);
EvaluationReport evaluation_report_from_json(const nlohmann::json& j);
EvaluationReport load_evaluation_report(const std::string& path);

// json-lines: one compact object; csv: metric,value rows at full precision;
// table: aligned text at 4 decimals.
std::string format_report(const EvaluationReport& r, OutputFormat fmt);

// One row per report, columns in the fixed comparison order, ranked by
// Risk Score descending (ties by model name).
struct ComparisonRow {
  std::string model_name;
  std::optional<double> time_seconds;
  double spk_f1 = 0.0;
  double intent_f1 = 0.0;
  double act_f1 = 0.0;
  double risk_ner = 0.0;
  double ner_f1 = 0.0;
  double act_macro = 0.0;
  double act_wt = 0.0;
  double risk_score = 0.0;
  double risk_strict = 0.0;
  double rw_er = 0.0;
};

struct ComparisonTable {
  std::string corpus_hash;
  std::string config_hash;
  std::vector<ComparisonRow> rows;
};

inline constexpr std::array<const char*, 12> kComparisonColumns = {
    "Model",    "Time (s)", "Spk F1",  "Intent F1",  "Act F1",      "Risk-NER",
    "NER F1",   "Act Macro", "Act W/T", "Risk Score", "Risk Strict", "RW-ER"};

// Throws ValidationError naming the first pair of reports whose corpus or
// config hashes differ, or on an empty list.
ComparisonTable compare_reports(const std::vector<EvaluationReport>& reports);
std::string format_comparison(const ComparisonTable& t, OutputFormat fmt);

}  // namespace atceval
