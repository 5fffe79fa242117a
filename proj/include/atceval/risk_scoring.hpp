#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atceval/corpus_io.hpp"
#include "atceval/schema.hpp"

namespace atceval {

// Consequence-aware score of one utterance.
//   score = r_coef * slot_weighted_fraction
//   r_coef = 1 if the action type is right, else 1 - rho(gt type)
//   fraction = sum_s w_{a,s} m_s / sum_s w_{a,s} over the scored critical slots
struct UtteranceScore {
  std::string utterance_id;
  bool type_correct = false;
  double r_coef = 0.0;
  double slot_weighted_fraction = 0.0;
  double score = 0.0;
  bool strict = false;
  int hallucinated_slots = 0;
  std::map<std::string, int> slot_matches;
};

UtteranceScore score_utterance(const Utterance& gt, const Prediction* pred,
                               const WeightConfig& cfg);

struct RiskStratum {
  double type_accuracy = 0.0;
  double slot_accuracy = 0.0;
  std::size_t utterances = 0;
  std::size_t slot_instances = 0;

  friend bool operator==(const RiskStratum&, const RiskStratum&) = default;
};

struct RiskReport {
  double rw_er = 0.0;
  double risk_ner_f1 = 0.0;
  double action_risk_score = 0.0;
  double act_wt = 0.0;
  double act_macro = 0.0;
  double risk_strict = 0.0;
  std::map<RiskLevel, RiskStratum> per_risk_level;
  std::map<ActionType, double> per_action;

  friend bool operator==(const RiskReport&, const RiskReport&) = default;
};

// Corpus-level sum of matched ground-truth weights over all ground-truth weights.
// Throws ValidationError("no weighted ground truth") when the denominator is 0.
double rw_er(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg);

// sum_e w(e) F1_e / sum_e w(e) over entity types occurring in ground truth.
double risk_weighted_entity_f1(const Corpus& corpus, const PredictionSet& preds,
                               const WeightConfig& cfg);

std::vector<UtteranceScore> score_corpus(const Corpus& corpus, const PredictionSet& preds,
                                         const WeightConfig& cfg, int jobs = 1);

// Mean of score_i. Throws ValidationError on an empty corpus.
double action_risk_score(const Corpus& corpus, const PredictionSet& preds,
                         const WeightConfig& cfg);
// Mean of the slot fraction with the type penalty removed.
double act_wt(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg);
// Unweighted macro F1 over critical-slot categories occurring in ground truth.
double act_macro(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg);
double risk_strict(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg);
std::map<RiskLevel, RiskStratum> risk_stratified(const Corpus& corpus, const PredictionSet& preds,
                                                 const WeightConfig& cfg);

RiskReport risk_report(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg,
                       int jobs = 1);

}  // namespace atceval
