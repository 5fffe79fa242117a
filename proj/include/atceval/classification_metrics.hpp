#pragma once

#include <map>
#include <string>
#include <vector>

#include "atceval/corpus_io.hpp"
#include "atceval/schema.hpp"

namespace atceval {

struct ClassCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  ClassCounts& operator+=(const ClassCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

double f1_score(const ClassCounts& c) noexcept;

struct ConfusionTable {
  std::map<std::string, ClassCounts> counts;

  void add_tp(const std::string& label) { ++counts[label].tp; }
  void add_fp(const std::string& label) { ++counts[label].fp; }
  void add_fn(const std::string& label) { ++counts[label].fn; }
  ConfusionTable& operator+=(const ConfusionTable& o);
};

enum class AbsentClass { ScoreZero, Skip };

// Unweighted mean of per-class F1 over class_set. Throws std::invalid_argument
// on an empty class set.
double macro_f1(const ConfusionTable& table, const std::vector<std::string>& class_set,
                AbsentClass absent = AbsentClass::ScoreZero);

ConfusionTable speaker_confusion(const Corpus& corpus, const PredictionSet& preds);
ConfusionTable intent_confusion(const Corpus& corpus, const PredictionSet& preds);
ConfusionTable action_type_confusion(const Corpus& corpus, const PredictionSet& preds);
// Per entity type, from match_entities on every utterance.
ConfusionTable entity_confusion(const Corpus& corpus, const PredictionSet& preds,
                                const WeightConfig& cfg);

double speaker_f1(const Corpus& corpus, const PredictionSet& preds,
                  AbsentClass absent = AbsentClass::ScoreZero);
double intent_f1(const Corpus& corpus, const PredictionSet& preds,
                 AbsentClass absent = AbsentClass::ScoreZero);
double action_type_f1(const Corpus& corpus, const PredictionSet& preds,
                      AbsentClass absent = AbsentClass::ScoreZero);
// Averaged over entity types that occur in the ground truth.
double entity_macro_f1(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg);

// Per-type recall over ground-truth spans; types without ground truth are absent.
std::map<EntityType, double> per_entity_accuracy(const Corpus& corpus, const PredictionSet& preds,
                                                 const WeightConfig& cfg);

// Entity types with at least one ground-truth span, in enum order.
std::vector<EntityType> gt_entity_types(const Corpus& corpus);

}  // namespace atceval
