#include "atceval/classification_metrics.hpp"

#include <stdexcept>

#include "atceval/matching.hpp"

namespace atceval {

namespace {

template <typename Label, typename GetGt, typename GetPred>
ConfusionTable label_confusion(const Corpus& corpus, const PredictionSet& preds, GetGt gt_of,
                               GetPred pred_of) {
  ConfusionTable table;
  for (const auto& u : corpus.utterances) {
    const Label truth = gt_of(u);
    const std::string truth_label(to_string(truth));
    const Prediction* p = preds.find(u.id);
    std::optional<Label> guess = p ? pred_of(*p) : std::nullopt;
    if (guess && *guess == truth) {
      table.add_tp(truth_label);
    } else {
      table.add_fn(truth_label);
      if (guess) table.add_fp(std::string(to_string(*guess)));
    }
  }
  return table;
}

template <std::size_t N, typename E>
std::vector<std::string> labels(const std::array<E, N>& all) {
  std::vector<std::string> out;
  for (E v : all) out.emplace_back(to_string(v));
  return out;
}

}  // namespace

double f1_score(const ClassCounts& c) noexcept {
  if (c.tp == 0) return 0.0;
  const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return 2.0 * precision * recall / (precision + recall);
}

ConfusionTable& ConfusionTable::operator+=(const ConfusionTable& o) {
  for (const auto& [label, c] : o.counts) counts[label] += c;
  return *this;
}

double macro_f1(const ConfusionTable& table, const std::vector<std::string>& class_set,
                AbsentClass absent) {
  if (class_set.empty()) throw std::invalid_argument("macro_f1 needs a non-empty class set");
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& label : class_set) {
    auto it = table.counts.find(label);
    ClassCounts c = it == table.counts.end() ? ClassCounts{} : it->second;
    if (c.tp == 0 && c.fp == 0 && c.fn == 0 && absent == AbsentClass::Skip) continue;
    sum += f1_score(c);
    ++used;
  }
  return used == 0 ? 0.0 : sum / static_cast<double>(used);
}

ConfusionTable speaker_confusion(const Corpus& corpus, const PredictionSet& preds) {
  return label_confusion<Speaker>(
      corpus, preds, [](const Utterance& u) { return u.speaker; },
      [](const Prediction& p) { return p.speaker; });
}

ConfusionTable intent_confusion(const Corpus& corpus, const PredictionSet& preds) {
  return label_confusion<Intent>(
      corpus, preds, [](const Utterance& u) { return u.intent; },
      [](const Prediction& p) { return p.intent; });
}

ConfusionTable action_type_confusion(const Corpus& corpus, const PredictionSet& preds) {
  return label_confusion<ActionType>(
      corpus, preds, [](const Utterance& u) { return u.action.action_type; },
      [](const Prediction& p) -> std::optional<ActionType> {
        if (!p.action) return std::nullopt;
        return p.action->action_type;
      });
}

ConfusionTable entity_confusion(const Corpus& corpus, const PredictionSet& preds,
                                const WeightConfig& cfg) {
  static const std::vector<EntitySpan> kNone;
  ConfusionTable table;
  for (const auto& u : corpus.utterances) {
    const Prediction* p = preds.find(u.id);
    const auto& pred_entities = p ? p->entities : kNone;
    MatchResult m = match_entities(u.entities, pred_entities, cfg);
    for (const auto& pair : m.pairs) {
      table.add_tp(std::string(to_string(u.entities[pair.gt_index].entity_type)));
    }
    for (std::size_t g : m.unmatched_gt) {
      table.add_fn(std::string(to_string(u.entities[g].entity_type)));
    }
    for (std::size_t q : m.unmatched_pred) {
      table.add_fp(std::string(to_string(pred_entities[q].entity_type)));
    }
  }
  return table;
}

double speaker_f1(const Corpus& corpus, const PredictionSet& preds, AbsentClass absent) {
  return macro_f1(speaker_confusion(corpus, preds), labels(kAllSpeakers), absent);
}

double intent_f1(const Corpus& corpus, const PredictionSet& preds, AbsentClass absent) {
  return macro_f1(intent_confusion(corpus, preds), labels(kAllIntents), absent);
}

double action_type_f1(const Corpus& corpus, const PredictionSet& preds, AbsentClass absent) {
  return macro_f1(action_type_confusion(corpus, preds), labels(kAllActionTypes), absent);
}

std::vector<EntityType> gt_entity_types(const Corpus& corpus) {
  std::vector<bool> seen(kAllEntityTypes.size(), false);
  for (const auto& u : corpus.utterances) {
    for (const auto& e : u.entities) seen[static_cast<std::size_t>(e.entity_type)] = true;
  }
  std::vector<EntityType> out;
  for (EntityType e : kAllEntityTypes) {
    if (seen[static_cast<std::size_t>(e)] && e != EntityType::Outside) out.push_back(e);
  }
  return out;
}

double entity_macro_f1(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg) {
  auto types = gt_entity_types(corpus);
  if (types.empty()) return 0.0;
  std::vector<std::string> class_set;
  for (EntityType e : types) class_set.emplace_back(to_string(e));
  return macro_f1(entity_confusion(corpus, preds, cfg), class_set);
}

std::map<EntityType, double> per_entity_accuracy(const Corpus& corpus, const PredictionSet& preds,
                                                 const WeightConfig& cfg) {
  ConfusionTable table = entity_confusion(corpus, preds, cfg);
  std::map<EntityType, double> out;
  for (EntityType e : gt_entity_types(corpus)) {
    const ClassCounts& c = table.counts.at(std::string(to_string(e)));
    out[e] = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  return out;
}

}  // namespace atceval
