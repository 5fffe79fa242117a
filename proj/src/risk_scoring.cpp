#include "atceval/risk_scoring.hpp"

#include <set>

#include "atceval/classification_metrics.hpp"
#include "atceval/matching.hpp"
#include "parallel.hpp"

namespace atceval {

namespace {

void require_non_empty(const Corpus& corpus) {
  if (corpus.utterances.empty()) throw ValidationError("corpus has no utterances");
}

template <typename Fn>
double mean_over(const std::vector<UtteranceScore>& scores, Fn value) {
  double sum = 0.0;
  for (const auto& s : scores) sum += value(s);
  return sum / static_cast<double>(scores.size());
}

const std::optional<ActionAnnotation> kNoAction;

const std::optional<ActionAnnotation>& action_of(const Prediction* p) {
  return p ? p->action : kNoAction;
}

}  // namespace

UtteranceScore score_utterance(const Utterance& gt, const Prediction* pred,
                               const WeightConfig& cfg) {
  const ActionType gt_type = gt.action.action_type;
  UtteranceScore s;
  s.utterance_id = gt.id;
  s.type_correct = pred && pred->action && pred->action->action_type == gt_type;
  s.r_coef = s.type_correct ? 1.0 : 1.0 - risk_coefficient(cfg.risk_of(gt_type));
  s.slot_matches = match_slots(gt.action, action_of(pred), cfg);
  s.hallucinated_slots =
      static_cast<int>(hallucinated_slots(gt.action, action_of(pred), cfg).size());

  double weighted_hits = 0.0;
  double weight_total = 0.0;
  bool all_matched = true;
  for (const auto& [slot, m] : s.slot_matches) {
    const double w = cfg.slot_weight(gt_type, slot);
    weight_total += w;
    weighted_hits += w * m;
    all_matched = all_matched && m == 1;
  }
  if (s.slot_matches.empty()) {
    // nothing annotated to score: only the type decides
    s.slot_weighted_fraction = s.type_correct ? 1.0 : 0.0;
  } else if (weight_total > 0.0) {
    s.slot_weighted_fraction = weighted_hits / weight_total;
  } else {
    s.slot_weighted_fraction = all_matched ? 1.0 : 0.0;
  }
  s.score = s.r_coef * s.slot_weighted_fraction;
  s.strict = s.slot_matches.empty()
                 ? s.type_correct
                 : s.type_correct && all_matched && s.hallucinated_slots == 0;
  return s;
}

double rw_er(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg) {
  static const std::vector<EntitySpan> kNone;
  double hit = 0.0;
  double total = 0.0;
  for (const auto& u : corpus.utterances) {
    const Prediction* p = preds.find(u.id);
    MatchResult m = match_entities(u.entities, p ? p->entities : kNone, cfg);
    for (const auto& e : u.entities) total += cfg.entity_weight(e.entity_type);
    for (const auto& pair : m.pairs) hit += cfg.entity_weight(u.entities[pair.gt_index].entity_type);
  }
  if (!(total > 0.0)) throw ValidationError("no weighted ground truth");
  return hit / total;
}

double risk_weighted_entity_f1(const Corpus& corpus, const PredictionSet& preds,
                               const WeightConfig& cfg) {
  ConfusionTable table = entity_confusion(corpus, preds, cfg);
  double num = 0.0;
  double den = 0.0;
  for (EntityType e : gt_entity_types(corpus)) {
    const double w = cfg.entity_weight(e);
    num += w * f1_score(table.counts.at(std::string(to_string(e))));
    den += w;
  }
  if (!(den > 0.0)) throw ValidationError("no weighted ground truth");
  return num / den;
}

std::vector<UtteranceScore> score_corpus(const Corpus& corpus, const PredictionSet& preds,
                                         const WeightConfig& cfg, int jobs) {
  std::vector<UtteranceScore> scores(corpus.utterances.size());
  detail::parallel_for(scores.size(), jobs, [&](std::size_t i) {
    const Utterance& u = corpus.utterances[i];
    scores[i] = score_utterance(u, preds.find(u.id), cfg);
  });
  return scores;
}

double action_risk_score(const Corpus& corpus, const PredictionSet& preds,
                         const WeightConfig& cfg) {
  require_non_empty(corpus);
  return mean_over(score_corpus(corpus, preds, cfg), [](const auto& s) { return s.score; });
}

double act_wt(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg) {
  require_non_empty(corpus);
  return mean_over(score_corpus(corpus, preds, cfg),
                   [](const auto& s) { return s.slot_weighted_fraction; });
}

double risk_strict(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg) {
  require_non_empty(corpus);
  return mean_over(score_corpus(corpus, preds, cfg),
                   [](const auto& s) { return s.strict ? 1.0 : 0.0; });
}

namespace {

double act_macro_from(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg,
                      const std::vector<UtteranceScore>& scores) {
  ConfusionTable table;
  std::set<std::string> categories;
  for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
    const Utterance& u = corpus.utterances[i];
    for (const auto& [slot, m] : scores[i].slot_matches) {
      if (!u.action.slots.contains(slot)) continue;  // only annotated instances count
      if (m) {
        table.add_tp(slot);
      } else {
        table.add_fn(slot);
      }
      categories.insert(slot);
    }
    for (const auto& slot : hallucinated_slots(u.action, action_of(preds.find(u.id)), cfg)) {
      table.add_fp(slot);
    }
  }
  if (categories.empty()) return 0.0;
  return macro_f1(table, {categories.begin(), categories.end()});
}

std::map<RiskLevel, RiskStratum> stratify(const Corpus& corpus, const WeightConfig& cfg,
                                          const std::vector<UtteranceScore>& scores) {
  struct Acc {
    std::size_t n = 0, type_hits = 0, slots = 0, slot_hits = 0;
  };
  std::map<RiskLevel, Acc> acc;
  for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
    Acc& a = acc[cfg.risk_of(corpus.utterances[i].action.action_type)];
    ++a.n;
    a.type_hits += scores[i].type_correct ? 1 : 0;
    for (const auto& [slot, m] : scores[i].slot_matches) {
      ++a.slots;
      a.slot_hits += static_cast<std::size_t>(m);
    }
  }
  std::map<RiskLevel, RiskStratum> out;
  for (const auto& [level, a] : acc) {
    RiskStratum s;
    s.utterances = a.n;
    s.slot_instances = a.slots;
    s.type_accuracy = static_cast<double>(a.type_hits) / static_cast<double>(a.n);
    s.slot_accuracy =
        a.slots == 0 ? 1.0 : static_cast<double>(a.slot_hits) / static_cast<double>(a.slots);
    out[level] = s;
  }
  return out;
}

}  // namespace

double act_macro(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg) {
  return act_macro_from(corpus, preds, cfg, score_corpus(corpus, preds, cfg));
}

std::map<RiskLevel, RiskStratum> risk_stratified(const Corpus& corpus, const PredictionSet& preds,
                                                 const WeightConfig& cfg) {
  return stratify(corpus, cfg, score_corpus(corpus, preds, cfg));
}

RiskReport risk_report(const Corpus& corpus, const PredictionSet& preds, const WeightConfig& cfg,
                       int jobs) {
  require_non_empty(corpus);
  const auto scores = score_corpus(corpus, preds, cfg, jobs);
  RiskReport r;
  r.rw_er = rw_er(corpus, preds, cfg);
  r.risk_ner_f1 = risk_weighted_entity_f1(corpus, preds, cfg);
  r.action_risk_score = mean_over(scores, [](const auto& s) { return s.score; });
  r.act_wt = mean_over(scores, [](const auto& s) { return s.slot_weighted_fraction; });
  r.risk_strict = mean_over(scores, [](const auto& s) { return s.strict ? 1.0 : 0.0; });
  r.act_macro = act_macro_from(corpus, preds, cfg, scores);
  r.per_risk_level = stratify(corpus, cfg, scores);
  std::map<ActionType, std::pair<double, std::size_t>> per_action;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto& slot = per_action[corpus.utterances[i].action.action_type];
    slot.first += scores[i].score;
    ++slot.second;
  }
  for (const auto& [a, sum] : per_action) {
    r.per_action[a] = sum.first / static_cast<double>(sum.second);
  }
  return r;
}

}  // namespace atceval
