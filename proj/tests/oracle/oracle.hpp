#pragma once

// Reference implementations written straight from the metric definitions.
// Nothing here calls into the library's matching or scoring code; only the
// plain data types are shared.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "atceval/corpus_io.hpp"
#include "atceval/schema.hpp"

namespace oracle {

inline const std::map<std::string, double>& entity_weight_table() {
  static const std::map<std::string, double> w = {
      {"CALLSIGN", 1.00},  {"TAXIWAY", 0.90},   {"RUNWAY", 0.95},   {"CONDITION", 0.95},
      {"VEHICLE", 0.65},   {"QUALIFIER", 0.50}, {"GATE", 0.40},     {"REPORT", 0.40},
      {"FREQUENCY", 0.30}, {"CONTROLLER", 0.25}, {"GREET", 0.05},   {"OUTSIDE", 0.00}};
  return w;
}

struct ActionRow {
  double rho;
  std::vector<std::string> slots;
};

inline const std::map<std::string, ActionRow>& action_table() {
  static const std::map<std::string, ActionRow> t = {
      {"HOLD", {1.0, {"callsign", "boundary"}}},
      {"TAXI", {1.0, {"callsign", "taxiway", "boundary", "qualifier", "runway"}}},
      {"GIVE_WAY", {1.0, {"callsign", "vehicle"}}},
      {"CONTACT", {0.6, {"callsign", "frequency", "controller"}}},
      {"PUSHBACK", {0.6, {"callsign", "gate", "qualifier"}}},
      {"INFORM", {0.2, {"callsign", "controller"}}},
      {"GREET", {0.2, {"callsign", "controller"}}},
      {"STANDBY", {0.2, {"callsign"}}},
      {"UNKNOWN", {0.2, {"callsign"}}}};
  return t;
}

inline double slot_weight(const std::string& slot) {
  static const std::map<std::string, std::string> to_entity = {
      {"callsign", "CALLSIGN"},   {"boundary", "CONDITION"}, {"taxiway", "TAXIWAY"},
      {"qualifier", "QUALIFIER"}, {"runway", "RUNWAY"},      {"vehicle", "VEHICLE"},
      {"frequency", "FREQUENCY"}, {"controller", "CONTROLLER"}, {"gate", "GATE"}};
  return entity_weight_table().at(to_entity.at(slot));
}

// Lowercase words of letters/digits; "d.d" stays inside one word.
inline std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string w;
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    bool keep_dot = c == '.' && i > 0 && i + 1 < text.size() &&
                    std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                    std::isdigit(static_cast<unsigned char>(text[i + 1])) && !w.empty();
    if (std::isalnum(c) || c >= 0x80 || keep_dot) {
      w += static_cast<char>(std::tolower(c));
    } else if (std::isspace(c)) {
      if (!w.empty()) out.push_back(w);
      w.clear();
    }
  }
  if (!w.empty()) out.push_back(w);
  return out;
}

inline double overlap(const std::string& a, const std::string& b) {
  auto x = words(a);
  auto y = words(b);
  if (x.empty() && y.empty()) return 1.0;
  if (x.empty() || y.empty()) return 0.0;
  std::map<std::string, int> cx, cy;
  for (auto& t : x) cx[t]++;
  for (auto& t : y) cy[t]++;
  int common = 0;
  for (auto& [t, n] : cx) common += std::min(n, cy.count(t) ? cy[t] : 0);
  return double(common) / double(std::max(x.size(), y.size()));
}

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total = 0.0;
};

// Exhaustive search for the one-to-one assignment with the most pairs, then
// the largest summed overlap.
inline Assignment optimal_matching(const std::vector<atceval::EntitySpan>& gt,
                                   const std::vector<atceval::EntitySpan>& pred, double threshold) {
  Assignment best;
  Assignment cur;
  std::vector<bool> used(pred.size(), false);
  std::function<void(std::size_t)> go = [&](std::size_t g) {
    if (g == gt.size()) {
      if (cur.pairs.size() > best.pairs.size() ||
          (cur.pairs.size() == best.pairs.size() && cur.total > best.total + 1e-15)) {
        best = cur;
      }
      return;
    }
    go(g + 1);
    if (gt[g].entity_type == atceval::EntityType::Outside) return;
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (used[p] || pred[p].entity_type != gt[g].entity_type) continue;
      double ov = overlap(gt[g].text, pred[p].text);
      if (ov < threshold) continue;
      used[p] = true;
      cur.pairs.emplace_back(g, p);
      cur.total += ov;
      go(g + 1);
      cur.total -= ov;
      cur.pairs.pop_back();
      used[p] = false;
    }
  };
  go(0);
  return best;
}

inline std::string type_name(atceval::EntityType e) { return std::string(atceval::to_string(e)); }

// RW-ER = sum over matched GT entities of w(type) / sum over all GT entities of w(type).
inline double rw_er(const atceval::Corpus& corpus, const atceval::PredictionSet& preds,
                    double threshold = 0.9) {
  double num = 0.0, den = 0.0;
  for (const auto& u : corpus.utterances) {
    std::vector<atceval::EntitySpan> none;
    const auto* p = preds.find(u.id);
    Assignment a = optimal_matching(u.entities, p ? p->entities : none, threshold);
    for (const auto& e : u.entities) den += entity_weight_table().at(type_name(e.entity_type));
    for (auto [g, q] : a.pairs) num += entity_weight_table().at(type_name(u.entities[g].entity_type));
  }
  return num / den;
}

struct ScoreParts {
  double r = 0.0;
  double fraction = 0.0;
  double score = 0.0;
  bool strict = false;
};

// Score_i = r(a_i) * sum_s w_{a,s} m_{i,s} / sum_s w_{a,s}, with
// r(a) = 1 if the type is right and 1 - rho(a) otherwise. Sums run over the
// critical slots that the ground truth annotates.
inline ScoreParts score(const atceval::Utterance& u, const atceval::Prediction* p,
                        double threshold = 0.9) {
  const std::string a(atceval::to_string(u.action.action_type));
  const ActionRow& row = action_table().at(a);
  const bool have_action = p && p->action;
  ScoreParts s;
  const bool correct = have_action && p->action->action_type == u.action.action_type;
  s.r = correct ? 1.0 : 1.0 - row.rho;
  double num = 0.0, den = 0.0;
  int annotated = 0, hits = 0, hallucinated = 0;
  for (const auto& slot : row.slots) {
    const bool in_gt = u.action.slots.count(slot) > 0;
    const bool in_pred = have_action && p->action->slots.count(slot) > 0;
    if (!in_gt) {
      hallucinated += in_pred ? 1 : 0;
      continue;
    }
    ++annotated;
    int m = in_pred && overlap(u.action.slots.at(slot), p->action->slots.at(slot)) >= threshold;
    hits += m;
    num += slot_weight(slot) * m;
    den += slot_weight(slot);
  }
  if (annotated == 0) {
    s.fraction = correct ? 1.0 : 0.0;
    s.strict = correct;
  } else {
    s.fraction = den > 0 ? num / den : (hits == annotated ? 1.0 : 0.0);
    s.strict = correct && hits == annotated && hallucinated == 0;
  }
  s.score = s.r * s.fraction;
  return s;
}

// F1 = 2tp / (2tp + fp + fn), zero when tp is zero.
inline double f1(long tp, long fp, long fn) {
  return tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
}

struct Counts {
  long tp = 0, fp = 0, fn = 0;
};

inline double macro_f1(const std::map<std::string, Counts>& table,
                       const std::vector<std::string>& classes) {
  double sum = 0.0;
  for (const auto& c : classes) {
    auto it = table.find(c);
    if (it != table.end()) sum += f1(it->second.tp, it->second.fp, it->second.fn);
  }
  return sum / double(classes.size());
}

}  // namespace oracle
