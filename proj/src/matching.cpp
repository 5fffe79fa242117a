#include "atceval/matching.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

namespace atceval {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      flush();
    } else if (std::isalnum(uc) || uc >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(uc)));
    } else if (c == '.' && !current.empty() && is_digit(current.back()) && i + 1 < text.size() &&
               is_digit(text[i + 1])) {
      current.push_back('.');
    }
    // other punctuation is dropped
  }
  flush();
  return out;
}

double token_overlap(const TokenSequence& a, const TokenSequence& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::vector<std::string> sa = a.tokens;
  std::vector<std::string> sb = b.tokens;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::size_t common = 0;
  auto ia = sa.begin();
  auto ib = sb.begin();
  while (ia != sa.end() && ib != sb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(std::max(sa.size(), sb.size()));
}

MatchResult match_entities(const std::vector<EntitySpan>& gt, const std::vector<EntitySpan>& pred,
                           double threshold) {
  std::vector<TokenSequence> gt_tokens;
  std::vector<TokenSequence> pred_tokens;
  gt_tokens.reserve(gt.size());
  pred_tokens.reserve(pred.size());
  for (const auto& e : gt) gt_tokens.push_back(tokenize(e.text));
  for (const auto& e : pred) pred_tokens.push_back(tokenize(e.text));

  std::vector<MatchPair> candidates;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (gt[g].entity_type == EntityType::Outside) continue;
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (pred[p].entity_type != gt[g].entity_type) continue;
      double ov = token_overlap(gt_tokens[g], pred_tokens[p]);
      if (ov >= threshold) candidates.push_back({g, p, ov});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const MatchPair& x, const MatchPair& y) {
    return std::tie(y.overlap, x.gt_index, x.pred_index) <
           std::tie(x.overlap, y.gt_index, y.pred_index);
  });

  std::vector<bool> gt_used(gt.size(), false);
  std::vector<bool> pred_used(pred.size(), false);
  MatchResult result;
  for (const auto& c : candidates) {
    if (gt_used[c.gt_index] || pred_used[c.pred_index]) continue;
    gt_used[c.gt_index] = true;
    pred_used[c.pred_index] = true;
    result.pairs.push_back(c);
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const MatchPair& x, const MatchPair& y) { return x.gt_index < y.gt_index; });
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) result.unmatched_gt.insert(g);
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) result.unmatched_pred.insert(p);
  }
  return result;
}

MatchResult match_entities(const std::vector<EntitySpan>& gt, const std::vector<EntitySpan>& pred,
                           const WeightConfig& cfg) {
  return match_entities(gt, pred, cfg.overlap_threshold);
}

std::map<std::string, int> match_slots(const ActionAnnotation& gt_action,
                                       const std::optional<ActionAnnotation>& pred_action,
                                       const WeightConfig& cfg) {
  std::map<std::string, int> bits;
  for (const auto& slot : cfg.critical_slots(gt_action.action_type)) {
    auto g = gt_action.slots.find(slot);
    if (g == gt_action.slots.end()) {
      if (!cfg.restrict_to_annotated_slots) bits[slot] = 0;
      continue;
    }
    int m = 0;
    if (pred_action) {
      auto p = pred_action->slots.find(slot);
      if (p != pred_action->slots.end() &&
          token_overlap(tokenize(g->second), tokenize(p->second)) >= cfg.overlap_threshold) {
        m = 1;
      }
    }
    bits[slot] = m;
  }
  return bits;
}

std::vector<std::string> hallucinated_slots(const ActionAnnotation& gt_action,
                                            const std::optional<ActionAnnotation>& pred_action,
                                            const WeightConfig& cfg) {
  std::vector<std::string> out;
  if (!pred_action) return out;
  for (const auto& slot : cfg.critical_slots(gt_action.action_type)) {
    if (!gt_action.slots.contains(slot) && pred_action->slots.contains(slot)) {
      out.push_back(slot);
    }
  }
  return out;
}

}  // namespace atceval
