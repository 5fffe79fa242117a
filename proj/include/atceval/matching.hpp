#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "atceval/schema.hpp"

namespace atceval {

struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Case-folds, strips punctuation and splits on whitespace. A '.' between two
// digits is kept so that "121.85" and "12.185" stay distinct.
TokenSequence tokenize(std::string_view text);

// |multiset intersection| / max(|a|, |b|); 1.0 when both are empty.
double token_overlap(const TokenSequence& a, const TokenSequence& b);

struct MatchPair {
  std::size_t gt_index = 0;
  std::size_t pred_index = 0;
  double overlap = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // sorted by gt_index
  std::set<std::size_t> unmatched_gt;
  std::set<std::size_t> unmatched_pred;
};

// One-to-one alignment of same-type spans with overlap >= cfg.overlap_threshold,
// taken greedily by descending overlap; ties go to the lower gt index, then
// the lower pred index.
MatchResult match_entities(const std::vector<EntitySpan>& gt, const std::vector<EntitySpan>& pred,
                           const WeightConfig& cfg);

// Overload for callers that only have a threshold.
MatchResult match_entities(const std::vector<EntitySpan>& gt, const std::vector<EntitySpan>& pred,
                           double threshold);

// Slot match bits m_{i,s} over the critical slots of the ground-truth action.
// With cfg.restrict_to_annotated_slots, slots missing from the ground truth are
// left out of the map.
std::map<std::string, int> match_slots(const ActionAnnotation& gt_action,
                                       const std::optional<ActionAnnotation>& pred_action,
                                       const WeightConfig& cfg);

// Critical slots of the ground-truth action that the prediction fills but the
// ground truth does not.
std::vector<std::string> hallucinated_slots(const ActionAnnotation& gt_action,
                                            const std::optional<ActionAnnotation>& pred_action,
                                            const WeightConfig& cfg);

}  // namespace atceval
