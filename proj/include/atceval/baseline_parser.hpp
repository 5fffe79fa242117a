#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "atceval/corpus_io.hpp"
#include "atceval/lexicon.hpp"
#include "atceval/risk_scoring.hpp"
#include "atceval/schema.hpp"

namespace atceval {

struct RuleMatch {
  std::string rule;  // e.g. "callsign", "trigger:TAXI"
  std::size_t begin = 0;  // character offsets into the normalized transcript
  std::size_t end = 0;

  friend bool operator==(const RuleMatch&, const RuleMatch&) = default;
};

struct ParseTrace {
  std::vector<RuleMatch> matched_rules;
  std::string normalized;

  friend bool operator==(const ParseTrace&, const ParseTrace&) = default;
};

struct ParseResult {
  Prediction prediction;
  ParseTrace trace;
};

// Deterministic grammar-driven reading of one transcript. Never throws; the
// worst case is an UNKNOWN action with no slots.
ParseResult parse_transcript(std::string_view transcript,
                             const PhraseLexicon& lexicon = default_lexicon(),
                             const WeightConfig& cfg = default_weight_config());

PredictionSet parse_corpus(const Corpus& corpus, const PhraseLexicon& lexicon = default_lexicon(),
                           const WeightConfig& cfg = default_weight_config(), int jobs = 1);

// Parses every transcript and scores the result against the corpus annotations.
RiskReport self_test_against(const Corpus& corpus, const WeightConfig& cfg = default_weight_config(),
                             const PhraseLexicon& lexicon = default_lexicon());

}  // namespace atceval
