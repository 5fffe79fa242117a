#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "atceval/schema.hpp"

namespace atceval {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kCorpusFormat = "atc-corpus";
inline constexpr const char* kPredictionsFormat = "atc-predictions";

struct Corpus {
  std::vector<Utterance> utterances;
  std::map<std::string, std::string> metadata;

  std::size_t size() const noexcept { return utterances.size(); }
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct PredictionSet {
  std::map<std::string, Prediction> predictions;
  std::string model_name;

  const Prediction* find(const std::string& utterance_id) const;
  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

// Line-delimited JSON. The first line is a header record
// {"format":"atc-corpus","version":1,"metadata":{...}}; each further line is
// one utterance. Throws ValidationError naming the line and field.
Corpus load_corpus(std::istream& in, const WeightConfig& cfg = default_weight_config());
// Every violation, one message each; empty means the stream loads cleanly.
std::vector<std::string> validate_corpus(std::istream& in,
                                         const WeightConfig& cfg = default_weight_config());
Corpus load_corpus_file(const std::string& path,
                        const WeightConfig& cfg = default_weight_config());
void write_corpus(std::ostream& out, const Corpus& corpus);
std::string corpus_to_string(const Corpus& corpus);
// SHA-256 of the canonical serialization.
std::string corpus_hash(const Corpus& corpus);

// Same container; the header ({"format":"atc-predictions",...}) is optional
// and an empty stream is an empty set.
PredictionSet load_predictions(std::istream& in);
PredictionSet load_predictions_file(const std::string& path);
void write_predictions(std::ostream& out, const PredictionSet& preds);

// Writes to a temporary sibling and renames over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

// --- structured model output -------------------------------------------------

struct TemplateParseOutcome {
  Prediction prediction;
  // (field, problem). Field "response" covers the whole answer.
  std::vector<std::pair<std::string, std::string>> diagnostics;
  // Top-level fields recovered: subset of {speaker, intent, action, entities}.
  std::set<std::string> populated;
};

inline constexpr std::array<const char*, 4> kTemplateFields = {"speaker", "intent", "action",
                                                               "entities"};

// Best-effort parse of the fixed output template. Never throws.
TemplateParseOutcome parse_model_output(std::string_view raw_text, const std::string& utterance_id);

// Renders a prediction in the output template (inverse of parse_model_output).
std::string render_model_output(const Prediction& p);

// The versioned zero-shot prompt. "{{transcript}}" marks the insertion point.
const std::string& canonical_prompt_template();
std::string render_prompt(const std::string& prompt_template, const std::string& transcript);

// --- synthetic corpus --------------------------------------------------------

struct RiskMix {
  double high = 0.48;
  double medium = 0.26;
  double low = 0.26;
};

// Per-level utterance counts by largest remainder; sums to n.
std::map<RiskLevel, std::size_t> risk_counts(std::size_t n, const RiskMix& mix);

// Seeded, schema-valid corpus of template-generated phraseology. Throws
// std::invalid_argument for n == 0 or proportions not summing to 1.
Corpus generate_synthetic_corpus(std::uint64_t seed, std::size_t n, const RiskMix& mix = {});

}  // namespace atceval
