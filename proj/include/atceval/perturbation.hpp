#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "atceval/corpus_io.hpp"
#include "atceval/risk_scoring.hpp"
#include "atceval/schema.hpp"

namespace atceval {

struct OpMix {
  double substitution = 0.6;
  double deletion = 0.2;
  double insertion = 0.2;
};

struct NoiseProfile {
  double target_wer = 0.0;
  OpMix op_mix;
  // token -> (confusable token, relative weight)
  std::map<std::string, std::vector<std::pair<std::string, double>>> confusion_table;
  // Frequency-weighted filler for insertions and fallback substitutions.
  std::vector<std::pair<std::string, double>> vocabulary;
  std::uint64_t seed = 0;
};

// Default profile: ATC confusion table over digits, phonetic letters and a few
// movement verbs; vocabulary drawn from the synthetic phrase bank.
NoiseProfile default_noise_profile();

// Empty iff op_mix sums to 1 (within 1e-9) and target_wer lies in [0,1].
std::vector<std::string> validate_noise_profile(const NoiseProfile& profile);

nlohmann::json to_json(const NoiseProfile& profile);
// Keys missing from `j` keep their default values. Throws ConfigError.
NoiseProfile noise_profile_from_json(const nlohmann::json& j);
NoiseProfile load_noise_profile(const std::string& path);

enum class EditKind { Substitution, Deletion, Insertion };

std::string_view to_string(EditKind kind);

struct EditOp {
  EditKind kind = EditKind::Substitution;
  std::size_t position = 0;  // index in the original token sequence (insert: before it)
  std::string before;
  std::string after;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct PerturbationRecord {
  std::string utterance_id;
  std::string original;
  std::string perturbed;
  double realized_wer = 0.0;
  std::vector<EditOp> op_log;

  friend bool operator==(const PerturbationRecord&, const PerturbationRecord&) = default;
};

// Applies round(target_wer * token count) token edits. The RNG stream is a
// function of (profile.seed, target_wer, utterance_id) only.
PerturbationRecord perturb_transcript(const std::string& transcript, const NoiseProfile& profile,
                                      const std::string& utterance_id = "");

// Rebuilds the perturbed text from the original and the op log.
std::string replay_ops(const std::string& original, const std::vector<EditOp>& ops);

Corpus perturb_corpus(const Corpus& corpus, const NoiseProfile& profile,
                      std::vector<PerturbationRecord>* records = nullptr, int jobs = 1);

struct SweepPoint {
  double wer = 0.0;
  std::uint64_t seed = 0;
  double mean_realized_wer = 0.0;
  RiskReport risk;
  double entity_macro_f1 = 0.0;
};

// For each WER: perturb every transcript, run the baseline parser and score
// against the original annotations. wer_grid must be ascending.
std::vector<SweepPoint> degradation_sweep(const Corpus& corpus, const WeightConfig& cfg,
                                          const NoiseProfile& profile_base,
                                          const std::vector<double>& wer_grid, int jobs = 1);

}  // namespace atceval
