#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "atceval/model_runner.hpp"
#include "atceval/perturbation.hpp"
#include "atceval/report.hpp"
#include "atceval/schema.hpp"

namespace atceval {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kIo = 3;
inline constexpr int kConfig = 4;
inline constexpr int kRuntime = 5;
inline constexpr int kUsage = 64;
}  // namespace exit_code

// Maps an in-flight exception to the process exit status.
int exit_code_for(const std::exception& e) noexcept;

// Weight table from `path`, or the default one.
WeightConfig resolve_config(const std::optional<std::string>& path);

struct ValidateOutcome {
  std::size_t utterances = 0;
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
};
ValidateOutcome cmd_validate(const std::string& corpus_path, const WeightConfig& cfg);

EvaluationReport cmd_evaluate(const std::string& corpus_path, const std::string& predictions_path,
                              const WeightConfig& cfg, int jobs = 1);

ComparisonTable cmd_compare(const std::vector<std::string>& report_paths);

struct SweepReport {
  std::string corpus_hash;
  std::vector<double> wer_grid;
  std::vector<std::uint64_t> seeds;
  std::vector<SweepPoint> points;  // grid-major, then seed order
};
SweepReport cmd_perturb_sweep(const std::string& corpus_path,
                              const std::optional<std::string>& profile_path,
                              const std::vector<double>& wer_grid,
                              const std::vector<std::uint64_t>& seeds, const WeightConfig& cfg,
                              int jobs = 1);
// Per-point rows plus a per-WER mean over seeds.
std::string format_sweep(const SweepReport& s, OutputFormat fmt);

PredictionSet cmd_parse(const std::string& corpus_path, const WeightConfig& cfg, int jobs = 1);

RunResult cmd_run_model(const std::string& corpus_path, const std::string& endpoint_path,
                        const WeightConfig& cfg);

std::string predictions_to_string(const PredictionSet& preds);
std::string manifest_to_string(const RunManifest& m);

}  // namespace atceval
