#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atceval/commands.hpp"
#include "atceval/corpus_io.hpp"
#include "atceval/lexicon.hpp"

namespace {

using namespace atceval;

struct Common {
  std::optional<std::string> config;
  std::string format = "table";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::optional<std::string> output;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "weight table (JSON); defaults to the built-in one")
      ->check(CLI::ExistingFile);
  cmd->add_option("--format", c.format, "table | csv | json-lines")
      ->check(CLI::IsMember({"table", "csv", "json-lines"}));
  cmd->add_option("--seed", c.seed, "base RNG seed");
  cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::Range(1, 256));
  cmd->add_option("-o,--output", c.output, "write here (atomically) instead of stdout");
}

OutputFormat fmt_of(const Common& c) { return *output_format_from_string(c.format); }

void emit(const Common& c, const std::string& text) {
  if (c.output) {
    write_file_atomic(*c.output, text);
  } else {
    std::cout << text << std::flush;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"atceval: consequence-aware scoring for ATC language understanding"};
  app.require_subcommand(1);
  Common common;

  auto* validate = app.add_subcommand("validate", "check a corpus file against the schema");
  std::string corpus_path;
  validate->add_option("corpus", corpus_path)->required();
  add_common(validate, common);

  auto* evaluate = app.add_subcommand("evaluate", "score predictions against a corpus");
  std::string predictions_path;
  evaluate->add_option("corpus", corpus_path)->required();
  evaluate->add_option("predictions", predictions_path)->required();
  add_common(evaluate, common);

  auto* compare = app.add_subcommand("compare", "rank evaluation reports by Risk Score");
  std::vector<std::string> report_paths;
  compare->add_option("reports", report_paths, "json-lines reports from `evaluate`")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(compare, common);

  auto* perturb = app.add_subcommand("perturb", "ASR-noise degradation sweep with the baseline parser");
  std::optional<std::string> profile_path;
  std::vector<double> wer_grid = {0.0, 0.1, 0.3, 0.5};
  int n_seeds = 5;
  perturb->add_option("corpus", corpus_path)->required();
  perturb->add_option("--profile", profile_path, "noise profile (JSON)")->check(CLI::ExistingFile);
  perturb->add_option("--wer", wer_grid, "WER grid, ascending")->delimiter(',');
  perturb->add_option("--seeds", n_seeds, "seeds --seed .. --seed+N-1")->check(CLI::Range(1, 10000));
  add_common(perturb, common);

  auto* parse = app.add_subcommand("parse", "run the rule-based baseline parser");
  parse->add_option("corpus", corpus_path)->required();
  add_common(parse, common);

  auto* run = app.add_subcommand("run-model", "query a chat-completion endpoint, zero-shot");
  std::string endpoint_path;
  std::string manifest_path;
  run->add_option("corpus", corpus_path)->required();
  run->add_option("endpoint", endpoint_path, "endpoint config (JSON)")->required();
  run->add_option("--manifest", manifest_path, "run manifest output")->required();
  add_common(run, common);

  auto* generate = app.add_subcommand("generate", "write a seeded synthetic corpus");
  std::size_t n_utterances = 1000;
  std::vector<double> mix = {0.48, 0.26, 0.26};
  generate->add_option("-n,--count", n_utterances)->check(CLI::PositiveNumber);
  generate->add_option("--mix", mix, "HIGH,MEDIUM,LOW proportions")->delimiter(',')->expected(3);
  add_common(generate, common);

  auto* defaults = app.add_subcommand("default-config", "print a built-in configuration");
  std::string which = "weights";
  defaults->add_option("what", which, "weights | lexicon | noise | endpoint")
      ->check(CLI::IsMember({"weights", "lexicon", "noise", "endpoint"}));
  add_common(defaults, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::kUsage;
  }

  try {
    if (*validate) {
      const auto outcome = cmd_validate(corpus_path, resolve_config(common.config));
      if (!outcome.ok()) {
        for (const auto& v : outcome.violations) std::cerr << corpus_path << ": " << v << '\n';
        std::cerr << outcome.violations.size() << " violation(s)\n";
        return exit_code::kValidation;
      }
      emit(common, corpus_path + ": ok, " + std::to_string(outcome.utterances) + " utterances\n");
    } else if (*evaluate) {
      const auto report =
          cmd_evaluate(corpus_path, predictions_path, resolve_config(common.config), common.jobs);
      emit(common, format_report(report, fmt_of(common)));
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    } else if (*compare) {
      emit(common, format_comparison(cmd_compare(report_paths), fmt_of(common)));
    } else if (*perturb) {
      std::vector<std::uint64_t> seeds;
      for (int i = 0; i < n_seeds; ++i) seeds.push_back(common.seed + static_cast<std::uint64_t>(i));
      const auto sweep = cmd_perturb_sweep(corpus_path, profile_path, wer_grid, seeds,
                                           resolve_config(common.config), common.jobs);
      emit(common, format_sweep(sweep, fmt_of(common)));
    } else if (*parse) {
      emit(common, predictions_to_string(
                       cmd_parse(corpus_path, resolve_config(common.config), common.jobs)));
    } else if (*run) {
      const auto result = cmd_run_model(corpus_path, endpoint_path, resolve_config(common.config));
      write_file_atomic(manifest_path, manifest_to_string(result.manifest));
      emit(common, predictions_to_string(result.predictions));
      std::size_t failures = 0;
      for (const auto& e : result.manifest.entries) failures += e.error ? 1 : 0;
      if (failures) std::cerr << failures << " utterance(s) failed; see " << manifest_path << '\n';
    } else if (*generate) {
      RiskMix m{mix[0], mix[1], mix[2]};
      Corpus c;
      try {
        c = generate_synthetic_corpus(common.seed, n_utterances, m);
      } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
      }
      emit(common, corpus_to_string(c));
    } else if (*defaults) {
      nlohmann::json j;
      if (which == "weights") j = to_json(default_weight_config());
      if (which == "lexicon") j = to_json(default_lexicon());
      if (which == "noise") j = to_json(default_noise_profile());
      if (which == "endpoint") j = to_json(EndpointConfig{});
      emit(common, j.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "atceval: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return exit_code::kOk;
}
