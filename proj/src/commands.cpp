#include "atceval/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "atceval/baseline_parser.hpp"
#include "atceval/corpus_io.hpp"

namespace atceval {

namespace {

struct SweepMetrics {
  double realized = 0, rw_er = 0, risk_ner = 0, entity_f1 = 0, act_macro = 0, act_wt = 0,
         risk_score = 0, risk_strict = 0;

  static SweepMetrics of(const SweepPoint& p) {
    return {p.mean_realized_wer, p.risk.rw_er,  p.risk.risk_ner_f1,       p.entity_macro_f1,
            p.risk.act_macro,    p.risk.act_wt, p.risk.action_risk_score, p.risk.risk_strict};
  }
  void add(const SweepMetrics& o, double scale) {
    realized += o.realized * scale;
    rw_er += o.rw_er * scale;
    risk_ner += o.risk_ner * scale;
    entity_f1 += o.entity_f1 * scale;
    act_macro += o.act_macro * scale;
    act_wt += o.act_wt * scale;
    risk_score += o.risk_score * scale;
    risk_strict += o.risk_strict * scale;
  }
  std::vector<std::pair<const char*, double>> named() const {
    return {{"realized_wer", realized}, {"rw_er", rw_er},   {"risk_ner_f1", risk_ner},
            {"entity_macro_f1", entity_f1}, {"act_macro", act_macro}, {"act_wt", act_wt},
            {"risk_score", risk_score},  {"risk_strict", risk_strict}};
  }
};

std::string right(std::string_view s, std::size_t width) {
  return std::string(width > s.size() ? width - s.size() : 0, ' ') + std::string(s);
}

std::string num(const char* fmt, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return exit_code::kConfig;
  if (dynamic_cast<const IoError*>(&e)) return exit_code::kIo;
  if (dynamic_cast<const ValidationError*>(&e)) return exit_code::kValidation;
  return exit_code::kRuntime;
}

WeightConfig resolve_config(const std::optional<std::string>& path) {
  return path ? load_weight_config(*path) : default_weight_config();
}

ValidateOutcome cmd_validate(const std::string& corpus_path, const WeightConfig& cfg) {
  std::ifstream in(corpus_path);
  if (!in) throw IoError("cannot open corpus file '" + corpus_path + "'");
  ValidateOutcome out;
  out.violations = validate_corpus(in, cfg);
  if (out.ok()) out.utterances = load_corpus_file(corpus_path, cfg).size();
  return out;
}

EvaluationReport cmd_evaluate(const std::string& corpus_path, const std::string& predictions_path,
                              const WeightConfig& cfg, int jobs) {
  Corpus corpus = load_corpus_file(corpus_path, cfg);
  PredictionSet preds = load_predictions_file(predictions_path);
  return evaluate(corpus, preds, cfg, "", jobs);
}

ComparisonTable cmd_compare(const std::vector<std::string>& report_paths) {
  std::vector<EvaluationReport> reports;
  for (const auto& p : report_paths) reports.push_back(load_evaluation_report(p));
  return compare_reports(reports);
}

SweepReport cmd_perturb_sweep(const std::string& corpus_path,
                              const std::optional<std::string>& profile_path,
                              const std::vector<double>& wer_grid,
                              const std::vector<std::uint64_t>& seeds, const WeightConfig& cfg,
                              int jobs) {
  if (wer_grid.empty()) throw ValidationError("perturb: empty WER grid");
  if (seeds.empty()) throw ValidationError("perturb: no seeds");
  for (double w : wer_grid) {
    if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("perturb: WER outside [0,1]");
  }
  if (!std::is_sorted(wer_grid.begin(), wer_grid.end())) {
    throw ValidationError("perturb: WER grid must be ascending");
  }
  Corpus corpus = load_corpus_file(corpus_path, cfg);
  NoiseProfile base = profile_path ? load_noise_profile(*profile_path) : default_noise_profile();
  SweepReport s;
  s.corpus_hash = corpus_hash(corpus);
  s.wer_grid = wer_grid;
  s.seeds = seeds;
  std::vector<std::vector<SweepPoint>> by_seed;
  for (std::uint64_t seed : seeds) {
    NoiseProfile p = base;
    p.seed = seed;
    by_seed.push_back(degradation_sweep(corpus, cfg, p, wer_grid, jobs));
  }
  for (std::size_t w = 0; w < wer_grid.size(); ++w) {
    for (const auto& run : by_seed) s.points.push_back(run[w]);
  }
  return s;
}

std::string format_sweep(const SweepReport& s, OutputFormat fmt) {
  const std::size_t k = s.seeds.size();
  std::vector<SweepMetrics> means(s.wer_grid.size());
  for (std::size_t w = 0; w < s.wer_grid.size(); ++w) {
    for (std::size_t i = 0; i < k; ++i) {
      means[w].add(SweepMetrics::of(s.points[w * k + i]), 1.0 / static_cast<double>(k));
    }
  }
  std::ostringstream out;
  switch (fmt) {
    case OutputFormat::JsonLines:
      for (const auto& p : s.points) {
        nlohmann::json j = {{"wer", p.wer}, {"seed", p.seed}};
        for (const auto& [name, v] : SweepMetrics::of(p).named()) j[name] = v;
        out << j.dump() << '\n';
      }
      for (std::size_t w = 0; w < s.wer_grid.size(); ++w) {
        nlohmann::json j = {{"wer", s.wer_grid[w]}, {"seed", "mean"}, {"seeds", k}};
        for (const auto& [name, v] : means[w].named()) j[name] = v;
        out << j.dump() << '\n';
      }
      break;
    case OutputFormat::Csv: {
      out << "wer,seed";
      for (const auto& [name, v] : SweepMetrics{}.named()) out << ',' << name;
      out << '\n';
      for (const auto& p : s.points) {
        out << num("%.17g", p.wer) << ',' << p.seed;
        for (const auto& [name, v] : SweepMetrics::of(p).named()) out << ',' << num("%.17g", v);
        out << '\n';
      }
      for (std::size_t w = 0; w < s.wer_grid.size(); ++w) {
        out << num("%.17g", s.wer_grid[w]) << ",mean";
        for (const auto& [name, v] : means[w].named()) out << ',' << num("%.17g", v);
        out << '\n';
      }
      break;
    }
    case OutputFormat::Table: {
      out << "mean over " << k << " seed(s)\n";
      out << "   WER";
      for (const auto& [name, v] : SweepMetrics{}.named()) out << "  " << right(name, 6);
      out << '\n';
      for (std::size_t w = 0; w < s.wer_grid.size(); ++w) {
        out << num("%6.2f", s.wer_grid[w]);
        for (const auto& [name, v] : means[w].named()) {
          out << "  " << right(num("%.4f", v), std::max<std::size_t>(6, std::string_view(name).size()));
        }
        out << '\n';
      }
      break;
    }
  }
  return out.str();
}

PredictionSet cmd_parse(const std::string& corpus_path, const WeightConfig& cfg, int jobs) {
  Corpus corpus = load_corpus_file(corpus_path, cfg);
  return parse_corpus(corpus, default_lexicon(), cfg, jobs);
}

RunResult cmd_run_model(const std::string& corpus_path, const std::string& endpoint_path,
                        const WeightConfig& cfg) {
  EndpointConfig ep = load_endpoint_config(endpoint_path);
  Corpus corpus = load_corpus_file(corpus_path, cfg);
  return run_model(corpus, ep);
}

std::string predictions_to_string(const PredictionSet& preds) {
  std::ostringstream out;
  write_predictions(out, preds);
  return out.str();
}

std::string manifest_to_string(const RunManifest& m) {
  std::ostringstream out;
  write_manifest(out, m);
  return out.str();
}

}  // namespace atceval
