#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "atceval/baseline_parser.hpp"
#include "atceval/commands.hpp"
#include "atceval/corpus_io.hpp"
#include "atceval/perturbation.hpp"
#include "atceval/report.hpp"
#include "atceval/risk_scoring.hpp"

namespace py = pybind11;
using namespace atceval;

namespace {

// Values cross the boundary as plain Python dicts/lists via the json module.
py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::object& o) {
  auto text = py::module_::import("json").attr("dumps")(o).cast<std::string>();
  return nlohmann::json::parse(text);
}

WeightConfig config_of(const std::optional<std::string>& path) { return resolve_config(path); }

OutputFormat format_of(const std::string& name) {
  auto f = output_format_from_string(name);
  if (!f) throw ConfigError("unknown format '" + name + "'");
  return *f;
}

Corpus corpus_from_text(const std::string& text) {
  std::istringstream in(text);
  return load_corpus(in);
}

PredictionSet predictions_from_text(const std::string& text) {
  std::istringstream in(text);
  return load_predictions(in);
}

}  // namespace

PYBIND11_MODULE(_atceval, m) {
  m.doc() = "Consequence-aware scoring of ATC language understanding";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def("default_config", [] { return to_py(to_json(default_weight_config())); });
  m.def("config_hash", [](const py::object& cfg) {
    return config_hash(weight_config_from_json(from_py(cfg)));
  });

  m.def(
      "generate_corpus",
      [](std::uint64_t seed, std::size_t n, std::tuple<double, double, double> mix) {
        try {
          return corpus_to_string(
              generate_synthetic_corpus(seed, n, {std::get<0>(mix), std::get<1>(mix), std::get<2>(mix)}));
        } catch (const std::invalid_argument& e) {
          throw ValidationError(e.what());
        }
      },
      py::arg("seed"), py::arg("n"), py::arg("mix") = std::make_tuple(0.48, 0.26, 0.26),
      "Seeded synthetic corpus as JSONL text.");

  m.def(
      "validate",
      [](const std::string& corpus_path, const std::optional<std::string>& config) {
        return cmd_validate(corpus_path, config_of(config)).violations;
      },
      py::arg("corpus_path"), py::arg("config") = py::none(), "Every schema violation; empty when valid.");

  m.def(
      "parse_transcript",
      [](const std::string& transcript) { return to_py(to_json(parse_transcript(transcript).prediction)); },
      py::arg("transcript"));

  m.def(
      "parse",
      [](const std::string& corpus_path, const std::optional<std::string>& config, int jobs) {
        py::gil_scoped_release release;
        return predictions_to_string(cmd_parse(corpus_path, config_of(config), jobs));
      },
      py::arg("corpus_path"), py::arg("config") = py::none(), py::arg("jobs") = 1,
      "Baseline parser predictions as JSONL text.");

  m.def(
      "parse_model_output",
      [](const std::string& raw, const std::string& utterance_id) {
        auto out = parse_model_output(raw, utterance_id);
        py::dict d;
        d["prediction"] = to_py(to_json(out.prediction));
        d["diagnostics"] = out.diagnostics;
        d["populated"] = out.populated;
        return d;
      },
      py::arg("raw"), py::arg("utterance_id") = "");

  m.def(
      "evaluate",
      [](const std::string& corpus_path, const std::string& predictions_path,
         const std::optional<std::string>& config, int jobs) {
        EvaluationReport r;
        {
          py::gil_scoped_release release;
          r = cmd_evaluate(corpus_path, predictions_path, config_of(config), jobs);
        }
        return to_py(to_json(r));
      },
      py::arg("corpus_path"), py::arg("predictions_path"), py::arg("config") = py::none(),
      py::arg("jobs") = 1, "Evaluation report as a dict.");

  m.def(
      "evaluate_text",
      [](const std::string& corpus_jsonl, const std::string& predictions_jsonl) {
        auto r = evaluate(corpus_from_text(corpus_jsonl), predictions_from_text(predictions_jsonl),
                          default_weight_config());
        return to_py(to_json(r));
      },
      py::arg("corpus_jsonl"), py::arg("predictions_jsonl"));

  m.def(
      "format_report",
      [](const py::object& report, const std::string& fmt) {
        return format_report(evaluation_report_from_json(from_py(report)), format_of(fmt));
      },
      py::arg("report"), py::arg("format") = "table");

  m.def(
      "compare",
      [](const std::vector<std::string>& report_paths, const std::string& fmt) {
        return format_comparison(cmd_compare(report_paths), format_of(fmt));
      },
      py::arg("report_paths"), py::arg("format") = "table");

  m.def(
      "score_utterance",
      [](const py::object& utterance, const std::optional<py::object>& prediction) {
        Utterance u = utterance_from_json(from_py(utterance));
        std::optional<Prediction> p;
        if (prediction && !prediction->is_none()) p = prediction_from_json(from_py(*prediction));
        auto s = score_utterance(u, p ? &*p : nullptr, default_weight_config());
        py::dict d;
        d["score"] = s.score;
        d["r_coef"] = s.r_coef;
        d["slot_weighted_fraction"] = s.slot_weighted_fraction;
        d["type_correct"] = s.type_correct;
        d["strict"] = s.strict;
        d["hallucinated_slots"] = s.hallucinated_slots;
        d["slot_matches"] = s.slot_matches;
        return d;
      },
      py::arg("utterance"), py::arg("prediction") = py::none());

  m.def(
      "perturb",
      [](const std::string& transcript, double wer, std::uint64_t seed, const std::string& utterance_id) {
        NoiseProfile p = default_noise_profile();
        p.target_wer = wer;
        p.seed = seed;
        auto r = perturb_transcript(transcript, p, utterance_id);
        py::list ops;
        for (const auto& op : r.op_log) {
          py::dict o;
          o["kind"] = std::string(to_string(op.kind));
          o["position"] = op.position;
          o["before"] = op.before;
          o["after"] = op.after;
          ops.append(o);
        }
        py::dict d;
        d["original"] = r.original;
        d["perturbed"] = r.perturbed;
        d["realized_wer"] = r.realized_wer;
        d["op_log"] = ops;
        return d;
      },
      py::arg("transcript"), py::arg("wer"), py::arg("seed") = 0, py::arg("utterance_id") = "");

  m.def(
      "sweep",
      [](const std::string& corpus_path, const std::vector<double>& wer_grid,
         const std::vector<std::uint64_t>& seeds, int jobs) {
        std::string text;
        {
          py::gil_scoped_release release;
          auto s = cmd_perturb_sweep(corpus_path, std::nullopt, wer_grid, seeds,
                                     default_weight_config(), jobs);
          text = format_sweep(s, OutputFormat::JsonLines);
        }
        py::list rows;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) {
          if (!line.empty()) rows.append(to_py(nlohmann::json::parse(line)));
        }
        return rows;
      },
      py::arg("corpus_path"), py::arg("wer_grid") = std::vector<double>{0.0, 0.1, 0.3, 0.5},
      py::arg("seeds") = std::vector<std::uint64_t>{0, 1, 2, 3, 4}, py::arg("jobs") = 1,
      "Degradation sweep rows (per seed, then per-WER means).");
}
