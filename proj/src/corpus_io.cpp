#include "atceval/corpus_io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

namespace atceval {

namespace {

using nlohmann::json;

std::string dump_line(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

json parse_line(const std::string& line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": invalid JSON record (" +
                          e.what() + ")");
  }
}

}  // namespace

const Prediction* PredictionSet::find(const std::string& utterance_id) const {
  auto it = predictions.find(utterance_id);
  return it == predictions.end() ? nullptr : &it->second;
}

namespace {

// With `violations` set, record-level problems are collected and scanning
// continues; otherwise the first one throws.
Corpus scan_corpus(std::istream& in, const WeightConfig& cfg, std::vector<std::string>* violations) {
  Corpus corpus;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  const auto report = [&](std::string msg) {
    if (!violations) throw ValidationError(msg);
    violations->push_back(std::move(msg));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = parse_line(line, line_no);
    } catch (const ValidationError& e) {
      if (!have_header) throw;
      report(e.what());
      continue;
    }
    if (!have_header) {
      if (!j.is_object() || j.value("format", "") != kCorpusFormat) {
        throw ValidationError(where + "field 'format': expected header record with format '" +
                              kCorpusFormat + "'");
      }
      if (j.value("version", -1) != kFormatVersion) {
        throw ValidationError(where + "field 'version': unsupported corpus format version");
      }
      if (j.contains("metadata")) {
        try {
          corpus.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
        } catch (const json::exception&) {
          throw ValidationError(where + "field 'metadata' must map strings to strings");
        }
      }
      have_header = true;
      continue;
    }
    Utterance u;
    try {
      u = utterance_from_json(j);
      check_risk_level(u, cfg);
    } catch (const Error& e) {
      report(where + e.what());
      continue;
    }
    if (!seen.insert(u.id).second) {
      report(where + "duplicate utterance id '" + u.id + "'");
      continue;
    }
    corpus.utterances.push_back(std::move(u));
  }
  if (!have_header) throw ValidationError("empty corpus file: missing header record");
  return corpus;
}

}  // namespace

Corpus load_corpus(std::istream& in, const WeightConfig& cfg) {
  return scan_corpus(in, cfg, nullptr);
}

std::vector<std::string> validate_corpus(std::istream& in, const WeightConfig& cfg) {
  std::vector<std::string> violations;
  try {
    scan_corpus(in, cfg, &violations);
  } catch (const ValidationError& e) {
    violations.emplace_back(e.what());
  }
  return violations;
}

Corpus load_corpus_file(const std::string& path, const WeightConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  return load_corpus(in, cfg);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  json header = {{"format", kCorpusFormat}, {"version", kFormatVersion}};
  header["metadata"] = corpus.metadata;
  out << dump_line(header) << '\n';
  for (const auto& u : corpus.utterances) out << dump_line(to_json(u)) << '\n';
}

std::string corpus_to_string(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus(out, corpus);
  return out.str();
}

std::string corpus_hash(const Corpus& corpus) { return sha256_hex(corpus_to_string(corpus)); }

PredictionSet load_predictions(std::istream& in) {
  PredictionSet preds;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json j = parse_line(line, line_no);
    if (first) {
      first = false;
      if (j.is_object() && j.contains("format")) {
        if (j.at("format") != kPredictionsFormat) {
          throw ValidationError("line " + std::to_string(line_no) +
                                ": field 'format': expected '" + kPredictionsFormat + "'");
        }
        if (j.value("version", -1) != kFormatVersion) {
          throw ValidationError("line " + std::to_string(line_no) +
                                ": field 'version': unsupported predictions format version");
        }
        preds.model_name = j.value("model_name", "");
        continue;
      }
    }
    Prediction p;
    try {
      p = prediction_from_json(j);
    } catch (const Error& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    std::string id = p.utterance_id;
    if (!preds.predictions.emplace(id, std::move(p)).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate prediction for utterance id '" + id + "'");
    }
  }
  return preds;
}

PredictionSet load_predictions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open predictions file '" + path + "'");
  return load_predictions(in);
}

void write_predictions(std::ostream& out, const PredictionSet& preds) {
  json header = {{"format", kPredictionsFormat},
                 {"version", kFormatVersion},
                 {"model_name", preds.model_name}};
  out << dump_line(header) << '\n';
  for (const auto& [id, p] : preds.predictions) out << dump_line(to_json(p)) << '\n';
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace atceval
