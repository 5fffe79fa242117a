#include "atceval/perturbation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "atceval/baseline_parser.hpp"
#include "atceval/classification_metrics.hpp"
#include "parallel.hpp"
#include "random_util.hpp"

namespace atceval {

namespace {

using Confusions = std::map<std::string, std::vector<std::pair<std::string, double>>>;

Confusions default_confusions() {
  return {
      // digits
      {"zero", {{"two", 1}, {"hero", 1}}},
      {"one", {{"nine", 1}, {"won", 2}}},
      {"two", {{"three", 1}, {"to", 2}, {"zero", 1}}},
      {"three", {{"tree", 2}, {"two", 1}}},
      {"four", {{"for", 2}, {"five", 1}}},
      {"five", {{"nine", 2}, {"fife", 1}}},
      {"six", {{"sixty", 1}, {"fix", 1}}},
      {"seven", {{"eleven", 1}, {"heaven", 1}}},
      {"eight", {{"ate", 2}, {"eighty", 1}}},
      {"nine", {{"five", 2}, {"mine", 1}}},
      {"niner", {{"five", 2}, {"minor", 1}}},
      // phonetic alphabet
      {"alpha", {{"alfa", 1}, {"delta", 1}}},
      {"bravo", {{"brava", 1}, {"delta", 1}}},
      {"charlie", {{"charley", 1}, {"sierra", 1}}},
      {"delta", {{"bravo", 1}, {"dealt", 1}}},
      {"echo", {{"eco", 1}, {"golf", 1}}},
      {"foxtrot", {{"fox", 1}}},
      {"golf", {{"gulf", 2}, {"echo", 1}}},
      {"hotel", {{"motel", 1}}},
      {"juliet", {{"julie", 1}}},
      {"kilo", {{"keelo", 1}, {"kilowatt", 1}}},
      {"lima", {{"lemur", 1}}},
      {"mike", {{"bike", 1}, {"like", 1}}},
      {"november", {{"number", 1}}},
      {"papa", {{"pop", 1}}},
      {"romeo", {{"roma", 1}}},
      {"sierra", {{"sierre", 1}, {"charlie", 1}}},
      {"tango", {{"tangle", 1}}},
      {"uniform", {{"unicorn", 1}}},
      {"victor", {{"vector", 2}}},
      {"whiskey", {{"risky", 1}}},
      {"yankee", {{"yank", 1}}},
      // movement and constraint words
      {"hold", {{"continue", 1}, {"hole", 1}}},
      {"continue", {{"hold", 1}}},
      {"short", {{"sort", 1}}},
      {"runway", {{"run", 1}, {"rain", 1}}},
      {"taxi", {{"taxis", 1}}},
      {"via", {{"fire", 1}}},
      {"contact", {{"contract", 1}}},
      {"decimal", {{"desmond", 1}}},
      {"gate", {{"late", 1}}},
  };
}

std::vector<std::pair<std::string, double>> build_vocabulary() {
  std::map<std::string, double> counts;
  Corpus bank = generate_synthetic_corpus(0, 500);
  for (const auto& u : bank.utterances) {
    std::istringstream words(u.transcript);
    std::string w;
    while (words >> w) counts[w] += 1.0;
  }
  return {counts.begin(), counts.end()};
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool forbidden_swap(const std::string& from, const std::string& to) {
  // left/right reversals are not treated as acoustic confusions
  return (from == "left" && to == "right") || (from == "right" && to == "left");
}

const std::string& weighted_pick(detail::Rng& rng,
                                 const std::vector<std::pair<std::string, double>>& options) {
  std::vector<double> w;
  w.reserve(options.size());
  for (const auto& o : options) w.push_back(o.second);
  return options[rng.weighted(w)].first;
}

std::string substitute(const std::string& token, const NoiseProfile& profile, detail::Rng& rng) {
  const std::string key = lower(token);
  auto it = profile.confusion_table.find(key);
  if (it != profile.confusion_table.end() && !it->second.empty()) {
    return weighted_pick(rng, it->second);
  }
  std::vector<std::pair<std::string, double>> pool;
  for (const auto& v : profile.vocabulary) {
    if (v.first != key && !forbidden_swap(key, v.first) && v.second > 0) pool.push_back(v);
  }
  if (pool.empty()) return "uh";
  return weighted_pick(rng, pool);
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

int kind_rank(EditKind k) { return k == EditKind::Insertion ? 0 : 1; }

}  // namespace

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::Substitution: return "substitution";
    case EditKind::Deletion: return "deletion";
    case EditKind::Insertion: return "insertion";
  }
  return "?";
}

NoiseProfile default_noise_profile() {
  static const std::vector<std::pair<std::string, double>> vocab = build_vocabulary();
  NoiseProfile p;
  p.confusion_table = default_confusions();
  p.vocabulary = vocab;
  return p;
}

std::vector<std::string> validate_noise_profile(const NoiseProfile& profile) {
  std::vector<std::string> problems;
  if (!(profile.target_wer >= 0.0 && profile.target_wer <= 1.0)) {
    problems.push_back("target_wer: outside [0,1]");
  }
  const OpMix& m = profile.op_mix;
  if (m.substitution < 0 || m.deletion < 0 || m.insertion < 0) {
    problems.push_back("op_mix: proportions must be non-negative");
  }
  if (std::abs(m.substitution + m.deletion + m.insertion - 1.0) > 1e-9) {
    problems.push_back("op_mix: proportions must sum to 1");
  }
  return problems;
}

nlohmann::json to_json(const NoiseProfile& profile) {
  nlohmann::json confusions = nlohmann::json::object();
  for (const auto& [token, options] : profile.confusion_table) confusions[token] = options;
  return nlohmann::json{{"target_wer", profile.target_wer},
                        {"op_mix",
                         {{"substitution", profile.op_mix.substitution},
                          {"deletion", profile.op_mix.deletion},
                          {"insertion", profile.op_mix.insertion}}},
                        {"confusion_table", confusions},
                        {"vocabulary", profile.vocabulary},
                        {"seed", profile.seed}};
}

NoiseProfile noise_profile_from_json(const nlohmann::json& j) {
  NoiseProfile p = default_noise_profile();
  try {
    if (j.contains("target_wer")) p.target_wer = j.at("target_wer").get<double>();
    if (j.contains("op_mix")) {
      const auto& m = j.at("op_mix");
      p.op_mix.substitution = m.value("substitution", p.op_mix.substitution);
      p.op_mix.deletion = m.value("deletion", p.op_mix.deletion);
      p.op_mix.insertion = m.value("insertion", p.op_mix.insertion);
    }
    if (j.contains("confusion_table")) {
      p.confusion_table = j.at("confusion_table").get<Confusions>();
    }
    if (j.contains("vocabulary")) {
      p.vocabulary = j.at("vocabulary").get<std::vector<std::pair<std::string, double>>>();
    }
    if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed noise profile: ") + e.what());
  }
  auto problems = validate_noise_profile(p);
  if (!problems.empty()) throw ConfigError("noise profile: " + problems.front());
  return p;
}

NoiseProfile load_noise_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open noise profile '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("noise profile '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return noise_profile_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

PerturbationRecord perturb_transcript(const std::string& transcript, const NoiseProfile& profile,
                                      const std::string& utterance_id) {
  if (auto problems = validate_noise_profile(profile); !problems.empty()) {
    throw ConfigError("noise profile: " + problems.front());
  }
  PerturbationRecord rec;
  rec.utterance_id = utterance_id;
  rec.original = transcript;
  rec.perturbed = transcript;

  const std::vector<std::string> tokens = split_ws(transcript);
  const std::size_t n = tokens.size();
  const auto edits = static_cast<std::size_t>(
      std::llround(std::clamp(profile.target_wer, 0.0, 1.0) * static_cast<double>(n)));
  if (edits == 0) return rec;

  const std::uint64_t stream = detail::splitmix64(
      profile.seed ^ detail::stable_hash(utterance_id) ^
      detail::splitmix64(std::bit_cast<std::uint64_t>(profile.target_wer)));
  detail::Rng rng(stream);

  const std::vector<double> mix = {profile.op_mix.substitution, profile.op_mix.deletion,
                                   profile.op_mix.insertion};
  std::size_t subs = 0, dels = 0, ins = 0;
  for (std::size_t k = 0; k < edits; ++k) {
    switch (rng.weighted(mix)) {
      case 0: ++subs; break;
      case 1: ++dels; break;
      default: ++ins; break;
    }
  }

  std::vector<std::size_t> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = i;
  rng.shuffle(positions);

  for (std::size_t k = 0; k < subs + dels; ++k) {
    const std::size_t pos = positions[k];
    if (k < subs) {
      rec.op_log.push_back({EditKind::Substitution, pos, tokens[pos],
                            substitute(tokens[pos], profile, rng)});
    } else {
      rec.op_log.push_back({EditKind::Deletion, pos, tokens[pos], ""});
    }
  }
  for (std::size_t k = 0; k < ins; ++k) {
    const std::size_t pos = rng.index(n + 1);
    const std::string word =
        profile.vocabulary.empty() ? std::string("uh") : weighted_pick(rng, profile.vocabulary);
    rec.op_log.push_back({EditKind::Insertion, pos, "", word});
  }
  std::stable_sort(rec.op_log.begin(), rec.op_log.end(), [](const EditOp& a, const EditOp& b) {
    if (a.position != b.position) return a.position < b.position;
    return kind_rank(a.kind) < kind_rank(b.kind);
  });
  rec.perturbed = replay_ops(transcript, rec.op_log);
  rec.realized_wer = static_cast<double>(rec.op_log.size()) / static_cast<double>(std::max<std::size_t>(n, 1));
  return rec;
}

std::string replay_ops(const std::string& original, const std::vector<EditOp>& ops) {
  if (ops.empty()) return original;
  const std::vector<std::string> tokens = split_ws(original);
  std::vector<std::vector<std::string>> inserts(tokens.size() + 1);
  std::vector<std::optional<std::string>> replaced(tokens.size());
  std::vector<bool> deleted(tokens.size(), false);
  for (const auto& op : ops) {
    switch (op.kind) {
      case EditKind::Insertion: inserts.at(op.position).push_back(op.after); break;
      case EditKind::Deletion: deleted.at(op.position) = true; break;
      case EditKind::Substitution: replaced.at(op.position) = op.after; break;
    }
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i <= tokens.size(); ++i) {
    for (const auto& w : inserts[i]) out.push_back(w);
    if (i == tokens.size()) break;
    if (deleted[i]) continue;
    out.push_back(replaced[i] ? *replaced[i] : tokens[i]);
  }
  return join(out);
}

Corpus perturb_corpus(const Corpus& corpus, const NoiseProfile& profile,
                      std::vector<PerturbationRecord>* records, int jobs) {
  Corpus out = corpus;
  std::vector<PerturbationRecord> recs(corpus.utterances.size());
  detail::parallel_for(recs.size(), jobs, [&](std::size_t i) {
    const Utterance& u = corpus.utterances[i];
    recs[i] = perturb_transcript(u.transcript, profile, u.id);
    out.utterances[i].transcript = recs[i].perturbed;
  });
  if (records) *records = std::move(recs);
  return out;
}

std::vector<SweepPoint> degradation_sweep(const Corpus& corpus, const WeightConfig& cfg,
                                          const NoiseProfile& profile_base,
                                          const std::vector<double>& wer_grid, int jobs) {
  if (!std::is_sorted(wer_grid.begin(), wer_grid.end())) {
    throw std::invalid_argument("wer_grid must be sorted ascending");
  }
  std::vector<SweepPoint> points(wer_grid.size());
  detail::parallel_for(wer_grid.size(), jobs, [&](std::size_t k) {
    NoiseProfile profile = profile_base;
    profile.target_wer = wer_grid[k];
    std::vector<PerturbationRecord> records;
    Corpus noisy = perturb_corpus(corpus, profile, &records);
    PredictionSet preds = parse_corpus(noisy, default_lexicon(), cfg);
    SweepPoint& pt = points[k];
    pt.wer = wer_grid[k];
    pt.seed = profile.seed;
    double realized = 0.0;
    for (const auto& r : records) realized += r.realized_wer;
    pt.mean_realized_wer = records.empty() ? 0.0 : realized / static_cast<double>(records.size());
    // scored against the clean annotations
    pt.risk = risk_report(corpus, preds, cfg);
    pt.entity_macro_f1 = entity_macro_f1(corpus, preds, cfg);
  });
  return points;
}

}  // namespace atceval
