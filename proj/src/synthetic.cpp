#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "atceval/corpus_io.hpp"
#include "atceval/lexicon.hpp"
#include "random_util.hpp"

namespace atceval {

namespace {

struct PhraseTemplate {
  ActionType action;
  Speaker speaker;
  Intent intent;
  const char* pattern;
};

using enum ActionType;
constexpr Speaker P = Speaker::Pilot;
constexpr Speaker C = Speaker::Controller;

const std::vector<PhraseTemplate>& template_bank() {
  static const std::vector<PhraseTemplate> bank = {
      {Hold, C, Intent::Instruction, "<callsign> hold short of <boundary>"},
      {Hold, C, Intent::Instruction, "<callsign> hold position"},
      {Hold, P, Intent::Readback, "hold short of <boundary> <callsign>"},
      {Hold, P, Intent::Readback, "holding short of <boundary> <callsign>"},

      {Taxi, C, Intent::Instruction, "<callsign> taxi via <taxiway>"},
      {Taxi, C, Intent::Instruction, "<callsign> taxi via <taxiway> hold short of <boundary>"},
      {Taxi, C, Intent::Instruction, "<callsign> taxi to runway <runway> via <taxiway>"},
      {Taxi, C, Intent::Instruction, "<callsign> continue via <taxiway> <qualifier>"},
      {Taxi, P, Intent::Readback, "taxi via <taxiway> hold short of <boundary> <callsign>"},
      {Taxi, P, Intent::Readback, "taxi to runway <runway> via <taxiway> <callsign>"},
      {Taxi, P, Intent::Readback, "continue via <taxiway> <qualifier> <callsign>"},

      {GiveWay, C, Intent::Instruction, "<callsign> give way to the <vehicle>"},
      {GiveWay, P, Intent::Readback, "give way to the <vehicle> <callsign>"},

      {Contact, C, Intent::Instruction, "<callsign> contact <controller> <frequency>"},
      {Contact, P, Intent::Readback, "contact <controller> <frequency> <callsign>"},
      {Contact, P, Intent::Readback, "<controller> <frequency> <callsign>"},

      {Pushback, C, Intent::Instruction, "<callsign> push back approved <qualifier>"},
      {Pushback, C, Intent::Instruction, "<callsign> gate <gate> push back approved <qualifier>"},
      {Pushback, P, Intent::Readback, "push back approved <qualifier> <callsign>"},
      {Pushback, P, Intent::Inform, "<controller> <callsign> gate <gate> request push back"},

      {ActionType::Inform, P, Intent::Inform, "<controller> <callsign> <report>"},
      {ActionType::Inform, C, Intent::Inform, "<callsign> <controller> <report>"},

      {ActionType::Greet, P, Intent::Greet, "<greeting> <controller> <callsign>"},
      {ActionType::Greet, P, Intent::Greet, "<greeting> <controller>"},
      {ActionType::Greet, C, Intent::Greet, "<callsign> <controller> <greeting>"},

      {Standby, C, Intent::Instruction, "<callsign> standby"},
      {Standby, P, Intent::Inform, "<controller> <callsign> standby"},

      {Unknown, P, Intent::Readback, "roger <callsign>"},
      {Unknown, P, Intent::Readback, "wilco <callsign>"},
      {Unknown, C, Intent::Instruction, "<callsign> say again"},
  };
  return bank;
}

// Action mix within each risk stratum, proportional to the annotated action counts
// of the reference ground-control corpus.
const std::map<RiskLevel, std::vector<std::pair<ActionType, double>>>& action_mix() {
  static const std::map<RiskLevel, std::vector<std::pair<ActionType, double>>> mix = {
      {RiskLevel::High, {{Taxi, 341}, {Hold, 115}, {GiveWay, 24}}},
      {RiskLevel::Medium, {{Contact, 149}, {Pushback, 112}}},
      {RiskLevel::Low,
       {{ActionType::Inform, 169}, {ActionType::Greet, 54}, {Unknown, 20}, {Standby, 16}}},
  };
  return mix;
}

const std::vector<std::string> kTaxiQualifiers = {"expedite",   "straight ahead", "first left",
                                                  "first right", "second left",   "second right"};
const std::vector<std::string> kPushQualifiers = {"face north", "face south", "face east",
                                                  "face west"};
const std::vector<std::string> kPilotReports = {"ready", "fully ready", "request start up",
                                                "on stand"};
const std::vector<std::string> kControllerReports = {"expect delay", "expect startup shortly"};
const std::vector<std::string> kRunways = {"02l", "02c", "02r", "20l", "20c", "20r"};
const std::vector<std::string> kFrequencies = {"121.725", "121.85", "124.3",
                                               "118.6",   "119.1",  "122.55"};
const std::string kTaxiwayLetters = "abcdefghjklmnprstuvwy";
const std::string kGateLetters = "abcdef";

struct Filled {
  std::string spoken;
  std::string value;
};

std::string random_digits(detail::Rng& rng, std::size_t min_len, std::size_t max_len) {
  std::size_t len = min_len + rng.index(max_len - min_len + 1);
  std::string d;
  d.push_back(static_cast<char>('1' + rng.index(9)));
  while (d.size() < len) d.push_back(static_cast<char>('0' + rng.index(10)));
  return d;
}

std::string taxiway_designator(detail::Rng& rng) {
  std::string d(1, kTaxiwayLetters[rng.index(kTaxiwayLetters.size())]);
  if (rng.chance(0.5)) d.push_back(static_cast<char>('1' + rng.index(9)));
  return d;
}

Filled fill(const std::string& placeholder, const PhraseTemplate& t, detail::Rng& rng) {
  const PhraseLexicon& lex = default_lexicon();
  if (placeholder == "callsign") {
    auto it = lex.callsign_airline_map.begin();
    std::advance(it, static_cast<long>(rng.index(lex.callsign_airline_map.size())));
    std::string digits = random_digits(rng, 1, 4);
    return {it->first + " " + spoken_digits(digits), it->first + " " + digits};
  }
  if (placeholder == "taxiway") {
    std::size_t count = 1 + rng.index(3);
    Filled f;
    for (std::size_t i = 0; i < count; ++i) {
      std::string d = taxiway_designator(rng);
      if (i) {
        f.spoken += ' ';
        f.value += ' ';
      }
      f.spoken += spoken_designator(d);
      f.value += d;
    }
    return f;
  }
  if (placeholder == "boundary") {
    if (rng.chance(0.5)) {
      const std::string& r = rng.pick(kRunways);
      return {"runway " + spoken_runway(r), "runway " + r};
    }
    std::string d = taxiway_designator(rng);
    return {spoken_designator(d), d};
  }
  if (placeholder == "runway") {
    const std::string& r = rng.pick(kRunways);
    return {spoken_runway(r), r};
  }
  if (placeholder == "qualifier") {
    const auto& pool = t.action == Pushback ? kPushQualifiers : kTaxiQualifiers;
    const std::string& q = rng.pick(pool);
    return {q, q};
  }
  if (placeholder == "vehicle") {
    const std::string& v = rng.pick(lex.vehicles);
    return {v, v};
  }
  if (placeholder == "gate") {
    std::string d(1, kGateLetters[rng.index(kGateLetters.size())]);
    d += random_digits(rng, 1, 2);
    return {spoken_designator(d), d};
  }
  if (placeholder == "frequency") {
    const std::string& f = rng.pick(kFrequencies);
    return {spoken_frequency(f), f};
  }
  if (placeholder == "controller") {
    const std::string& c = rng.pick(lex.controller_names);
    return {c, c};
  }
  if (placeholder == "greeting") {
    const std::string& g = rng.pick(lex.greetings);
    return {g, g};
  }
  if (placeholder == "report") {
    const auto& pool = t.speaker == Speaker::Pilot ? kPilotReports : kControllerReports;
    const std::string& r = rng.pick(pool);
    return {r, r};
  }
  throw std::logic_error("unknown template placeholder <" + placeholder + ">");
}

EntityType placeholder_entity(const std::string& placeholder) {
  static const std::map<std::string, EntityType> m = {
      {"callsign", EntityType::Callsign},   {"taxiway", EntityType::Taxiway},
      {"boundary", EntityType::Condition},  {"runway", EntityType::Runway},
      {"qualifier", EntityType::Qualifier}, {"vehicle", EntityType::Vehicle},
      {"gate", EntityType::Gate},           {"frequency", EntityType::Frequency},
      {"controller", EntityType::Controller}, {"greeting", EntityType::Greet},
      {"report", EntityType::Report},
  };
  return m.at(placeholder);
}

Utterance realize(const PhraseTemplate& t, const WeightConfig& cfg, detail::Rng& rng) {
  Utterance u;
  u.speaker = t.speaker;
  u.intent = t.intent;
  u.action.action_type = t.action;
  u.risk_level = cfg.risk_of(t.action);
  std::string pattern = t.pattern;
  std::string transcript;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    auto open = pattern.find('<', pos);
    if (open == std::string::npos) {
      transcript += pattern.substr(pos);
      break;
    }
    transcript += pattern.substr(pos, open - pos);
    auto close = pattern.find('>', open);
    std::string name = pattern.substr(open + 1, close - open - 1);
    Filled f = fill(name, t, rng);
    transcript += f.spoken;
    u.entities.push_back(EntitySpan{placeholder_entity(name), f.value});
    if (cfg.is_critical(t.action, name)) {
      u.action.slots[name] = f.value;
    } else if (name == "report") {
      // non-critical extra, kept for lossless annotation
      u.action.slots[name] = f.value;
    }
    pos = close + 1;
  }
  u.transcript = transcript;
  return u;
}

}  // namespace

std::map<RiskLevel, std::size_t> risk_counts(std::size_t n, const RiskMix& mix) {
  const double props[3] = {mix.high, mix.medium, mix.low};
  const RiskLevel levels[3] = {RiskLevel::High, RiskLevel::Medium, RiskLevel::Low};
  std::size_t counts[3];
  double remainders[3];
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = props[i] * static_cast<double>(n);
    // guard against 0.48 * 100 = 47.999999...
    double fl = std::floor(exact + 1e-9);
    counts[i] = static_cast<std::size_t>(fl);
    remainders[i] = exact - fl;
    assigned += counts[i];
  }
  while (assigned < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i) {
      if (remainders[i] > remainders[best] + 1e-12) best = i;
    }
    ++counts[best];
    remainders[best] = -1.0;
    ++assigned;
  }
  std::map<RiskLevel, std::size_t> out;
  for (int i = 0; i < 3; ++i) out[levels[i]] = counts[i];
  return out;
}

Corpus generate_synthetic_corpus(std::uint64_t seed, std::size_t n, const RiskMix& mix) {
  if (n == 0) throw std::invalid_argument("synthetic corpus size must be at least 1");
  for (double p : {mix.high, mix.medium, mix.low}) {
    if (!(p >= 0.0) || p > 1.0) throw std::invalid_argument("risk proportions must lie in [0,1]");
  }
  if (std::abs(mix.high + mix.medium + mix.low - 1.0) > 1e-9) {
    throw std::invalid_argument("risk proportions must sum to 1");
  }
  const WeightConfig cfg = default_weight_config();
  detail::Rng rng(seed);

  std::vector<RiskLevel> strata;
  for (const auto& [level, count] : risk_counts(n, mix)) strata.insert(strata.end(), count, level);
  rng.shuffle(strata);

  std::map<ActionType, std::vector<const PhraseTemplate*>> by_action;
  for (const auto& t : template_bank()) by_action[t.action].push_back(&t);

  const int width = std::max(4, static_cast<int>(std::to_string(n).size()));
  Corpus corpus;
  corpus.metadata = {{"source", "synthetic"},
                     {"seed", std::to_string(seed)},
                     {"generator", "atceval-templates-v1"}};
  corpus.utterances.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& choices = action_mix().at(strata[i]);
    std::vector<double> weights;
    for (const auto& c : choices) weights.push_back(c.second);
    ActionType action = choices[rng.weighted(weights)].first;
    const PhraseTemplate& t = *rng.pick(by_action.at(action));
    Utterance u = realize(t, cfg, rng);
    std::ostringstream id;
    id << 'u' << std::setw(width) << std::setfill('0') << (i + 1);
    u.id = id.str();
    corpus.utterances.push_back(std::move(u));
  }
  return corpus;
}

}  // namespace atceval
