#include "atceval/baseline_parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "atceval/matching.hpp"
#include "parallel.hpp"

namespace atceval {

namespace {

constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

std::vector<std::string> split_words(std::string_view phrase) {
  return tokenize(phrase).tokens;
}

struct Extracted {
  std::string slot;  // slot name, or "" for entity-only items
  EntityType type;
  std::string value;
  std::size_t begin;  // token range [begin, end)
  std::size_t end;
};

class TranscriptParser {
 public:
  TranscriptParser(std::string_view transcript, const PhraseLexicon& lex)
      : lex_(lex), tokens_(tokenize(transcript).tokens), consumed_(tokens_.size(), false) {
    std::size_t offset = 0;
    for (const auto& t : tokens_) {
      if (!normalized_.empty()) {
        normalized_ += ' ';
        ++offset;
      }
      offsets_.push_back(offset);
      normalized_ += t;
      offset += t.size();
    }
  }

  ParseResult run(const WeightConfig& cfg) {
    ParseResult result;
    result.trace.normalized = normalized_;
    trace_ = &result.trace;

    extract_callsign();
    extract_boundary();
    extract_runway();
    extract_frequency();
    extract_gate();
    extract_taxiway();
    extract_phrase_item(lex_.qualifiers, "qualifier", EntityType::Qualifier);
    extract_vehicle();
    extract_phrase_item(lex_.greetings, "", EntityType::Greet);
    extract_phrase_item(lex_.reports, "", EntityType::Report);
    extract_controller();

    Prediction& p = result.prediction;
    ActionAnnotation action;
    action.action_type = classify_action();
    for (const auto& item : items_) {
      if (!item.slot.empty() && cfg.is_critical(action.action_type, item.slot)) {
        action.slots.emplace(item.slot, item.value);
      }
    }
    std::sort(items_.begin(), items_.end(),
              [](const Extracted& a, const Extracted& b) { return a.begin < b.begin; });
    for (const auto& item : items_) p.entities.push_back(EntitySpan{item.type, item.value});
    p.speaker = infer_speaker();
    p.intent = infer_intent(action.action_type);
    p.action = std::move(action);
    return result;
  }

 private:
  std::optional<char> digit_at(std::size_t i) const {
    if (i >= tokens_.size() || consumed_[i]) return std::nullopt;
    auto it = lex_.number_words.find(tokens_[i]);
    if (it != lex_.number_words.end()) return it->second;
    const std::string& t = tokens_[i];
    if (t.size() == 1 && std::isdigit(static_cast<unsigned char>(t[0]))) return t[0];
    return std::nullopt;
  }

  std::optional<char> letter_at(std::size_t i) const {
    if (i >= tokens_.size() || consumed_[i]) return std::nullopt;
    auto it = lex_.phonetic_alphabet.find(tokens_[i]);
    if (it == lex_.phonetic_alphabet.end()) return std::nullopt;
    return it->second;
  }

  bool phrase_at(std::size_t i, const std::vector<std::string>& words, bool allow_consumed) const {
    if (words.empty() || i + words.size() > tokens_.size()) return false;
    for (std::size_t k = 0; k < words.size(); ++k) {
      if (tokens_[i + k] != words[k]) return false;
      if (!allow_consumed && consumed_[i + k]) return false;
    }
    return true;
  }

  std::size_t find_phrase(const std::vector<std::string>& words, bool allow_consumed,
                          std::size_t from = 0) const {
    for (std::size_t i = from; i < tokens_.size(); ++i) {
      if (phrase_at(i, words, allow_consumed)) return i;
    }
    return kNpos;
  }

  void record(const std::string& rule, std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    std::size_t last = end - 1;
    trace_->matched_rules.push_back(
        RuleMatch{rule, offsets_[begin], offsets_[last] + tokens_[last].size()});
  }

  void take(std::string slot, EntityType type, std::string value, std::size_t begin,
            std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) consumed_[i] = true;
    record(std::string(to_string(type)), begin, end);
    items_.push_back(Extracted{std::move(slot), type, std::move(value), begin, end});
  }

  // Letter followed by up to two digits: "echo one" -> "e1".
  std::optional<std::pair<std::string, std::size_t>> designator_at(std::size_t i) const {
    auto l = letter_at(i);
    if (!l) return std::nullopt;
    std::string value(1, *l);
    std::size_t j = i + 1;
    while (j < tokens_.size() && value.size() < 3) {
      auto d = digit_at(j);
      if (!d) break;
      value.push_back(*d);
      ++j;
    }
    return std::make_pair(value, j);
  }

  // Up to two digits and an optional left/center/right suffix: "02l".
  std::optional<std::pair<std::string, std::size_t>> runway_designator_at(std::size_t i) const {
    std::string value;
    std::size_t j = i;
    while (j < tokens_.size() && value.size() < 2) {
      auto d = digit_at(j);
      if (!d) break;
      value.push_back(*d);
      ++j;
    }
    if (value.empty()) return std::nullopt;
    if (j < tokens_.size() && !consumed_[j]) {
      auto s = lex_.runway_suffixes.find(tokens_[j]);
      if (s != lex_.runway_suffixes.end()) {
        value.push_back(s->second);
        ++j;
      }
    }
    return std::make_pair(value, j);
  }

  void extract_callsign() {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!lex_.callsign_airline_map.contains(tokens_[i])) continue;
      std::string digits;
      std::size_t j = i + 1;
      while (j < tokens_.size() && j - i <= 4) {
        auto d = digit_at(j);
        if (!d) break;
        digits.push_back(*d);
        ++j;
      }
      if (digits.empty()) continue;
      callsign_begin_ = i;
      callsign_end_ = j;
      take("callsign", EntityType::Callsign, tokens_[i] + " " + digits, i, j);
      return;
    }
  }

  void extract_boundary() {
    for (const char* lead : {"hold short of", "holding short of"}) {
      auto words = split_words(lead);
      std::size_t at = find_phrase(words, true);
      if (at == kNpos) continue;
      std::size_t k = at + words.size();
      if (k < tokens_.size() && tokens_[k] == "runway" && !consumed_[k]) {
        if (auto r = runway_designator_at(k + 1)) {
          take("boundary", EntityType::Condition, "runway " + r->first, k, r->second);
          return;
        }
      }
      if (auto d = designator_at(k)) {
        take("boundary", EntityType::Condition, d->first, k, d->second);
        return;
      }
    }
  }

  void extract_runway() {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i] != "runway" || consumed_[i]) continue;
      if (auto r = runway_designator_at(i + 1)) {
        take("runway", EntityType::Runway, r->first, i + 1, r->second);
        consumed_[i] = true;
        return;
      }
    }
  }

  void extract_frequency() {
    for (std::size_t i = 1; i + 1 < tokens_.size(); ++i) {
      if (consumed_[i]) continue;
      if (std::find(lex_.decimal_markers.begin(), lex_.decimal_markers.end(), tokens_[i]) ==
          lex_.decimal_markers.end()) {
        continue;
      }
      std::size_t b = i;
      std::string whole;
      while (b > 0 && whole.size() < 3) {
        auto d = digit_at(b - 1);
        if (!d) break;
        whole.insert(whole.begin(), *d);
        --b;
      }
      std::string frac;
      std::size_t e = i + 1;
      while (e < tokens_.size() && frac.size() < 3) {
        auto d = digit_at(e);
        if (!d) break;
        frac.push_back(*d);
        ++e;
      }
      if (whole.empty() || frac.empty()) continue;
      take("frequency", EntityType::Frequency, whole + "." + frac, b, e);
      return;
    }
  }

  void extract_gate() {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (consumed_[i] || (tokens_[i] != "gate" && tokens_[i] != "stand")) continue;
      std::string value;
      std::size_t j = i + 1;
      if (auto l = letter_at(j)) {
        value.push_back(*l);
        ++j;
      }
      std::size_t digits = 0;
      while (j < tokens_.size() && digits < 3) {
        auto d = digit_at(j);
        if (!d) break;
        value.push_back(*d);
        ++digits;
        ++j;
      }
      if (digits == 0) continue;
      take("gate", EntityType::Gate, value, i + 1, j);
      consumed_[i] = true;
      return;
    }
  }

  void extract_taxiway() {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i] != "via" || consumed_[i]) continue;
      std::string value;
      std::size_t j = i + 1;
      while (auto d = designator_at(j)) {
        if (!value.empty()) value += ' ';
        value += d->first;
        j = d->second;
      }
      if (value.empty()) continue;
      take("taxiway", EntityType::Taxiway, value, i + 1, j);
      return;
    }
  }

  // Earliest unconsumed occurrence of any phrase; longer phrases win ties.
  void extract_phrase_item(const std::vector<std::string>& phrases, const std::string& slot,
                           EntityType type) {
    std::size_t best = kNpos;
    std::size_t best_len = 0;
    std::string best_phrase;
    for (const auto& phrase : phrases) {
      auto words = split_words(phrase);
      std::size_t at = find_phrase(words, false);
      if (at == kNpos) continue;
      if (best == kNpos || at < best || (at == best && words.size() > best_len)) {
        best = at;
        best_len = words.size();
        best_phrase = phrase;
      }
    }
    if (best == kNpos) return;
    take(slot, type, best_phrase, best, best + best_len);
  }

  void extract_vehicle() {
    static const std::vector<std::string> kLead = {"give", "way", "to"};
    static const std::vector<std::string> kStop = {"then", "and", "from", "behind", "on"};
    std::size_t at = find_phrase(kLead, true);
    if (at == kNpos) return;
    std::size_t b = at + kLead.size();
    while (b < tokens_.size() && !consumed_[b] && (tokens_[b] == "the" || tokens_[b] == "a")) ++b;
    std::size_t e = b;
    std::string value;
    while (e < tokens_.size() && !consumed_[e] &&
           std::find(kStop.begin(), kStop.end(), tokens_[e]) == kStop.end()) {
      if (!value.empty()) value += ' ';
      value += tokens_[e];
      ++e;
    }
    if (value.empty()) return;
    take("vehicle", EntityType::Vehicle, value, b, e);
  }

  void extract_controller() {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (consumed_[i]) continue;
      if (std::find(lex_.controller_names.begin(), lex_.controller_names.end(), tokens_[i]) !=
          lex_.controller_names.end()) {
        take("controller", EntityType::Controller, tokens_[i], i, i + 1);
        return;
      }
    }
  }

  ActionType classify_action() {
    for (ActionType a : lex_.action_priority) {
      auto it = lex_.action_trigger_patterns.find(a);
      if (it == lex_.action_trigger_patterns.end()) continue;
      for (const auto& phrase : it->second) {
        auto words = split_words(phrase);
        std::size_t at = find_phrase(words, true);
        if (at != kNpos) {
          record("trigger:" + std::string(to_string(a)), at, at + words.size());
          return a;
        }
      }
    }
    return ActionType::Unknown;
  }

  bool is_controller_name(std::size_t i) const {
    return i < tokens_.size() && std::find(lex_.controller_names.begin(),
                                           lex_.controller_names.end(),
                                           tokens_[i]) != lex_.controller_names.end();
  }

  bool callsign_initial() const { return callsign_begin_ == 0 && callsign_end_ > 0; }
  bool callsign_final() const {
    return callsign_end_ == tokens_.size() && callsign_end_ > 0 && callsign_begin_ > 0;
  }

  bool addresses_station() const {
    if (is_controller_name(0)) return true;
    for (const auto& item : items_) {
      if (item.type == EntityType::Greet && item.begin == 0) return is_controller_name(item.end);
    }
    return false;
  }

  std::optional<Speaker> infer_speaker() const {
    if (addresses_station() || callsign_final()) return Speaker::Pilot;
    if (callsign_initial()) return Speaker::Controller;
    return std::nullopt;
  }

  std::optional<Intent> infer_intent(ActionType action) const {
    if (action == ActionType::Greet) return Intent::Greet;
    if (callsign_final()) return Intent::Readback;
    if (is_controller_name(0) || action == ActionType::Inform) return Intent::Inform;
    if (callsign_initial()) return Intent::Instruction;
    return std::nullopt;
  }

  const PhraseLexicon& lex_;
  std::vector<std::string> tokens_;
  std::vector<bool> consumed_;
  std::vector<std::size_t> offsets_;
  std::string normalized_;
  std::vector<Extracted> items_;
  std::size_t callsign_begin_ = 0;
  std::size_t callsign_end_ = 0;
  ParseTrace* trace_ = nullptr;
};

}  // namespace

ParseResult parse_transcript(std::string_view transcript, const PhraseLexicon& lexicon,
                             const WeightConfig& cfg) {
  return TranscriptParser(transcript, lexicon).run(cfg);
}

PredictionSet parse_corpus(const Corpus& corpus, const PhraseLexicon& lexicon,
                           const WeightConfig& cfg, int jobs) {
  std::vector<Prediction> parsed(corpus.utterances.size());
  detail::parallel_for(parsed.size(), jobs, [&](std::size_t i) {
    const Utterance& u = corpus.utterances[i];
    parsed[i] = parse_transcript(u.transcript, lexicon, cfg).prediction;
    parsed[i].utterance_id = u.id;
  });
  PredictionSet preds;
  preds.model_name = "baseline-parser";
  for (auto& p : parsed) {
    std::string id = p.utterance_id;
    preds.predictions.emplace(std::move(id), std::move(p));
  }
  return preds;
}

RiskReport self_test_against(const Corpus& corpus, const WeightConfig& cfg,
                             const PhraseLexicon& lexicon) {
  return risk_report(corpus, parse_corpus(corpus, lexicon, cfg), cfg);
}

}  // namespace atceval
