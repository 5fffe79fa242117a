#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

#include "atceval/corpus_io.hpp"

namespace atceval {

namespace {

enum class Section { None, Speaker, Intent, Action, Slots, Entities };

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Removes markdown decoration: leading bullets and bold/italic markers.
std::string strip_markup(std::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  for (char c : raw) {
    if (c != '*' && c != '`') s.push_back(c);
  }
  s = trim(s);
  while (!s.empty() && (s[0] == '-' || s[0] == '+' || s[0] == '#')) s = trim(s.substr(1));
  if (s.rfind("\xE2\x80\xA2", 0) == 0) s = trim(s.substr(3));  // bullet
  return s;
}

std::optional<Section> section_for(const std::string& name) {
  std::string key;
  for (char c : lower(name)) key.push_back(c == ' ' || c == '-' ? '_' : c);
  if (key == "speaker" || key == "speaker_role") return Section::Speaker;
  if (key == "intent" || key == "intention") return Section::Intent;
  if (key == "action" || key == "action_type") return Section::Action;
  if (key == "slots" || key == "critical_slots") return Section::Slots;
  if (key == "entities") return Section::Entities;
  return std::nullopt;
}

bool is_empty_value(const std::string& v) {
  std::string l = lower(trim(v));
  return l.empty() || l == "none" || l == "null" || l == "n/a" || l == "-" || l == "[]";
}

// Splits "key: value" (or "key = value"); nullopt when there is no separator.
std::optional<std::pair<std::string, std::string>> split_item(const std::string& line) {
  auto pos = line.find(':');
  auto eq = line.find('=');
  if (pos == std::string::npos || (eq != std::string::npos && eq < pos)) pos = eq;
  if (pos == std::string::npos) return std::nullopt;
  return std::make_pair(trim(line.substr(0, pos)), trim(line.substr(pos + 1)));
}

std::string strip_quotes(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    v = v.substr(1, v.size() - 2);
  }
  return trim(v);
}

}  // namespace

TemplateParseOutcome parse_model_output(std::string_view raw_text,
                                        const std::string& utterance_id) {
  TemplateParseOutcome out;
  out.prediction.utterance_id = utterance_id;
  if (trim(raw_text).empty()) {
    out.diagnostics.emplace_back("response", "empty response");
    return out;
  }

  std::optional<std::string> speaker_raw, intent_raw, action_raw;
  bool saw_slots = false;
  bool saw_entities = false;
  std::vector<std::string> slot_lines, entity_lines;
  Section current = Section::None;

  std::istringstream in{std::string(raw_text)};
  std::string raw_line;
  while (std::getline(in, raw_line)) {
    std::string line = strip_markup(raw_line);
    if (line.empty()) continue;
    auto item = split_item(line);
    if (item) {
      if (auto sec = section_for(item->first)) {
        current = *sec;
        const std::string& value = item->second;
        switch (*sec) {
          case Section::Speaker:
            if (!speaker_raw) speaker_raw = value;
            break;
          case Section::Intent:
            if (!intent_raw) intent_raw = value;
            break;
          case Section::Action:
            if (!action_raw) action_raw = value;
            break;
          case Section::Slots:
            saw_slots = true;
            if (!is_empty_value(value)) {
              // inline form: "SLOTS: callsign=x; taxiway=y"
              std::istringstream parts(value);
              std::string part;
              while (std::getline(parts, part, ';')) slot_lines.push_back(trim(part));
            }
            break;
          case Section::Entities:
            saw_entities = true;
            if (!is_empty_value(value)) {
              std::istringstream parts(value);
              std::string part;
              while (std::getline(parts, part, ';')) entity_lines.push_back(trim(part));
            }
            break;
          case Section::None:
            break;
        }
        continue;
      }
    }
    if (current == Section::Slots) {
      slot_lines.push_back(line);
    } else if (current == Section::Entities) {
      entity_lines.push_back(line);
    }
  }

  if (!speaker_raw && !intent_raw && !action_raw && !saw_slots && !saw_entities) {
    out.diagnostics.emplace_back("response", "no template sections found");
    return out;
  }

  Prediction& p = out.prediction;
  auto label = [](const std::string& v) { return strip_quotes(v); };

  if (!speaker_raw) {
    out.diagnostics.emplace_back("speaker", "missing section");
  } else if (auto s = speaker_from_string(label(*speaker_raw))) {
    p.speaker = *s;
    out.populated.insert("speaker");
  } else {
    out.diagnostics.emplace_back("speaker", "unknown speaker label '" + label(*speaker_raw) + "'");
  }

  if (!intent_raw) {
    out.diagnostics.emplace_back("intent", "missing section");
  } else if (auto i = intent_from_string(label(*intent_raw))) {
    p.intent = *i;
    out.populated.insert("intent");
  } else {
    out.diagnostics.emplace_back("intent", "unknown intent label '" + label(*intent_raw) + "'");
  }

  if (!action_raw) {
    out.diagnostics.emplace_back("action", "missing section");
  } else if (auto a = action_type_from_string(label(*action_raw))) {
    ActionAnnotation ann;
    ann.action_type = *a;
    if (!saw_slots) out.diagnostics.emplace_back("action.slots", "missing section");
    for (const auto& sl : slot_lines) {
      if (is_empty_value(sl)) continue;
      auto kv = split_item(sl);
      if (!kv || kv->first.empty()) {
        out.diagnostics.emplace_back("action.slots", "unreadable slot line '" + sl + "'");
        continue;
      }
      std::string value = strip_quotes(kv->second);
      if (is_empty_value(value)) continue;
      std::string name = lower(kv->first);
      std::replace(name.begin(), name.end(), ' ', '_');
      ann.slots.emplace(name, value);
    }
    p.action = std::move(ann);
    out.populated.insert("action");
  } else {
    out.diagnostics.emplace_back("action", "unknown action type '" + label(*action_raw) + "'");
  }

  if (!saw_entities) {
    out.diagnostics.emplace_back("entities", "missing section");
  } else {
    for (const auto& el : entity_lines) {
      if (is_empty_value(el)) continue;
      auto kv = split_item(el);
      auto type = kv ? entity_type_from_string(strip_quotes(kv->first)) : std::nullopt;
      if (!type || *type == EntityType::Outside) {
        out.diagnostics.emplace_back("entities.item", "unreadable entity line '" + el + "'");
        continue;
      }
      std::string text = strip_quotes(kv->second);
      if (is_empty_value(text)) continue;
      p.entities.push_back(EntitySpan{*type, text});
    }
    out.populated.insert("entities");
  }
  return out;
}

std::string render_model_output(const Prediction& p) {
  std::ostringstream out;
  if (p.speaker) out << "SPEAKER: " << to_string(*p.speaker) << '\n';
  if (p.intent) out << "INTENT: " << to_string(*p.intent) << '\n';
  if (p.action) {
    out << "ACTION: " << to_string(p.action->action_type) << '\n';
    if (p.action->slots.empty()) {
      out << "SLOTS: none\n";
    } else {
      out << "SLOTS:\n";
      for (const auto& [k, v] : p.action->slots) out << "- " << k << ": " << v << '\n';
    }
  }
  if (p.entities.empty()) {
    out << "ENTITIES: none\n";
  } else {
    out << "ENTITIES:\n";
    for (const auto& e : p.entities) out << "- " << to_string(e.entity_type) << ": " << e.text << '\n';
  }
  return out.str();
}

const std::string& canonical_prompt_template() {
  static const std::string kTemplate =
      R"(You are analysing one air traffic control radio transmission from ground operations.
Prompt version: atc-prompt-v1

Label the transmission using only these closed sets:
- SPEAKER: PILOT or CONTROLLER
- INTENT: GREET, INFORM, INSTRUCTION or READBACK
- ACTION: HOLD, TAXI, GIVE_WAY, CONTACT, PUSHBACK, INFORM, GREET, STANDBY or UNKNOWN
- SLOTS (critical slots of the action): callsign, taxiway, boundary, qualifier, runway,
  vehicle, frequency, controller, gate
- ENTITIES: CALLSIGN, TAXIWAY, RUNWAY, CONDITION, VEHICLE, QUALIFIER, GATE, REPORT,
  FREQUENCY, CONTROLLER, GREET

Write numbers as digits ("singapore 321", "121.85"), taxiways and gates as letters and
digits ("a b", "e1", "b5"), runways as digits plus l/c/r ("02l") and hold-short points as
spoken ("runway 02l" or "e1").

Answer with exactly this template and nothing else:
SPEAKER: <label>
INTENT: <label>
ACTION: <label>
SLOTS:
- <slot name>: <value>
ENTITIES:
- <ENTITY TYPE>: <text>

Transmission: "{{transcript}}"
)";
  return kTemplate;
}

std::string render_prompt(const std::string& prompt_template, const std::string& transcript) {
  static const std::string kMarker = "{{transcript}}";
  std::string out = prompt_template;
  auto pos = out.find(kMarker);
  if (pos == std::string::npos) return out + "\n" + transcript;
  out.replace(pos, kMarker.size(), transcript);
  return out;
}

}  // namespace atceval
