#include "atceval/schema.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace atceval {

namespace {

using nlohmann::json;

template <typename E, std::size_t N>
std::optional<E> lookup_label(std::string_view s, const std::array<E, N>& all) {
  std::string upper;
  upper.reserve(s.size());
  for (char c : s) {
    if (c == ' ' || c == '-') c = '_';
    upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  for (E v : all) {
    if (to_string(v) == upper) return v;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
E require_label(const json& j, const char* field, const std::array<E, N>& all) {
  if (!j.is_string()) {
    throw ValidationError(std::string("field '") + field + "' must be a string label");
  }
  auto v = lookup_label(j.get<std::string>(), all);
  if (!v) {
    throw ValidationError(std::string("field '") + field + "' has unknown label '" +
                          j.get<std::string>() + "'");
  }
  return *v;
}

const json& require_key(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::string require_string(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

bool present(const json& j, const char* key) { return j.contains(key) && !j.at(key).is_null(); }

std::vector<EntitySpan> entities_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("field 'entities' must be an array");
  std::vector<EntitySpan> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(entity_span_from_json(e));
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(Speaker v) {
  switch (v) {
    case Speaker::Pilot: return "PILOT";
    case Speaker::Controller: return "CONTROLLER";
  }
  return "?";
}

std::string_view to_string(Intent v) {
  switch (v) {
    case Intent::Greet: return "GREET";
    case Intent::Inform: return "INFORM";
    case Intent::Instruction: return "INSTRUCTION";
    case Intent::Readback: return "READBACK";
  }
  return "?";
}

std::string_view to_string(ActionType v) {
  switch (v) {
    case ActionType::Hold: return "HOLD";
    case ActionType::Taxi: return "TAXI";
    case ActionType::GiveWay: return "GIVE_WAY";
    case ActionType::Contact: return "CONTACT";
    case ActionType::Pushback: return "PUSHBACK";
    case ActionType::Inform: return "INFORM";
    case ActionType::Greet: return "GREET";
    case ActionType::Standby: return "STANDBY";
    case ActionType::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::string_view to_string(RiskLevel v) {
  switch (v) {
    case RiskLevel::High: return "HIGH";
    case RiskLevel::Medium: return "MEDIUM";
    case RiskLevel::Low: return "LOW";
  }
  return "?";
}

std::string_view to_string(EntityType v) {
  switch (v) {
    case EntityType::Callsign: return "CALLSIGN";
    case EntityType::Taxiway: return "TAXIWAY";
    case EntityType::Runway: return "RUNWAY";
    case EntityType::Condition: return "CONDITION";
    case EntityType::Vehicle: return "VEHICLE";
    case EntityType::Qualifier: return "QUALIFIER";
    case EntityType::Gate: return "GATE";
    case EntityType::Report: return "REPORT";
    case EntityType::Frequency: return "FREQUENCY";
    case EntityType::Controller: return "CONTROLLER";
    case EntityType::Greet: return "GREET";
    case EntityType::Outside: return "OUTSIDE";
  }
  return "?";
}

std::optional<Speaker> speaker_from_string(std::string_view s) {
  return lookup_label(s, kAllSpeakers);
}
std::optional<Intent> intent_from_string(std::string_view s) {
  return lookup_label(s, kAllIntents);
}
std::optional<ActionType> action_type_from_string(std::string_view s) {
  return lookup_label(s, kAllActionTypes);
}
std::optional<RiskLevel> risk_level_from_string(std::string_view s) {
  return lookup_label(s, kAllRiskLevels);
}
std::optional<EntityType> entity_type_from_string(std::string_view s) {
  return lookup_label(s, kAllEntityTypes);
}

double risk_coefficient(RiskLevel level) noexcept {
  switch (level) {
    case RiskLevel::High: return 1.0;
    case RiskLevel::Medium: return 0.6;
    case RiskLevel::Low: return 0.2;
  }
  return 1.0;
}

EntitySpan make_entity_span(EntityType type, std::string text) {
  if (type == EntityType::Outside) {
    throw ValidationError("entity span may not have type OUTSIDE");
  }
  if (trim(text).empty()) {
    throw ValidationError("entity span of type " + std::string(to_string(type)) +
                          " has empty text");
  }
  return EntitySpan{type, std::move(text)};
}

RiskLevel WeightConfig::risk_of(ActionType a) const {
  auto it = action_schema.find(a);
  if (it == action_schema.end()) {
    throw ConfigError("action type " + std::string(to_string(a)) + " has no schema entry");
  }
  return it->second.risk;
}

const std::vector<std::string>& WeightConfig::critical_slots(ActionType a) const {
  auto it = action_schema.find(a);
  if (it == action_schema.end()) {
    throw ConfigError("action type " + std::string(to_string(a)) + " has no schema entry");
  }
  return it->second.critical_slots;
}

bool WeightConfig::is_critical(ActionType a, const std::string& slot) const {
  auto it = action_schema.find(a);
  if (it == action_schema.end()) return false;
  const auto& slots = it->second.critical_slots;
  return std::find(slots.begin(), slots.end(), slot) != slots.end();
}

double WeightConfig::entity_weight(EntityType e) const {
  auto it = entity_weights.find(e);
  return it == entity_weights.end() ? 0.0 : it->second;
}

double WeightConfig::slot_weight(ActionType a, const std::string& slot) const {
  auto it = slot_entity_map.find({a, slot});
  if (it == slot_entity_map.end()) {
    throw ConfigError("slot '" + slot + "' of " + std::string(to_string(a)) +
                      " maps to no entity type");
  }
  return entity_weight(it->second);
}

WeightConfig default_weight_config() {
  WeightConfig cfg;
  cfg.entity_weights = {
      {EntityType::Callsign, 1.00},  {EntityType::Taxiway, 0.90},
      {EntityType::Runway, 0.95},    {EntityType::Condition, 0.95},
      {EntityType::Vehicle, 0.65},   {EntityType::Qualifier, 0.50},
      {EntityType::Gate, 0.40},      {EntityType::Report, 0.40},
      {EntityType::Frequency, 0.30}, {EntityType::Controller, 0.25},
      {EntityType::Greet, 0.05},     {EntityType::Outside, 0.00},
  };
  cfg.action_schema = {
      {ActionType::Hold, {RiskLevel::High, {"callsign", "boundary"}}},
      {ActionType::Taxi,
       {RiskLevel::High, {"callsign", "taxiway", "boundary", "qualifier", "runway"}}},
      {ActionType::GiveWay, {RiskLevel::High, {"callsign", "vehicle"}}},
      {ActionType::Contact, {RiskLevel::Medium, {"callsign", "frequency", "controller"}}},
      {ActionType::Pushback, {RiskLevel::Medium, {"callsign", "gate", "qualifier"}}},
      {ActionType::Inform, {RiskLevel::Low, {"callsign", "controller"}}},
      {ActionType::Greet, {RiskLevel::Low, {"callsign", "controller"}}},
      {ActionType::Standby, {RiskLevel::Low, {"callsign"}}},
      {ActionType::Unknown, {RiskLevel::Low, {"callsign"}}},
  };
  const std::map<std::string, EntityType> by_name = {
      {"callsign", EntityType::Callsign},   {"taxiway", EntityType::Taxiway},
      {"runway", EntityType::Runway},       {"boundary", EntityType::Condition},
      {"vehicle", EntityType::Vehicle},     {"qualifier", EntityType::Qualifier},
      {"gate", EntityType::Gate},           {"frequency", EntityType::Frequency},
      {"controller", EntityType::Controller},
  };
  for (const auto& [action, entry] : cfg.action_schema) {
    for (const auto& slot : entry.critical_slots) {
      cfg.slot_entity_map[{action, slot}] = by_name.at(slot);
    }
  }
  cfg.overlap_threshold = 0.9;
  return cfg;
}

std::vector<std::string> validate_config(const WeightConfig& cfg) {
  std::vector<std::string> violations;
  for (EntityType e : kAllEntityTypes) {
    auto it = cfg.entity_weights.find(e);
    if (it == cfg.entity_weights.end()) {
      violations.push_back("entity_weights." + std::string(to_string(e)) + ": missing");
      continue;
    }
    double w = it->second;
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
      std::ostringstream msg;
      msg << "entity_weights." << to_string(e) << ": weight " << w << " outside [0,1]";
      violations.push_back(msg.str());
    } else if (e == EntityType::Outside && w != 0.0) {
      violations.push_back("entity_weights.OUTSIDE: must be 0.0");
    }
  }
  for (ActionType a : kAllActionTypes) {
    auto it = cfg.action_schema.find(a);
    if (it == cfg.action_schema.end()) {
      violations.push_back("action_schema." + std::string(to_string(a)) + ": missing");
      continue;
    }
    for (const auto& slot : it->second.critical_slots) {
      auto key = std::string("slot_entities.") + std::string(to_string(a)) + "." + slot;
      auto m = cfg.slot_entity_map.find({a, slot});
      if (m == cfg.slot_entity_map.end()) {
        violations.push_back(key + ": critical slot maps to no entity type");
      } else if (m->second == EntityType::Outside) {
        violations.push_back(key + ": critical slot may not map to OUTSIDE");
      }
    }
  }
  if (!(cfg.overlap_threshold > 0.0 && cfg.overlap_threshold <= 1.0)) {
    std::ostringstream msg;
    msg << "overlap_threshold: " << cfg.overlap_threshold << " outside (0,1]";
    violations.push_back(msg.str());
  }
  return violations;
}

void check_risk_level(const Utterance& u, const WeightConfig& cfg) {
  RiskLevel expected = cfg.risk_of(u.action.action_type);
  if (u.risk_level != expected) {
    throw ValidationError("utterance '" + u.id + "': risk_level " +
                          std::string(to_string(u.risk_level)) + " contradicts schema level " +
                          std::string(to_string(expected)) + " for action " +
                          std::string(to_string(u.action.action_type)));
  }
}

json to_json(const EntitySpan& e) {
  return json{{"type", to_string(e.entity_type)}, {"text", e.text}};
}

json to_json(const ActionAnnotation& a) {
  json slots = json::object();
  for (const auto& [k, v] : a.slots) slots[k] = v;
  return json{{"type", to_string(a.action_type)}, {"slots", slots}};
}

json to_json(const Utterance& u) {
  json ents = json::array();
  for (const auto& e : u.entities) ents.push_back(to_json(e));
  return json{{"id", u.id},
              {"transcript", u.transcript},
              {"speaker", to_string(u.speaker)},
              {"intent", to_string(u.intent)},
              {"action", to_json(u.action)},
              {"entities", ents},
              {"risk_level", to_string(u.risk_level)}};
}

json to_json(const Prediction& p) {
  json j = json{{"utterance_id", p.utterance_id}};
  if (p.speaker) j["speaker"] = to_string(*p.speaker);
  if (p.intent) j["intent"] = to_string(*p.intent);
  if (p.action) j["action"] = to_json(*p.action);
  json ents = json::array();
  for (const auto& e : p.entities) ents.push_back(to_json(e));
  j["entities"] = ents;
  if (p.latency_seconds) j["latency_seconds"] = *p.latency_seconds;
  return j;
}

json to_json(const WeightConfig& cfg) {
  json weights = json::object();
  for (const auto& [e, w] : cfg.entity_weights) weights[std::string(to_string(e))] = w;
  json schema = json::object();
  for (const auto& [a, entry] : cfg.action_schema) {
    schema[std::string(to_string(a))] =
        json{{"risk", to_string(entry.risk)}, {"critical_slots", entry.critical_slots}};
  }
  json slot_entities = json::object();
  for (const auto& [key, e] : cfg.slot_entity_map) {
    slot_entities[std::string(to_string(key.first))][key.second] = to_string(e);
  }
  return json{{"entity_weights", weights},
              {"action_schema", schema},
              {"slot_entities", slot_entities},
              {"overlap_threshold", cfg.overlap_threshold},
              {"restrict_to_annotated_slots", cfg.restrict_to_annotated_slots},
              {"absent_class_scores_zero", cfg.absent_class_scores_zero}};
}

EntitySpan entity_span_from_json(const json& j) {
  auto type = require_label(require_key(j, "type"), "type", kAllEntityTypes);
  return make_entity_span(type, require_string(j, "text"));
}

ActionAnnotation action_from_json(const json& j) {
  ActionAnnotation a;
  a.action_type = require_label(require_key(j, "type"), "action.type", kAllActionTypes);
  if (present(j, "slots")) {
    const json& slots = j.at("slots");
    if (!slots.is_object()) throw ValidationError("field 'action.slots' must be an object");
    for (const auto& [k, v] : slots.items()) {
      if (!v.is_string()) {
        throw ValidationError("slot '" + k + "' must have a string value");
      }
      a.slots[k] = v.get<std::string>();
    }
  }
  return a;
}

Utterance utterance_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("utterance record must be an object");
  Utterance u;
  u.id = require_string(j, "id");
  if (u.id.empty()) throw ValidationError("field 'id' is empty");
  u.transcript = require_string(j, "transcript");
  u.speaker = require_label(require_key(j, "speaker"), "speaker", kAllSpeakers);
  u.intent = require_label(require_key(j, "intent"), "intent", kAllIntents);
  u.action = action_from_json(require_key(j, "action"));
  u.entities = present(j, "entities") ? entities_from_json(j.at("entities"))
                                      : std::vector<EntitySpan>{};
  u.risk_level = require_label(require_key(j, "risk_level"), "risk_level", kAllRiskLevels);
  return u;
}

Prediction prediction_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("prediction record must be an object");
  Prediction p;
  p.utterance_id = require_string(j, "utterance_id");
  if (present(j, "speaker")) p.speaker = require_label(j.at("speaker"), "speaker", kAllSpeakers);
  if (present(j, "intent")) p.intent = require_label(j.at("intent"), "intent", kAllIntents);
  if (present(j, "action")) p.action = action_from_json(j.at("action"));
  if (present(j, "entities")) p.entities = entities_from_json(j.at("entities"));
  if (present(j, "latency_seconds")) {
    const json& l = j.at("latency_seconds");
    if (!l.is_number()) throw ValidationError("field 'latency_seconds' must be a number");
    double v = l.get<double>();
    if (!(v >= 0.0)) throw ValidationError("field 'latency_seconds' must be non-negative");
    p.latency_seconds = v;
  }
  return p;
}

WeightConfig weight_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("weight config must be an object");
  WeightConfig cfg = default_weight_config();
  auto entity_label = [](const std::string& s) {
    auto e = entity_type_from_string(s);
    if (!e) throw ConfigError("unknown entity type '" + s + "'");
    return *e;
  };
  auto action_label = [](const std::string& s) {
    auto a = action_type_from_string(s);
    if (!a) throw ConfigError("unknown action type '" + s + "'");
    return *a;
  };
  try {
    if (j.contains("entity_weights")) {
      for (const auto& [k, v] : j.at("entity_weights").items()) {
        if (!v.is_number()) throw ConfigError("entity_weights." + k + " must be a number");
        cfg.entity_weights[entity_label(k)] = v.get<double>();
      }
    }
    if (j.contains("action_schema")) {
      for (const auto& [k, v] : j.at("action_schema").items()) {
        ActionType a = action_label(k);
        ActionSchemaEntry entry;
        auto risk = risk_level_from_string(v.at("risk").get<std::string>());
        if (!risk) throw ConfigError("action_schema." + k + ".risk is not HIGH/MEDIUM/LOW");
        entry.risk = *risk;
        entry.critical_slots = v.at("critical_slots").get<std::vector<std::string>>();
        cfg.action_schema[a] = std::move(entry);
      }
    }
    if (j.contains("slot_entities")) {
      for (const auto& [k, slots] : j.at("slot_entities").items()) {
        ActionType a = action_label(k);
        for (const auto& [slot, e] : slots.items()) {
          cfg.slot_entity_map[{a, slot}] = entity_label(e.get<std::string>());
        }
      }
    }
    if (j.contains("overlap_threshold")) {
      cfg.overlap_threshold = j.at("overlap_threshold").get<double>();
    }
    if (j.contains("restrict_to_annotated_slots")) {
      cfg.restrict_to_annotated_slots = j.at("restrict_to_annotated_slots").get<bool>();
    }
    if (j.contains("absent_class_scores_zero")) {
      cfg.absent_class_scores_zero = j.at("absent_class_scores_zero").get<bool>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed weight config: ") + e.what());
  }
  return cfg;
}

WeightConfig load_weight_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  WeightConfig cfg = weight_config_from_json(j);
  auto violations = validate_config(cfg);
  if (!violations.empty()) {
    std::string msg = "config file '" + path + "' is invalid:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ConfigError(msg);
  }
  return cfg;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string config_hash(const WeightConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

}  // namespace atceval
