#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace atceval {

// Error hierarchy. The CLI maps each kind to a distinct exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Speaker { Pilot, Controller };

enum class Intent { Greet, Inform, Instruction, Readback };

enum class ActionType {
  Hold,
  Taxi,
  GiveWay,
  Contact,
  Pushback,
  Inform,
  Greet,
  Standby,
  Unknown,
};

enum class RiskLevel { High, Medium, Low };

enum class EntityType {
  Callsign,
  Taxiway,
  Runway,
  Condition,
  Vehicle,
  Qualifier,
  Gate,
  Report,
  Frequency,
  Controller,
  Greet,
  Outside,
};

inline constexpr std::array<Speaker, 2> kAllSpeakers = {Speaker::Pilot, Speaker::Controller};

inline constexpr std::array<Intent, 4> kAllIntents = {Intent::Greet, Intent::Inform,
                                                      Intent::Instruction, Intent::Readback};

inline constexpr std::array<ActionType, 9> kAllActionTypes = {
    ActionType::Hold,    ActionType::Taxi,   ActionType::GiveWay,
    ActionType::Contact, ActionType::Pushback, ActionType::Inform,
    ActionType::Greet,   ActionType::Standby, ActionType::Unknown};

inline constexpr std::array<RiskLevel, 3> kAllRiskLevels = {RiskLevel::High, RiskLevel::Medium,
                                                            RiskLevel::Low};

inline constexpr std::array<EntityType, 12> kAllEntityTypes = {
    EntityType::Callsign,  EntityType::Taxiway,   EntityType::Runway, EntityType::Condition,
    EntityType::Vehicle,   EntityType::Qualifier, EntityType::Gate,   EntityType::Report,
    EntityType::Frequency, EntityType::Controller, EntityType::Greet, EntityType::Outside};

// Canonical upper-case labels ("PILOT", "GIVE_WAY", ...).
std::string_view to_string(Speaker v);
std::string_view to_string(Intent v);
std::string_view to_string(ActionType v);
std::string_view to_string(RiskLevel v);
std::string_view to_string(EntityType v);

// Case-insensitive label lookup; std::nullopt for anything outside the closed set.
std::optional<Speaker> speaker_from_string(std::string_view s);
std::optional<Intent> intent_from_string(std::string_view s);
std::optional<ActionType> action_type_from_string(std::string_view s);
std::optional<RiskLevel> risk_level_from_string(std::string_view s);
std::optional<EntityType> entity_type_from_string(std::string_view s);

// rho: HIGH 1.0, MEDIUM 0.6, LOW 0.2.
double risk_coefficient(RiskLevel level) noexcept;

struct EntitySpan {
  EntityType entity_type = EntityType::Callsign;
  std::string text;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

// Throws ValidationError when the span violates its invariants.
EntitySpan make_entity_span(EntityType type, std::string text);

struct ActionAnnotation {
  ActionType action_type = ActionType::Unknown;
  std::map<std::string, std::string> slots;

  friend bool operator==(const ActionAnnotation&, const ActionAnnotation&) = default;
};

struct Utterance {
  std::string id;
  std::string transcript;
  Speaker speaker = Speaker::Pilot;
  Intent intent = Intent::Inform;
  ActionAnnotation action;
  std::vector<EntitySpan> entities;
  RiskLevel risk_level = RiskLevel::Low;

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct Prediction {
  std::string utterance_id;
  std::optional<Speaker> speaker;
  std::optional<Intent> intent;
  std::optional<ActionAnnotation> action;
  std::vector<EntitySpan> entities;
  std::optional<double> latency_seconds;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct ActionSchemaEntry {
  RiskLevel risk = RiskLevel::Low;
  std::vector<std::string> critical_slots;

  friend bool operator==(const ActionSchemaEntry&, const ActionSchemaEntry&) = default;
};

struct WeightConfig {
  std::map<EntityType, double> entity_weights;
  std::map<ActionType, ActionSchemaEntry> action_schema;
  std::map<std::pair<ActionType, std::string>, EntityType> slot_entity_map;
  double overlap_threshold = 0.9;
  // Score sums range over the critical slots annotated in ground truth. When
  // false, every slot of S(a) enters the denominator, annotated or not.
  bool restrict_to_annotated_slots = true;
  // A macro class with no ground truth and no predictions contributes F1 = 0.
  // When false such classes are dropped from the average.
  bool absent_class_scores_zero = true;

  // Risk level of an action type. Throws ConfigError if the action has no entry.
  RiskLevel risk_of(ActionType a) const;
  const std::vector<std::string>& critical_slots(ActionType a) const;
  bool is_critical(ActionType a, const std::string& slot) const;
  double entity_weight(EntityType e) const;
  // w_{a,s}: the weight of the entity type the slot maps to.
  double slot_weight(ActionType a, const std::string& slot) const;

  friend bool operator==(const WeightConfig&, const WeightConfig&) = default;
};

WeightConfig default_weight_config();

// Empty iff every WeightConfig invariant holds. Each entry names the offending key.
std::vector<std::string> validate_config(const WeightConfig& cfg);

// Throws ValidationError if the utterance's stored risk level disagrees with the schema.
void check_risk_level(const Utterance& u, const WeightConfig& cfg);

// JSON (de)serialization. from_json variants throw ValidationError on malformed input.
nlohmann::json to_json(const EntitySpan& e);
nlohmann::json to_json(const ActionAnnotation& a);
nlohmann::json to_json(const Utterance& u);
nlohmann::json to_json(const Prediction& p);
nlohmann::json to_json(const WeightConfig& cfg);

EntitySpan entity_span_from_json(const nlohmann::json& j);
ActionAnnotation action_from_json(const nlohmann::json& j);
Utterance utterance_from_json(const nlohmann::json& j);
Prediction prediction_from_json(const nlohmann::json& j);
// Missing keys fall back to the built-in defaults; throws ConfigError on bad values.
WeightConfig weight_config_from_json(const nlohmann::json& j);

WeightConfig load_weight_config(const std::string& path);

// Hex SHA-256 of the canonical serialization; embedded in reports.
std::string config_hash(const WeightConfig& cfg);
std::string sha256_hex(std::string_view bytes);

}  // namespace atceval
