#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "atceval/schema.hpp"

namespace atceval {

// Word lists for ground-movement phraseology. Shared by the synthetic corpus
// generator and the baseline parser so both sides render values the same way.
struct PhraseLexicon {
  std::map<std::string, std::string> callsign_airline_map;  // spoken name -> ICAO prefix
  std::map<std::string, char> phonetic_alphabet;            // "alpha" -> 'a'
  std::map<std::string, char> number_words;                 // "niner" -> '9'
  // Trigger phrases per action; tried in `action_priority` order.
  std::map<ActionType, std::vector<std::string>> action_trigger_patterns;
  std::vector<ActionType> action_priority;
  std::vector<std::string> controller_names;
  std::vector<std::string> greetings;
  std::vector<std::string> reports;
  std::vector<std::string> qualifiers;
  std::vector<std::string> vehicles;
  std::vector<std::string> decimal_markers;  // "decimal", "point"
  std::map<std::string, char> runway_suffixes;  // "left" -> 'l'
};

const PhraseLexicon& default_lexicon();

// Invariant check: 26 phonetic letters, digits 0-9 plus "niner".
std::vector<std::string> validate_lexicon(const PhraseLexicon& lex);

nlohmann::json to_json(const PhraseLexicon& lex);
// Keys missing from `j` keep their default values. Throws ConfigError.
PhraseLexicon lexicon_from_json(const nlohmann::json& j);
PhraseLexicon load_lexicon(const std::string& path);

// Spoken renderings. Digits use "niner" for 9.
std::string spoken_digit(char d);
std::string spoken_digits(std::string_view digits);  // "321" -> "three two one"
std::string spoken_letter(char letter);              // 'b' -> "bravo"

// "02l" -> "zero two left"
std::string spoken_runway(std::string_view designator);
// "e1" -> "echo one", "b12" -> "bravo one two"
std::string spoken_designator(std::string_view designator);
// "121.85" -> "one two one decimal eight five"
std::string spoken_frequency(std::string_view frequency);

}  // namespace atceval
