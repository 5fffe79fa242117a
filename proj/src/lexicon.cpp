#include "atceval/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <set>

namespace atceval {

namespace {

PhraseLexicon build_default() {
  PhraseLexicon lex;
  lex.callsign_airline_map = {
      {"singapore", "SIA"}, {"scoot", "TGW"},     {"qantas", "QFA"},   {"emirates", "UAE"},
      {"cathay", "CPA"},    {"speedbird", "BAW"}, {"jetstar", "JSA"},  {"garuda", "GIA"},
      {"lufthansa", "DLH"}, {"airasia", "AXM"},   {"thai", "THA"},     {"malaysian", "MAS"},
  };
  const char* letters[] = {"alpha",  "bravo",   "charlie", "delta", "echo",   "foxtrot", "golf",
                           "hotel",  "india",   "juliet",  "kilo",  "lima",   "mike",    "november",
                           "oscar",  "papa",    "quebec",  "romeo", "sierra", "tango",   "uniform",
                           "victor", "whiskey", "xray",    "yankee", "zulu"};
  for (int i = 0; i < 26; ++i) lex.phonetic_alphabet[letters[i]] = static_cast<char>('a' + i);
  lex.phonetic_alphabet["alfa"] = 'a';
  lex.phonetic_alphabet["juliett"] = 'j';
  const char* digits[] = {"zero", "one", "two",   "three", "four",
                          "five", "six", "seven", "eight", "nine"};
  for (int i = 0; i < 10; ++i) lex.number_words[digits[i]] = static_cast<char>('0' + i);
  lex.number_words["niner"] = '9';

  lex.action_trigger_patterns = {
      {ActionType::GiveWay, {"give way"}},
      {ActionType::Pushback, {"push back", "pushback"}},
      {ActionType::Taxi, {"taxi", "continue via"}},
      {ActionType::Hold, {"hold short", "holding short", "hold position"}},
      {ActionType::Contact, {"contact", "decimal"}},
      {ActionType::Standby, {"standby", "stand by"}},
      {ActionType::Greet, {"good morning", "good afternoon", "good evening", "good day", "hello"}},
      {ActionType::Inform,
       {"fully ready", "ready", "request start up", "on stand", "expect delay",
        "expect startup shortly"}},
  };
  lex.action_priority = {ActionType::GiveWay, ActionType::Pushback, ActionType::Taxi,
                         ActionType::Hold,    ActionType::Contact,  ActionType::Standby,
                         ActionType::Greet,   ActionType::Inform};
  lex.controller_names = {"ground", "tower", "apron", "delivery", "departure"};
  lex.greetings = {"good morning", "good afternoon", "good evening", "good day", "hello"};
  lex.reports = {"fully ready", "ready", "request start up", "on stand", "expect delay",
                 "expect startup shortly"};
  lex.qualifiers = {"expedite",    "straight ahead", "first left", "first right",
                    "second left", "second right",   "face north", "face south",
                    "face east",   "face west"};
  lex.vehicles = {"tug",         "follow me car", "fuel truck", "fire truck",
                  "bus",         "tow tractor",   "catering truck"};
  lex.decimal_markers = {"decimal", "point"};
  lex.runway_suffixes = {{"left", 'l'}, {"center", 'c'}, {"centre", 'c'}, {"right", 'r'}};
  return lex;
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::map<std::string, char> read_char_map(const nlohmann::json& j) {
  std::map<std::string, char> out;
  for (const auto& [k, v] : j.items()) {
    auto s = v.get<std::string>();
    if (s.size() != 1) throw ConfigError("lexicon entry '" + k + "' must map to one character");
    out[k] = s[0];
  }
  return out;
}

}  // namespace

const PhraseLexicon& default_lexicon() {
  static const PhraseLexicon lex = build_default();
  return lex;
}

std::vector<std::string> validate_lexicon(const PhraseLexicon& lex) {
  std::vector<std::string> problems;
  std::set<char> letters;
  for (const auto& [word, c] : lex.phonetic_alphabet) letters.insert(c);
  for (char c = 'a'; c <= 'z'; ++c) {
    if (!letters.contains(c)) problems.push_back(std::string("phonetic_alphabet: no word for '") + c + "'");
  }
  std::set<char> digits;
  for (const auto& [word, d] : lex.number_words) digits.insert(d);
  for (char d = '0'; d <= '9'; ++d) {
    if (!digits.contains(d)) problems.push_back(std::string("number_words: no word for '") + d + "'");
  }
  if (!lex.number_words.contains("niner")) problems.push_back("number_words: missing 'niner'");
  return problems;
}

nlohmann::json to_json(const PhraseLexicon& lex) {
  nlohmann::json j;
  j["callsign_airline_map"] = lex.callsign_airline_map;
  auto char_map = [](const std::map<std::string, char>& m) {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& [k, v] : m) o[k] = std::string(1, v);
    return o;
  };
  j["phonetic_alphabet"] = char_map(lex.phonetic_alphabet);
  j["number_words"] = char_map(lex.number_words);
  j["runway_suffixes"] = char_map(lex.runway_suffixes);
  nlohmann::json triggers = nlohmann::json::object();
  for (const auto& [a, phrases] : lex.action_trigger_patterns) {
    triggers[std::string(to_string(a))] = phrases;
  }
  j["action_trigger_patterns"] = triggers;
  nlohmann::json priority = nlohmann::json::array();
  for (ActionType a : lex.action_priority) priority.push_back(to_string(a));
  j["action_priority"] = priority;
  j["controller_names"] = lex.controller_names;
  j["greetings"] = lex.greetings;
  j["reports"] = lex.reports;
  j["qualifiers"] = lex.qualifiers;
  j["vehicles"] = lex.vehicles;
  j["decimal_markers"] = lex.decimal_markers;
  return j;
}

PhraseLexicon lexicon_from_json(const nlohmann::json& j) {
  PhraseLexicon lex = default_lexicon();
  try {
    read_if(j, "callsign_airline_map", lex.callsign_airline_map);
    if (j.contains("phonetic_alphabet")) lex.phonetic_alphabet = read_char_map(j["phonetic_alphabet"]);
    if (j.contains("number_words")) lex.number_words = read_char_map(j["number_words"]);
    if (j.contains("runway_suffixes")) lex.runway_suffixes = read_char_map(j["runway_suffixes"]);
    if (j.contains("action_trigger_patterns")) {
      lex.action_trigger_patterns.clear();
      for (const auto& [k, v] : j["action_trigger_patterns"].items()) {
        auto a = action_type_from_string(k);
        if (!a) throw ConfigError("unknown action type '" + k + "' in lexicon");
        lex.action_trigger_patterns[*a] = v.get<std::vector<std::string>>();
      }
    }
    if (j.contains("action_priority")) {
      lex.action_priority.clear();
      for (const auto& v : j["action_priority"]) {
        auto a = action_type_from_string(v.get<std::string>());
        if (!a) throw ConfigError("unknown action type in lexicon priority");
        lex.action_priority.push_back(*a);
      }
    }
    read_if(j, "controller_names", lex.controller_names);
    read_if(j, "greetings", lex.greetings);
    read_if(j, "reports", lex.reports);
    read_if(j, "qualifiers", lex.qualifiers);
    read_if(j, "vehicles", lex.vehicles);
    read_if(j, "decimal_markers", lex.decimal_markers);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed lexicon: ") + e.what());
  }
  return lex;
}

PhraseLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("lexicon file '" + path + "' is not valid JSON: " + e.what());
  }
  PhraseLexicon lex = lexicon_from_json(j);
  auto problems = validate_lexicon(lex);
  if (!problems.empty()) throw ConfigError("lexicon file '" + path + "': " + problems.front());
  return lex;
}

std::string spoken_digit(char d) {
  static const char* words[] = {"zero", "one", "two",   "three", "four",
                                "five", "six", "seven", "eight", "niner"};
  if (d < '0' || d > '9') throw std::invalid_argument(std::string("not a digit: ") + d);
  return words[d - '0'];
}

std::string spoken_digits(std::string_view digits) {
  std::string out;
  for (char d : digits) {
    if (!out.empty()) out += ' ';
    out += spoken_digit(d);
  }
  return out;
}

std::string spoken_letter(char letter) {
  static const char* words[] = {"alpha",  "bravo",   "charlie", "delta",  "echo",   "foxtrot",
                                "golf",   "hotel",   "india",   "juliet", "kilo",   "lima",
                                "mike",   "november", "oscar",  "papa",   "quebec", "romeo",
                                "sierra", "tango",   "uniform", "victor", "whiskey", "xray",
                                "yankee", "zulu"};
  char c = static_cast<char>(std::tolower(static_cast<unsigned char>(letter)));
  if (c < 'a' || c > 'z') throw std::invalid_argument(std::string("not a letter: ") + letter);
  return words[c - 'a'];
}

std::string spoken_runway(std::string_view designator) {
  std::string out;
  for (char c : designator) {
    if (!out.empty()) out += ' ';
    switch (c) {
      case 'l': out += "left"; break;
      case 'c': out += "center"; break;
      case 'r': out += "right"; break;
      default: out += spoken_digit(c);
    }
  }
  return out;
}

std::string spoken_designator(std::string_view designator) {
  std::string out;
  for (char c : designator) {
    if (!out.empty()) out += ' ';
    out += std::isdigit(static_cast<unsigned char>(c)) ? spoken_digit(c) : spoken_letter(c);
  }
  return out;
}

std::string spoken_frequency(std::string_view frequency) {
  std::string out;
  for (char c : frequency) {
    if (!out.empty()) out += ' ';
    out += c == '.' ? std::string("decimal") : spoken_digit(c);
  }
  return out;
}

}  // namespace atceval
