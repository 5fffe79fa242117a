#include "atceval/model_runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace atceval {

namespace {

using Clock = std::chrono::steady_clock;

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;  // without trailing slash
};

UrlParts split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("base_url: not an http(s) URL: " + url);
  UrlParts parts{m[1].str(), m[2].matched ? m[2].str() : std::string()};
  while (!parts.path.empty() && parts.path.back() == '/') parts.path.pop_back();
  return parts;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<std::string> message_content(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) return std::nullopt;
  const auto& first = (*choices)[0];
  if (first.contains("message") && first["message"].contains("content") &&
      first["message"]["content"].is_string()) {
    return first["message"]["content"].get<std::string>();
  }
  if (first.contains("text") && first["text"].is_string()) return first["text"].get<std::string>();
  return std::nullopt;
}

class Worker {
 public:
  Worker(const EndpointConfig& ep, const std::string& token)
      : ep_(ep), url_(split_url(ep.base_url)), client_(url_.origin) {
    const auto timeout = std::chrono::duration<double>(ep.request_timeout_seconds);
    const auto secs = static_cast<time_t>(timeout.count());
    const auto usecs = static_cast<time_t>((timeout.count() - static_cast<double>(secs)) * 1e6);
    client_.set_connection_timeout(secs, usecs);
    client_.set_read_timeout(secs, usecs);
    client_.set_write_timeout(secs, usecs);
    client_.set_bearer_token_auth(token);
  }

  ManifestEntry send(const Utterance& u, const std::string& prompt) {
    ManifestEntry entry;
    entry.utterance_id = u.id;
    const nlohmann::json body = {
        {"model", ep_.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", ep_.temperature},
    };
    const std::string payload = body.dump();
    const std::string path = url_.path + "/chat/completions";

    const auto start = Clock::now();
    for (int attempt = 0;; ++attempt) {
      entry.retries = attempt;
      auto res = client_.Post(path, payload, "application/json");
      if (res && res->status >= 200 && res->status < 300) {
        entry.http_status = res->status;
        entry.error.reset();
        if (res->body.empty()) {
          entry.raw_response.clear();
        } else if (auto content = message_content(res->body)) {
          entry.raw_response = *content;
        } else {
          entry.raw_response = res->body;
          entry.error = "response has no message content";
        }
        break;
      }
      if (res) {
        entry.http_status = res->status;
        entry.error = "http status " + std::to_string(res->status);
      } else {
        entry.http_status = 0;
        entry.error = "transport: " + httplib::to_string(res.error());
      }
      if (attempt >= ep_.max_retries) break;
      const double wait = std::min(ep_.backoff_max_seconds,
                                   ep_.backoff_initial_seconds * std::pow(2.0, attempt));
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    entry.latency_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return entry;
  }

 private:
  const EndpointConfig& ep_;
  UrlParts url_;
  httplib::Client client_;
};

}  // namespace

std::vector<std::string> validate_endpoint(const EndpointConfig& ep) {
  std::vector<std::string> problems;
  try {
    split_url(ep.base_url);
  } catch (const ConfigError& e) {
    problems.emplace_back(e.what());
  }
  if (ep.model_name.empty()) problems.emplace_back("model_name: required");
  if (ep.auth_token_env_var.empty()) problems.emplace_back("auth_token_env_var: required");
  if (!(ep.request_timeout_seconds > 0)) problems.emplace_back("request_timeout_seconds: must be > 0");
  if (ep.max_retries < 0 || ep.max_retries > 10) problems.emplace_back("max_retries: must be in [0,10]");
  if (ep.concurrency_limit < 1) problems.emplace_back("concurrency_limit: must be >= 1");
  if (ep.backoff_initial_seconds < 0 || ep.backoff_max_seconds < 0) {
    problems.emplace_back("backoff: must be >= 0");
  }
  return problems;
}

nlohmann::json to_json(const EndpointConfig& ep) {
  return {{"base_url", ep.base_url},
          {"model_name", ep.model_name},
          {"auth_token_env_var", ep.auth_token_env_var},
          {"request_timeout_seconds", ep.request_timeout_seconds},
          {"max_retries", ep.max_retries},
          {"concurrency_limit", ep.concurrency_limit},
          {"temperature", ep.temperature},
          {"backoff_initial_seconds", ep.backoff_initial_seconds},
          {"backoff_max_seconds", ep.backoff_max_seconds}};
}

EndpointConfig endpoint_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("endpoint config must be a JSON object");
  for (const char* forbidden : {"api_key", "token", "auth_token", "authorization"}) {
    if (j.contains(forbidden)) {
      throw ConfigError(std::string("endpoint config must not contain '") + forbidden +
                        "'; name an environment variable in auth_token_env_var");
    }
  }
  EndpointConfig ep;
  try {
    ep.base_url = j.value("base_url", ep.base_url);
    ep.model_name = j.value("model_name", ep.model_name);
    ep.auth_token_env_var = j.value("auth_token_env_var", ep.auth_token_env_var);
    ep.request_timeout_seconds = j.value("request_timeout_seconds", ep.request_timeout_seconds);
    ep.max_retries = j.value("max_retries", ep.max_retries);
    ep.concurrency_limit = j.value("concurrency_limit", ep.concurrency_limit);
    ep.temperature = j.value("temperature", ep.temperature);
    ep.backoff_initial_seconds = j.value("backoff_initial_seconds", ep.backoff_initial_seconds);
    ep.backoff_max_seconds = j.value("backoff_max_seconds", ep.backoff_max_seconds);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("endpoint config: ") + e.what());
  }
  auto problems = validate_endpoint(ep);
  if (!problems.empty()) throw ConfigError("endpoint config: " + problems.front());
  return ep;
}

EndpointConfig load_endpoint_config(const std::string& path) {
  const std::string text = read_file(path);
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("endpoint config '" + path + "' is not valid JSON");
  return endpoint_from_json(j);
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << nlohmann::json{{"format", kManifestFormat},
                        {"version", kFormatVersion},
                        {"model_name", m.model_name},
                        {"corpus_hash", m.corpus_hash},
                        {"prompt_template_hash", m.prompt_template_hash},
                        {"timestamp", m.timestamp}}
             .dump()
      << '\n';
  for (const auto& e : m.entries) {
    nlohmann::json j = {{"utterance_id", e.utterance_id},
                        {"raw_response", e.raw_response},
                        {"latency_seconds", e.latency_seconds},
                        {"retries", e.retries},
                        {"http_status", e.http_status}};
    j["error"] = e.error ? nlohmann::json(*e.error) : nlohmann::json(nullptr);
    out << j.dump() << '\n';
  }
}

RunManifest load_manifest(std::istream& in) {
  RunManifest m;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (j.is_discarded() || !j.is_object()) throw ValidationError(where + "not a JSON object");
    try {
      if (!header) {
        if (j.value("format", "") != kManifestFormat) {
          throw ValidationError(where + "missing run manifest header");
        }
        m.model_name = j.at("model_name").get<std::string>();
        m.corpus_hash = j.at("corpus_hash").get<std::string>();
        m.prompt_template_hash = j.at("prompt_template_hash").get<std::string>();
        m.timestamp = j.value("timestamp", "");
        header = true;
        continue;
      }
      ManifestEntry e;
      e.utterance_id = j.at("utterance_id").get<std::string>();
      e.raw_response = j.at("raw_response").get<std::string>();
      e.latency_seconds = j.at("latency_seconds").get<double>();
      e.retries = j.value("retries", 0);
      e.http_status = j.value("http_status", 0);
      if (j.contains("error") && !j["error"].is_null()) e.error = j["error"].get<std::string>();
      m.entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + e.what());
    }
  }
  if (!header) throw ValidationError("run manifest: missing header");
  return m;
}

RunManifest load_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run manifest '" + path + "'");
  return load_manifest(in);
}

PredictionSet predictions_from_manifest(const RunManifest& m) {
  PredictionSet preds;
  preds.model_name = m.model_name;
  for (const auto& e : m.entries) {
    Prediction p = parse_model_output(e.raw_response, e.utterance_id).prediction;
    p.latency_seconds = e.latency_seconds;
    preds.predictions[e.utterance_id] = std::move(p);
  }
  return preds;
}

double mean_latency(const RunManifest& m) {
  if (m.entries.empty()) throw ValidationError("run manifest has no attempts");
  double sum = 0.0;
  for (const auto& e : m.entries) sum += e.latency_seconds;
  return sum / static_cast<double>(m.entries.size());
}

RunResult run_model(const Corpus& corpus, const EndpointConfig& endpoint,
                    const std::string& prompt_template) {
  auto problems = validate_endpoint(endpoint);
  if (!problems.empty()) throw ConfigError("endpoint config: " + problems.front());
  const char* token = std::getenv(endpoint.auth_token_env_var.c_str());
  if (token == nullptr || *token == '\0') {
    throw ConfigError("credential variable " + endpoint.auth_token_env_var + " is not set");
  }
  const std::string secret(token);

  RunResult result;
  RunManifest& m = result.manifest;
  m.model_name = endpoint.model_name;
  m.corpus_hash = corpus_hash(corpus);
  m.prompt_template_hash = sha256_hex(prompt_template);
  m.timestamp = utc_timestamp();
  m.entries.resize(corpus.utterances.size());

  const std::size_t n = corpus.utterances.size();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(endpoint.concurrency_limit), n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      Worker worker(endpoint, secret);
      for (std::size_t i = next++; i < n; i = next++) {
        const Utterance& u = corpus.utterances[i];
        m.entries[i] = worker.send(u, render_prompt(prompt_template, u.transcript));
      }
    });
  }
  for (auto& t : pool) t.join();

  result.predictions = predictions_from_manifest(m);
  return result;
}

}  // namespace atceval
