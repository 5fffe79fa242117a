#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "atceval/corpus_io.hpp"
#include "atceval/schema.hpp"

namespace atceval {

// Chat-completion endpoint. Requests go to <base_url>/chat/completions, so
// base_url normally ends in "/v1". The credential itself never lives here:
// only the name of the environment variable that holds it.
struct EndpointConfig {
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string model_name;
  std::string auth_token_env_var = "ATCEVAL_API_KEY";
  double request_timeout_seconds = 60.0;
  int max_retries = 3;
  int concurrency_limit = 4;
  double temperature = 0.0;
  double backoff_initial_seconds = 0.5;
  double backoff_max_seconds = 8.0;
};

std::vector<std::string> validate_endpoint(const EndpointConfig& ep);
nlohmann::json to_json(const EndpointConfig& ep);
// Throws ConfigError on bad values or a stray credential field.
EndpointConfig endpoint_from_json(const nlohmann::json& j);
EndpointConfig load_endpoint_config(const std::string& path);

struct ManifestEntry {
  std::string utterance_id;
  std::string raw_response;  // message content, verbatim; empty on failure
  double latency_seconds = 0.0;  // all attempts and backoff waits
  int retries = 0;
  int http_status = 0;  // 0 when no response arrived
  std::optional<std::string> error;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct RunManifest {
  std::string model_name;
  std::string corpus_hash;
  std::string prompt_template_hash;
  std::string timestamp;  // ISO-8601 UTC
  std::vector<ManifestEntry> entries;  // corpus order

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

inline constexpr const char* kManifestFormat = "atc-run-manifest";

void write_manifest(std::ostream& out, const RunManifest& m);
RunManifest load_manifest(std::istream& in);
RunManifest load_manifest_file(const std::string& path);

// Re-parses every stored response. run_model returns exactly this set.
PredictionSet predictions_from_manifest(const RunManifest& m);

// Throws ValidationError when the manifest has no entries.
double mean_latency(const RunManifest& m);

struct RunResult {
  PredictionSet predictions;
  RunManifest manifest;
};

// One request per utterance, at most concurrency_limit in flight. Throws
// ConfigError before sending anything if the credential is missing.
// Per-utterance failures are recorded in the manifest and the run continues.
RunResult run_model(const Corpus& corpus, const EndpointConfig& endpoint,
                    const std::string& prompt_template = canonical_prompt_template());

}  // namespace atceval
