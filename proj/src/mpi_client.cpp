#include "mpi_client.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"
#include "sha256.hpp"

namespace traitlab {

namespace {

std::string iso_now() {
  using namespace std::chrono;
  auto now = system_clock::now();
  std::time_t secs = system_clock::to_time_t(now);
  int ms = static_cast<int>(
      duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char date[24];
  std::strftime(date, sizeof(date), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[32];
  std::snprintf(out, sizeof(out), "%s.%03dZ", date, ms);
  return out;
}

struct Endpoint {
  std::string root;  // scheme://host:port for the http client
  std::string path;  // full request path
};

Endpoint split_url(const std::string& base_url) {
  auto scheme = base_url.find("://");
  if (scheme == std::string::npos) {
    fail(errc::config, "base_url needs a scheme, e.g. http://host:port");
  }
  auto slash = base_url.find('/', scheme + 3);
  Endpoint e;
  e.root = slash == std::string::npos ? base_url : base_url.substr(0, slash);
  std::string prefix =
      slash == std::string::npos ? "" : base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  e.path = (prefix.empty() ? "/v1" : prefix) + "/chat/completions";
  return e;
}

void validate_config(const EndpointConfig& cfg) {
  if (cfg.base_url.empty()) fail(errc::config, "base_url is required");
  if (cfg.model.empty()) fail(errc::config, "model is required");
  if (cfg.concurrency < 1) fail(errc::config, "concurrency must be >= 1");
  if (cfg.timeout_ms <= 0) fail(errc::config, "timeout must be positive");
  if (cfg.max_attempts < 1) fail(errc::config, "max_attempts must be >= 1");
  if (cfg.retry_base_ms < 0) fail(errc::config, "retry_base_ms must be >= 0");
}

std::string inventory_digest(const std::vector<MpiItem>& items) {
  std::string blob;
  for (const auto& it : items) {
    blob += it.id;
    blob += '\x1f';
    blob += it.statement;
    blob += '\x1f';
    blob += trait_letter(it.trait);
    blob += it.key == ItemKey::Positive ? '+' : '-';
    blob += '\n';
  }
  return sha256_hex(blob);
}

nlohmann::json config_snapshot(const EndpointConfig& cfg) {
  return nlohmann::json{
      {"base_url", cfg.base_url},
      {"model", cfg.model},
      {"api_key_env", cfg.api_key_env},
      {"temperature", cfg.temperature},
      {"max_attempts", cfg.max_attempts},
      {"concurrency", cfg.concurrency},
      {"timeout_ms", cfg.timeout_ms},
      {"retry_base_ms", cfg.retry_base_ms},
      {"template", cfg.prompt_template.empty() ? "default" : "custom"},
  };
}

}  // namespace

const std::string& default_prompt_template() {
  static const std::string t =
      "Consider the following statement: \"{statement}\"\n"
      "Choose the option that best describes how accurately the statement "
      "describes you.\n"
      "(A) Very Accurate\n"
      "(B) Moderately Accurate\n"
      "(C) Neither Accurate Nor Inaccurate\n"
      "(D) Moderately Inaccurate\n"
      "(E) Very Inaccurate\n"
      "Answer with a single option letter.";
  return t;
}

std::string render_prompt(const MpiItem& item, const std::string& tmpl) {
  const std::string& t = tmpl.empty() ? default_prompt_template() : tmpl;
  static const std::string placeholder = "{statement}";
  if (t.find(placeholder) == std::string::npos) {
    fail(errc::bad_template, "template lacks the {statement} placeholder");
  }
  std::string out;
  std::size_t from = 0;
  for (;;) {
    auto pos = t.find(placeholder, from);
    if (pos == std::string::npos) {
      out += t.substr(from);
      return out;
    }
    out += t.substr(from, pos - from);
    out += item.statement;
    from = pos + placeholder.size();
  }
}

AdministrationRun administer(const std::vector<MpiItem>& items,
                             const EndpointConfig& cfg) {
  validate_config(cfg);
  if (items.empty()) fail(errc::invalid_argument, "no items to administer");

  std::string api_key;
  if (!cfg.api_key_env.empty()) {
    const char* v = std::getenv(cfg.api_key_env.c_str());
    if (v == nullptr) {
      fail(errc::config,
           "credential environment variable " + cfg.api_key_env +
               " is not set");
    }
    api_key = v;
  }

  Endpoint ep = split_url(cfg.base_url);

  AdministrationRun run;
  run.inventory_digest = inventory_digest(items);
  run.config_json = config_snapshot(cfg).dump();
  run.responses.resize(items.size());
  run.transcript.resize(items.size());
  std::vector<char> transport_failed(items.size(), 0);

  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    httplib::Client cli(ep.root);
    time_t tsec = cfg.timeout_ms / 1000;
    time_t tusec = (cfg.timeout_ms % 1000) * 1000;
    cli.set_connection_timeout(tsec, tusec);
    cli.set_read_timeout(tsec, tusec);
    cli.set_write_timeout(tsec, tusec);
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= items.size()) return;

      const MpiItem& item = items[i];
      TranscriptEntry& tr = run.transcript[i];
      tr.item_id = item.id;
      tr.prompt = render_prompt(item, cfg.prompt_template);

      nlohmann::json body{
          {"model", cfg.model},
          {"temperature", cfg.temperature},
          {"messages",
           {{{"role", "user"}, {"content", tr.prompt}}}},
      };
      if (cfg.max_tokens > 0) body["max_tokens"] = cfg.max_tokens;
      std::string payload = body.dump();

      Rng jitter_rng(0x7c3bd1f0a5e894d3ull ^ (i * 0x9E3779B97F4A7C15ull));
      std::string raw;
      std::string last_error;
      bool got = false;
      for (int attempt = 1; attempt <= cfg.max_attempts && !got; ++attempt) {
        AttemptLog log;
        log.attempt = attempt;
        if (attempt > 1) {
          int shift = attempt - 2 > 16 ? 16 : attempt - 2;
          long long step =
              static_cast<long long>(cfg.retry_base_ms) << shift;
          long long extra =
              step > 0 ? static_cast<long long>(jitter_rng.below(
                             static_cast<std::uint64_t>(step)))
                       : 0;
          log.backoff_ms = static_cast<int>(step + extra);
          std::this_thread::sleep_for(
              std::chrono::milliseconds(log.backoff_ms));
        }
        log.started_at = iso_now();

        httplib::Headers headers;
        if (!api_key.empty()) {
          headers.emplace("Authorization", "Bearer " + api_key);
        }
        auto res = cli.Post(ep.path, headers, payload, "application/json");
        if (!res) {
          log.status = 0;
          log.error = "transport: " + httplib::to_string(res.error());
        } else {
          log.status = res->status;
          if (res->status == 200) {
            auto j = nlohmann::json::parse(res->body, nullptr, false);
            if (!j.is_discarded() && j.contains("choices") &&
                j["choices"].is_array() && !j["choices"].empty() &&
                j["choices"][0].contains("message") &&
                j["choices"][0]["message"].contains("content") &&
                j["choices"][0]["message"]["content"].is_string()) {
              raw = j["choices"][0]["message"]["content"].get<std::string>();
              got = true;
              log.ok = true;
            } else {
              log.error = "malformed completion body";
            }
          } else {
            log.error = "http status " + std::to_string(res->status);
          }
        }
        tr.attempts.push_back(std::move(log));
        if (!got) last_error = tr.attempts.back().error;
      }

      run.responses[i].item_id = item.id;
      if (got) {
        tr.raw = raw;
        run.responses[i].raw = raw;
        run.responses[i].choice = parse_choice(raw);
      } else {
        run.responses[i].raw = last_error;
        run.responses[i].choice = 0;
        transport_failed[i] = 1;
      }
    }
  };

  std::size_t n_workers = cfg.concurrency;
  if (n_workers > items.size()) n_workers = items.size();
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& th : threads) th.join();

  bool any_ok = false;
  for (char f : transport_failed) {
    if (!f) any_ok = true;
  }
  if (!any_ok) {
    fail(errc::all_requests_failed,
         "every item failed at the transport layer");
  }
  return run;
}

std::string run_json(const AdministrationRun& run) {
  nlohmann::json j;
  j["inventory_digest"] = run.inventory_digest;
  j["config"] = nlohmann::json::parse(run.config_json);
  auto responses = nlohmann::json::array();
  for (const auto& r : run.responses) {
    nlohmann::json e{{"item_id", r.item_id}, {"raw", r.raw}};
    if (r.choice != 0) e["choice"] = std::string(1, r.choice);
    responses.push_back(std::move(e));
  }
  j["responses"] = std::move(responses);
  auto transcript = nlohmann::json::array();
  for (const auto& t : run.transcript) {
    auto attempts = nlohmann::json::array();
    for (const auto& a : t.attempts) {
      attempts.push_back({{"attempt", a.attempt},
                          {"started_at", a.started_at},
                          {"backoff_ms", a.backoff_ms},
                          {"status", a.status},
                          {"ok", a.ok},
                          {"error", a.error}});
    }
    transcript.push_back({{"item_id", t.item_id},
                          {"prompt", t.prompt},
                          {"raw", t.raw},
                          {"attempts", std::move(attempts)}});
  }
  j["transcript"] = std::move(transcript);
  return j.dump(2) + "\n";
}

std::string responses_jsonl(const AdministrationRun& run) {
  std::string out;
  for (const auto& r : run.responses) {
    nlohmann::json e{{"item_id", r.item_id}, {"raw", r.raw}};
    if (r.choice != 0) e["choice"] = std::string(1, r.choice);
    out += e.dump();
    out += '\n';
  }
  return out;
}

}  // namespace traitlab
