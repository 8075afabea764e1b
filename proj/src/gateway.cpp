// Copyright 2026 The masbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "masbench/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace masbench {

void ModelConfig::validate() const {
  if (temperature < 0.0 || temperature > 2.0) {
    throw ValidationError("temperature must be in [0, 2]");
  }
  if (max_tokens < 1) throw ValidationError("max_tokens must be >= 1");
  if (timeout_ms < 1) throw ValidationError("timeout_ms must be >= 1");
  if (max_retries < 0) throw ValidationError("max_retries must be >= 0");
}

std::string ChatRequest::flattened() const {
  std::ostringstream os;
  for (const auto& m : messages) {
    os << to_string(m.role) << ": " << m.content << "\n";
  }
  return os.str();
}

std::string ChatRequest::digest() const {
  Json j;
  j["model"] = model.name;
  j["temperature"] = model.temperature;
  j["max_tokens"] = model.max_tokens;
  j["messages"] = messages;
  if (stop) j["stop"] = *stop;
  return stable_digest(j.dump());
}

// ---------------------------------------------------------------------------
// Mock backend

MockEntry MockScript::seq(std::string response, std::optional<TokenUsage> usage) {
  MockEntry e;
  e.matcher = MockEntry::Matcher::next_in_sequence;
  e.response = std::move(response);
  e.usage = usage;
  return e;
}

MockEntry MockScript::contains(std::string pattern, std::string response,
                               std::optional<TokenUsage> usage) {
  MockEntry e;
  e.matcher = MockEntry::Matcher::prompt_contains;
  e.pattern = std::move(pattern);
  e.response = std::move(response);
  e.usage = usage;
  return e;
}

MockBackend::MockBackend(MockScript script) : script_(std::move(script)) {}

void MockBackend::fail_next(int times, int status) {
  std::lock_guard lock(mu_);
  fail_remaining_ = times;
  fail_status_ = status;
}

std::vector<std::string> MockBackend::prompts() const {
  std::lock_guard lock(const_cast<std::mutex&>(mu_));
  return prompts_;
}

Completion MockBackend::complete(const ChatRequest& req) {
  int now = in_flight_.fetch_add(1) + 1;
  int prev_max = max_in_flight_.load();
  while (now > prev_max &&
         !max_in_flight_.compare_exchange_weak(prev_max, now)) {
  }
  if (delay_ms_ > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
  }
  struct Dec {
    std::atomic<int>& v;
    ~Dec() { v.fetch_sub(1); }
  } dec{in_flight_};

  const std::string prompt = req.flattened();
  std::string response;
  std::optional<TokenUsage> usage;
  {
    std::lock_guard lock(mu_);
    prompts_.push_back(prompt);
    calls_.fetch_add(1);
    if (fail_remaining_ > 0) {
      --fail_remaining_;
      throw TransportError(fail_status_, "mock scripted failure");
    }
    const MockEntry* hit = nullptr;
    for (const auto& e : script_.entries) {
      if (e.matcher == MockEntry::Matcher::prompt_contains &&
          prompt.find(e.pattern) != std::string::npos) {
        hit = &e;
        break;
      }
    }
    if (!hit) {
      // Consume the next unused sequence entry, in order.
      while (seq_cursor_ < script_.entries.size() &&
             script_.entries[seq_cursor_].matcher !=
                 MockEntry::Matcher::next_in_sequence) {
        ++seq_cursor_;
      }
      if (seq_cursor_ < script_.entries.size()) {
        hit = &script_.entries[seq_cursor_++];
      }
    }
    if (hit) {
      response = hit->response;
      usage = hit->usage;
    } else {
      response = script_.default_response;
    }
  }
  Completion c;
  c.text = response;
  if (usage) {
    c.usage = *usage;
  } else {
    c.usage.prompt_tokens = estimate_tokens(prompt);
    c.usage.completion_tokens = estimate_tokens(response);
  }
  return c;
}

// ---------------------------------------------------------------------------
// HTTP backend

Completion HttpBackend::complete(const ChatRequest& req) {
  const ModelConfig& mc = req.model;
  std::string key;
  if (!mc.api_key_env.empty()) {
    const char* v = std::getenv(mc.api_key_env.c_str());
    if (!v) {
      throw ConfigurationError("API key environment variable not set: " +
                               mc.api_key_env);
    }
    key = v;
  }

  // Split base_url into origin and path prefix.
  std::string origin = mc.base_url;
  std::string prefix;
  auto scheme_end = origin.find("://");
  auto path_start =
      origin.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start != std::string::npos) {
    prefix = origin.substr(path_start);
    origin = origin.substr(0, path_start);
    if (prefix == "/") prefix.clear();
  }

  httplib::Client cli(origin);
  cli.set_connection_timeout(std::chrono::milliseconds(mc.timeout_ms));
  cli.set_read_timeout(std::chrono::milliseconds(mc.timeout_ms));
  cli.set_write_timeout(std::chrono::milliseconds(mc.timeout_ms));

  Json body;
  body["model"] = mc.name;
  body["temperature"] = mc.temperature;
  body["max_tokens"] = mc.max_tokens;
  Json msgs = Json::array();
  for (const auto& m : req.messages) {
    msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  body["messages"] = msgs;
  if (req.stop) body["stop"] = *req.stop;

  httplib::Headers headers;
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

  auto res = cli.Post(prefix + "/chat/completions", headers, body.dump(),
                      "application/json");
  if (!res) {
    throw TransportError(0, "network failure: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    std::string excerpt = res->body.substr(0, 300);
    throw TransportError(res->status, "HTTP " + std::to_string(res->status) +
                                          ": " + excerpt);
  }

  Json j;
  try {
    j = Json::parse(res->body);
  } catch (const Json::exception& e) {
    throw TransportError(res->status,
                         std::string("unparseable response body: ") + e.what());
  }
  Completion c;
  try {
    c.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw TransportError(res->status,
                         std::string("response missing choices: ") + e.what());
  }
  if (j.contains("usage") && j["usage"].contains("prompt_tokens") &&
      j["usage"].contains("completion_tokens")) {
    c.usage.prompt_tokens = j["usage"]["prompt_tokens"].get<std::int64_t>();
    c.usage.completion_tokens = j["usage"]["completion_tokens"].get<std::int64_t>();
  } else {
    c.usage.prompt_tokens = estimate_tokens(req.flattened());
    c.usage.completion_tokens = estimate_tokens(c.text);
    c.usage_estimated = true;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Slots

Slots::Slots(int limit) : limit_(limit) {
  if (limit < 1) throw ValidationError("concurrency limit must be >= 1");
}

SlotGuard Slots::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_use_ < limit_; });
  ++in_use_;
  return SlotGuard(this);
}

void Slots::release() {
  {
    std::lock_guard lock(mu_);
    --in_use_;
  }
  cv_.notify_one();
}

SlotGuard::~SlotGuard() {
  if (slots_) slots_->release();
}

// ---------------------------------------------------------------------------
// Gateway

bool is_retryable_status(int status) {
  return status == 0 || status == 429 || status >= 500;
}

Gateway::Gateway(std::shared_ptr<Backend> backend, int concurrency_limit)
    : backend_(std::move(backend)), slots_(concurrency_limit) {}

Completion Gateway::attempt(const ChatRequest& req) {
  Completion c = backend_->complete(req);
  {
    std::lock_guard lock(usage_mu_);
    usage_ = merge_usage(usage_, c.usage);
  }
  calls_.fetch_add(1);
  return c;
}

Completion Gateway::complete(const ChatRequest& req) {
  if (req.messages.empty()) throw ValidationError("request has no messages");
  Role first = req.messages.front().role;
  if (first != Role::system && first != Role::user) {
    throw ValidationError("first message must be system or user");
  }
  SlotGuard guard = slots_.acquire();
  return attempt(req);
}

Completion Gateway::complete_with_retry(const ChatRequest& req) {
  if (req.messages.empty()) throw ValidationError("request has no messages");
  const int max_attempts = 1 + req.model.max_retries;
  thread_local std::mt19937_64 rng{std::random_device{}()};
  SlotGuard guard = slots_.acquire();
  for (int i = 1;; ++i) {
    try {
      return attempt(req);
    } catch (TransportError& e) {
      e.attempts = i;
      if (!is_retryable_status(e.status) || i >= max_attempts) {
        TransportError out(e.status, std::string(e.what()) + " (after " +
                                         std::to_string(i) + " attempts)");
        out.attempts = i;
        throw out;
      }
      // Exponential backoff with full jitter.
      double ceiling = std::min<double>(backoff_cap_ms_,
                                        backoff_base_ms_ * std::pow(2.0, i - 1));
      std::uniform_real_distribution<double> dist(0.0, ceiling);
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<int>(dist(rng))));
    }
  }
}

TokenUsage Gateway::total_usage() const {
  std::lock_guard lock(usage_mu_);
  return usage_;
}

}  // namespace masbench
