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

#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "masbench/types.hpp"

namespace masbench {

// ---------------------------------------------------------------------------

struct ModelConfig {
  std::string name;
  std::string base_url;       // "mock" selects the scripted backend
  std::string api_key_env;    // env var holding the bearer token
  double temperature = 0.5;
  int max_tokens = 2048;
  int timeout_ms = 120000;
  int max_retries = 3;

  void validate() const;  // throws ValidationError
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  ModelConfig model;
  std::optional<std::vector<std::string>> stop;

  // Plain-text rendering of the conversation; used for mock matching and
  // request digests.
  std::string flattened() const;
  std::string digest() const;
};

struct Completion {
  std::string text;
  TokenUsage usage;
  bool usage_estimated = false;
};

// Transport failure: network error (status 0), non-2xx status, timeout.
struct TransportError : std::runtime_error {
  int status = 0;
  int attempts = 1;
  TransportError(int status_, const std::string& msg)
      : std::runtime_error(msg), status(status_) {}
};

struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion complete(const ChatRequest& req) = 0;
};

// ---------------------------------------------------------------------------
// Scripted mock backend.

struct MockEntry {
  enum class Matcher { next_in_sequence, prompt_contains };
  Matcher matcher = Matcher::next_in_sequence;
  std::string pattern;  // prompt_contains only
  std::string response;
  std::optional<TokenUsage> usage;  // absent: estimated from text
};

struct MockScript {
  std::vector<MockEntry> entries;
  // Fallback when no entry matches; keeps full-grid runs deterministic.
  std::string default_response = "Answer: 42";

  static MockEntry seq(std::string response,
                       std::optional<TokenUsage> usage = std::nullopt);
  static MockEntry contains(std::string pattern, std::string response,
                            std::optional<TokenUsage> usage = std::nullopt);
};

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockScript script);

  Completion complete(const ChatRequest& req) override;

  // Artificial per-call latency; widens race windows in concurrency tests.
  void set_delay_ms(int ms) { delay_ms_ = ms; }
  // When set, every call throws until the counter reaches zero.
  void fail_next(int times, int status);

  std::int64_t call_count() const { return calls_.load(); }
  int max_in_flight() const { return max_in_flight_.load(); }
  std::vector<std::string> prompts() const;

 private:
  MockScript script_;
  std::mutex mu_;
  std::size_t seq_cursor_ = 0;
  std::vector<std::string> prompts_;
  int fail_remaining_ = 0;
  int fail_status_ = 500;
  std::atomic<std::int64_t> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  int delay_ms_ = 0;
};

// ---------------------------------------------------------------------------
// OpenAI-compatible HTTP backend (POST {base_url}/chat/completions).

class HttpBackend : public Backend {
 public:
  Completion complete(const ChatRequest& req) override;
};

// ---------------------------------------------------------------------------
// Bounded in-flight slots with RAII release.

class SlotGuard;

class Slots {
 public:
  explicit Slots(int limit);
  SlotGuard acquire();
  int limit() const { return limit_; }

 private:
  friend class SlotGuard;
  void release();
  int limit_;
  int in_use_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

class SlotGuard {
 public:
  SlotGuard(SlotGuard&& o) noexcept : slots_(o.slots_) { o.slots_ = nullptr; }
  SlotGuard& operator=(SlotGuard&&) = delete;
  SlotGuard(const SlotGuard&) = delete;
  ~SlotGuard();

 private:
  friend class Slots;
  explicit SlotGuard(Slots* s) : slots_(s) {}
  Slots* slots_;
};

// ---------------------------------------------------------------------------

// One gateway per run: bounded concurrency, bounded retries, run-wide
// usage accounting.
class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, int concurrency_limit = 8);

  // Single attempt, slot-bounded.
  Completion complete(const ChatRequest& req);

  // Up to 1+max_retries attempts; retries transport failures, 429 and 5xx
  // with exponential backoff and full jitter. Other 4xx fail immediately.
  Completion complete_with_retry(const ChatRequest& req);

  SlotGuard acquire_slot() { return slots_.acquire(); }

  TokenUsage total_usage() const;
  std::int64_t total_calls() const { return calls_.load(); }

  // Backoff tuning for tests; production default is 500 ms base, cap 8 s.
  void set_backoff(int base_ms, int cap_ms) {
    backoff_base_ms_ = base_ms;
    backoff_cap_ms_ = cap_ms;
  }

  Backend& backend() { return *backend_; }

 private:
  Completion attempt(const ChatRequest& req);

  std::shared_ptr<Backend> backend_;
  Slots slots_;
  mutable std::mutex usage_mu_;
  TokenUsage usage_;
  std::atomic<std::int64_t> calls_{0};
  int backoff_base_ms_ = 500;
  int backoff_cap_ms_ = 8000;
};

bool is_retryable_status(int status);

}  // namespace masbench
