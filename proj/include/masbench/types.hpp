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

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace masbench {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Errors

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Domain enums

enum class Domain { math, mcq, knowledge, coding, assistant, other };

enum class Role { system, user, assistant, tool };

enum class TraceKind {
  llm_call,
  tool_call,
  aggregation,
  recruitment,
  critique,
  reflection
};

enum class TerminatedBy { completed, turn_limit, error };

enum class FailureKind { none, wrong_answer, format_error, tool_error, other };

enum class TestCaseKind { assertion_block, stdin_stdout };

std::string to_string(Domain d);
std::string to_string(Role r);
std::string to_string(TraceKind k);
std::string to_string(TerminatedBy t);
std::string to_string(FailureKind f);
std::string to_string(TestCaseKind k);

Domain domain_from_string(const std::string& s);
Role role_from_string(const std::string& s);
TraceKind trace_kind_from_string(const std::string& s);
TerminatedBy terminated_by_from_string(const std::string& s);
FailureKind failure_from_string(const std::string& s);
TestCaseKind test_case_kind_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Core value types

struct TestCase {
  TestCaseKind kind = TestCaseKind::assertion_block;
  std::string code_or_input;
  std::optional<std::string> expected_output;  // stdin_stdout only

  bool operator==(const TestCase&) const = default;
};

struct Sample {
  std::string id;
  Domain domain = Domain::other;
  std::string query;
  std::optional<std::string> gold_answer;
  std::optional<std::vector<std::string>> choices;  // MCQ
  std::optional<std::vector<TestCase>> test_cases;  // coding
  std::map<std::string, std::string> metadata;

  bool operator==(const Sample&) const = default;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  std::int64_t total() const { return prompt_tokens + completion_tokens; }
  bool operator==(const TokenUsage&) const = default;
};

// Component-wise sum; commutative and associative. Overflow raises.
TokenUsage merge_usage(const TokenUsage& a, const TokenUsage& b);

struct ChatMessage {
  Role role = Role::user;
  std::string content;
  std::optional<std::string> agent_id;
  std::optional<std::int64_t> round;

  bool operator==(const ChatMessage&) const = default;
};

struct TraceEvent {
  std::int64_t seq = 0;
  TraceKind kind = TraceKind::llm_call;
  std::string agent_id;
  std::string request_digest;
  std::string response_text;
  TokenUsage usage;
  std::int64_t elapsed_ms = 0;
  bool usage_estimated = false;
  // Populated only when full-trace capture is on.
  std::optional<std::string> request_full;

  bool operator==(const TraceEvent&) const = default;
};

struct MASOutput {
  std::string response;
  std::vector<TraceEvent> trace;
  TokenUsage total_usage;
  std::int64_t elapsed_ms = 0;
  TerminatedBy terminated_by = TerminatedBy::completed;
  // Set when terminated_by == error (e.g. "format", "transport: ...").
  std::string error_reason;

  bool operator==(const MASOutput&) const = default;
};

struct EvalVerdict {
  std::string protocol;
  bool correct = false;
  std::optional<std::string> extracted;
  FailureKind failure = FailureKind::none;
  std::optional<std::string> judge_raw;

  bool operator==(const EvalVerdict&) const = default;
};

// method_params values are scalars: string, integer, double or bool.
using ParamMap = std::map<std::string, Json>;

struct RunRecord {
  std::string sample_id;
  std::string method;
  ParamMap method_params;
  std::string model;
  MASOutput output;
  std::map<std::string, EvalVerdict> verdicts;

  // Resume key: (sample_id, method, method_params, model).
  std::string resume_key() const;

  bool operator==(const RunRecord&) const = default;
};

// ---------------------------------------------------------------------------
// JSON conversions (field names are part of the run-file format)

void to_json(Json& j, const TestCase& v);
void from_json(const Json& j, TestCase& v);
void to_json(Json& j, const Sample& v);
void from_json(const Json& j, Sample& v);
void to_json(Json& j, const TokenUsage& v);
void from_json(const Json& j, TokenUsage& v);
void to_json(Json& j, const ChatMessage& v);
void from_json(const Json& j, ChatMessage& v);
void to_json(Json& j, const TraceEvent& v);
void from_json(const Json& j, TraceEvent& v);
void to_json(Json& j, const MASOutput& v);
void from_json(const Json& j, MASOutput& v);
void to_json(Json& j, const EvalVerdict& v);
void from_json(const Json& j, EvalVerdict& v);
void to_json(Json& j, const RunRecord& v);
void from_json(const Json& j, RunRecord& v);

// One record per line, UTF-8. deserialize_record throws ParseError on
// malformed input; readers attach line numbers.
std::string serialize_record(const RunRecord& r);
RunRecord deserialize_record(const std::string& line);

// Reads a run file, skipping (with a warning to stderr) at most one
// truncated trailing line. Throws ParseError naming the line number for
// malformed non-trailing lines.
std::vector<RunRecord> read_run_file(const std::string& path);
void write_run_file(const std::string& path, const std::vector<RunRecord>& records);

// Returns every invariant violation (empty list = ok). Total function.
std::vector<std::string> validate_sample(const Sample& s);

// Sum of usage over LLM-backed trace events (every kind except tool_call;
// tool_call events carry zero usage).
TokenUsage llm_usage_sum(const std::vector<TraceEvent>& trace);

// FNV-1a 64-bit hex digest; stable across runs and platforms.
std::string stable_digest(const std::string& data);

// Digest of a serialized output with timing fields zeroed; used for
// determinism checks.
std::string canonical_digest(const MASOutput& out);

// Whitespace-token count scaled by 1.3, for endpoints that omit usage.
std::int64_t estimate_tokens(const std::string& text);

}  // namespace masbench
