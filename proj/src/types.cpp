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

#include "masbench/types.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace masbench {

namespace {

template <typename E>
[[noreturn]] void bad_enum(const std::string& what, const std::string& s) {
  throw ParseError("unknown " + what + " value: '" + s + "'");
}

}  // namespace

std::string to_string(Domain d) {
  switch (d) {
    case Domain::math: return "math";
    case Domain::mcq: return "mcq";
    case Domain::knowledge: return "knowledge";
    case Domain::coding: return "coding";
    case Domain::assistant: return "assistant";
    case Domain::other: return "other";
  }
  return "other";
}

Domain domain_from_string(const std::string& s) {
  if (s == "math") return Domain::math;
  if (s == "mcq") return Domain::mcq;
  if (s == "knowledge") return Domain::knowledge;
  if (s == "coding") return Domain::coding;
  if (s == "assistant") return Domain::assistant;
  if (s == "other") return Domain::other;
  bad_enum<Domain>("domain", s);
}

std::string to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    case Role::tool: return "tool";
  }
  return "user";
}

Role role_from_string(const std::string& s) {
  if (s == "system") return Role::system;
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  if (s == "tool") return Role::tool;
  bad_enum<Role>("role", s);
}

std::string to_string(TraceKind k) {
  switch (k) {
    case TraceKind::llm_call: return "llm_call";
    case TraceKind::tool_call: return "tool_call";
    case TraceKind::aggregation: return "aggregation";
    case TraceKind::recruitment: return "recruitment";
    case TraceKind::critique: return "critique";
    case TraceKind::reflection: return "reflection";
  }
  return "llm_call";
}

TraceKind trace_kind_from_string(const std::string& s) {
  if (s == "llm_call") return TraceKind::llm_call;
  if (s == "tool_call") return TraceKind::tool_call;
  if (s == "aggregation") return TraceKind::aggregation;
  if (s == "recruitment") return TraceKind::recruitment;
  if (s == "critique") return TraceKind::critique;
  if (s == "reflection") return TraceKind::reflection;
  bad_enum<TraceKind>("trace kind", s);
}

std::string to_string(TerminatedBy t) {
  switch (t) {
    case TerminatedBy::completed: return "completed";
    case TerminatedBy::turn_limit: return "turn_limit";
    case TerminatedBy::error: return "error";
  }
  return "completed";
}

TerminatedBy terminated_by_from_string(const std::string& s) {
  if (s == "completed") return TerminatedBy::completed;
  if (s == "turn_limit") return TerminatedBy::turn_limit;
  if (s == "error") return TerminatedBy::error;
  bad_enum<TerminatedBy>("terminated_by", s);
}

std::string to_string(FailureKind f) {
  switch (f) {
    case FailureKind::none: return "none";
    case FailureKind::wrong_answer: return "wrong_answer";
    case FailureKind::format_error: return "format_error";
    case FailureKind::tool_error: return "tool_error";
    case FailureKind::other: return "other";
  }
  return "none";
}

FailureKind failure_from_string(const std::string& s) {
  if (s == "none") return FailureKind::none;
  if (s == "wrong_answer") return FailureKind::wrong_answer;
  if (s == "format_error") return FailureKind::format_error;
  if (s == "tool_error") return FailureKind::tool_error;
  if (s == "other") return FailureKind::other;
  bad_enum<FailureKind>("failure", s);
}

std::string to_string(TestCaseKind k) {
  switch (k) {
    case TestCaseKind::assertion_block: return "assertion_block";
    case TestCaseKind::stdin_stdout: return "stdin_stdout";
  }
  return "assertion_block";
}

TestCaseKind test_case_kind_from_string(const std::string& s) {
  if (s == "assertion_block") return TestCaseKind::assertion_block;
  if (s == "stdin_stdout") return TestCaseKind::stdin_stdout;
  bad_enum<TestCaseKind>("test case kind", s);
}

// ---------------------------------------------------------------------------

TokenUsage merge_usage(const TokenUsage& a, const TokenUsage& b) {
  TokenUsage out;
  if (__builtin_add_overflow(a.prompt_tokens, b.prompt_tokens, &out.prompt_tokens) ||
      __builtin_add_overflow(a.completion_tokens, b.completion_tokens,
                             &out.completion_tokens)) {
    throw std::overflow_error("token usage sum overflows");
  }
  if (out.prompt_tokens < 0 || out.completion_tokens < 0) {
    throw std::overflow_error("token usage sum went negative");
  }
  return out;
}

std::string RunRecord::resume_key() const {
  Json params = method_params;
  return sample_id + "\x1f" + method + "\x1f" + params.dump() + "\x1f" + model;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(Json& j, const TestCase& v) {
  j = Json{{"kind", to_string(v.kind)}, {"code_or_input", v.code_or_input}};
  if (v.expected_output) j["expected_output"] = *v.expected_output;
}

void from_json(const Json& j, TestCase& v) {
  v.kind = test_case_kind_from_string(j.at("kind").get<std::string>());
  v.code_or_input = j.at("code_or_input").get<std::string>();
  if (j.contains("expected_output")) {
    v.expected_output = j.at("expected_output").get<std::string>();
  } else {
    v.expected_output.reset();
  }
}

void to_json(Json& j, const Sample& v) {
  j = Json{{"id", v.id},
           {"domain", to_string(v.domain)},
           {"query", v.query}};
  if (v.gold_answer) j["gold_answer"] = *v.gold_answer;
  if (v.choices) j["choices"] = *v.choices;
  if (v.test_cases) j["test_cases"] = *v.test_cases;
  if (!v.metadata.empty()) j["metadata"] = v.metadata;
}

void from_json(const Json& j, Sample& v) {
  v.id = j.at("id").get<std::string>();
  v.domain = domain_from_string(j.at("domain").get<std::string>());
  v.query = j.at("query").get<std::string>();
  v.gold_answer.reset();
  v.choices.reset();
  v.test_cases.reset();
  v.metadata.clear();
  if (j.contains("gold_answer") && !j.at("gold_answer").is_null()) {
    v.gold_answer = j.at("gold_answer").get<std::string>();
  }
  if (j.contains("choices") && !j.at("choices").is_null()) {
    v.choices = j.at("choices").get<std::vector<std::string>>();
  }
  if (j.contains("test_cases") && !j.at("test_cases").is_null()) {
    v.test_cases = j.at("test_cases").get<std::vector<TestCase>>();
  }
  if (j.contains("metadata") && !j.at("metadata").is_null()) {
    v.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  }
}

void to_json(Json& j, const TokenUsage& v) {
  j = Json{{"prompt_tokens", v.prompt_tokens},
           {"completion_tokens", v.completion_tokens}};
}

void from_json(const Json& j, TokenUsage& v) {
  v.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
  v.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
  if (v.prompt_tokens < 0 || v.completion_tokens < 0) {
    throw ParseError("negative token counts");
  }
}

void to_json(Json& j, const ChatMessage& v) {
  j = Json{{"role", to_string(v.role)}, {"content", v.content}};
  if (v.agent_id) j["agent_id"] = *v.agent_id;
  if (v.round) j["round"] = *v.round;
}

void from_json(const Json& j, ChatMessage& v) {
  v.role = role_from_string(j.at("role").get<std::string>());
  v.content = j.at("content").get<std::string>();
  v.agent_id.reset();
  v.round.reset();
  if (j.contains("agent_id")) v.agent_id = j.at("agent_id").get<std::string>();
  if (j.contains("round")) v.round = j.at("round").get<std::int64_t>();
}

void to_json(Json& j, const TraceEvent& v) {
  j = Json{{"seq", v.seq},
           {"kind", to_string(v.kind)},
           {"agent_id", v.agent_id},
           {"request_digest", v.request_digest},
           {"response_text", v.response_text},
           {"usage", v.usage},
           {"elapsed_ms", v.elapsed_ms}};
  if (v.usage_estimated) j["usage_estimated"] = true;
  if (v.request_full) j["request_full"] = *v.request_full;
}

void from_json(const Json& j, TraceEvent& v) {
  v.seq = j.at("seq").get<std::int64_t>();
  v.kind = trace_kind_from_string(j.at("kind").get<std::string>());
  v.agent_id = j.at("agent_id").get<std::string>();
  v.request_digest = j.at("request_digest").get<std::string>();
  v.response_text = j.at("response_text").get<std::string>();
  v.usage = j.at("usage").get<TokenUsage>();
  v.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
  v.usage_estimated = j.value("usage_estimated", false);
  v.request_full.reset();
  if (j.contains("request_full")) {
    v.request_full = j.at("request_full").get<std::string>();
  }
}

void to_json(Json& j, const MASOutput& v) {
  j = Json{{"response", v.response},
           {"trace", v.trace},
           {"total_usage", v.total_usage},
           {"elapsed_ms", v.elapsed_ms},
           {"terminated_by", to_string(v.terminated_by)}};
  if (!v.error_reason.empty()) j["error_reason"] = v.error_reason;
}

void from_json(const Json& j, MASOutput& v) {
  v.response = j.at("response").get<std::string>();
  v.trace = j.at("trace").get<std::vector<TraceEvent>>();
  v.total_usage = j.at("total_usage").get<TokenUsage>();
  v.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
  v.terminated_by =
      terminated_by_from_string(j.at("terminated_by").get<std::string>());
  v.error_reason = j.value("error_reason", std::string{});
}

void to_json(Json& j, const EvalVerdict& v) {
  j = Json{{"protocol", v.protocol},
           {"correct", v.correct},
           {"failure", to_string(v.failure)}};
  if (v.extracted) j["extracted"] = *v.extracted;
  if (v.judge_raw) j["judge_raw"] = *v.judge_raw;
}

void from_json(const Json& j, EvalVerdict& v) {
  v.protocol = j.at("protocol").get<std::string>();
  v.correct = j.at("correct").get<bool>();
  v.failure = failure_from_string(j.at("failure").get<std::string>());
  v.extracted.reset();
  v.judge_raw.reset();
  if (j.contains("extracted")) v.extracted = j.at("extracted").get<std::string>();
  if (j.contains("judge_raw")) v.judge_raw = j.at("judge_raw").get<std::string>();
}

void to_json(Json& j, const RunRecord& v) {
  j = Json{{"sample_id", v.sample_id},
           {"method", v.method},
           {"method_params", v.method_params},
           {"model", v.model},
           {"output", v.output},
           {"verdicts", v.verdicts}};
}

void from_json(const Json& j, RunRecord& v) {
  v.sample_id = j.at("sample_id").get<std::string>();
  v.method = j.at("method").get<std::string>();
  v.method_params = j.at("method_params").get<ParamMap>();
  v.model = j.at("model").get<std::string>();
  v.output = j.at("output").get<MASOutput>();
  v.verdicts = j.at("verdicts").get<std::map<std::string, EvalVerdict>>();
}

std::string serialize_record(const RunRecord& r) {
  Json j = r;
  return j.dump();
}

RunRecord deserialize_record(const std::string& line) {
  try {
    Json j = Json::parse(line);
    return j.get<RunRecord>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed record: ") + e.what());
  }
}

std::vector<RunRecord> read_run_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run file: " + path);
  std::vector<RunRecord> out;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<std::size_t, std::string>> bad;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(deserialize_record(line));
    } catch (const ParseError& e) {
      bad.emplace_back(lineno, e.what());
    }
  }
  // Only a truncated trailing line is tolerated (crash during append).
  if (!bad.empty()) {
    if (bad.size() == 1 && bad.front().first == lineno) {
      std::cerr << "warning: " << path << ": discarding partial trailing line "
                << lineno << "\n";
    } else {
      std::ostringstream msg;
      msg << path << ": line " << bad.front().first << ": "
          << bad.front().second;
      throw ParseError(msg.str());
    }
  }
  return out;
}

void write_run_file(const std::string& path,
                    const std::vector<RunRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write run file: " + path);
  for (const auto& r : records) out << serialize_record(r) << "\n";
}

std::vector<std::string> validate_sample(const Sample& s) {
  std::vector<std::string> v;
  if (s.id.empty()) v.push_back("id is empty");
  if (s.query.empty()) v.push_back("query is empty");
  if (s.domain == Domain::coding) {
    if (!s.test_cases || s.test_cases->empty()) {
      v.push_back("coding sample missing test_cases");
    }
  }
  if (s.domain == Domain::mcq) {
    if (!s.choices) {
      v.push_back("mcq sample missing choices");
    } else if (s.choices->size() < 2) {
      v.push_back("mcq sample has fewer than 2 choices");
    }
  }
  if (s.test_cases) {
    for (std::size_t i = 0; i < s.test_cases->size(); ++i) {
      const auto& tc = (*s.test_cases)[i];
      if (tc.kind == TestCaseKind::stdin_stdout && !tc.expected_output) {
        v.push_back("test_case " + std::to_string(i) +
                    " is stdin_stdout without expected_output");
      }
    }
  }
  return v;
}

TokenUsage llm_usage_sum(const std::vector<TraceEvent>& trace) {
  TokenUsage sum;
  for (const auto& ev : trace) {
    if (ev.kind == TraceKind::tool_call) continue;
    sum = merge_usage(sum, ev.usage);
  }
  return sum;
}

std::string stable_digest(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string canonical_digest(const MASOutput& out) {
  MASOutput copy = out;
  copy.elapsed_ms = 0;
  for (auto& ev : copy.trace) ev.elapsed_ms = 0;
  Json j = copy;
  return stable_digest(j.dump());
}

std::int64_t estimate_tokens(const std::string& text) {
  std::int64_t words = 0;
  bool in_word = false;
  for (char c : text) {
    bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!ws && !in_word) ++words;
    in_word = !ws;
  }
  return static_cast<std::int64_t>(std::llround(words * 1.3));
}

}  // namespace masbench
