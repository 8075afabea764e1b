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

#include <memory>
#include <string>
#include <vector>

#include "masbench/gateway.hpp"
#include "masbench/prompts.hpp"
#include "masbench/tools.hpp"
#include "masbench/types.hpp"

namespace masbench {

struct MethodSpec {
  std::string name;
  ParamMap params;
};

struct AgentProfile {
  std::string agent_id;
  std::string role_description;
  std::string system_prompt;
};

// Shared resources handed to every method instance. An instance processes
// one sample at a time; the runner creates one instance per concurrent cell.
struct MethodContext {
  std::shared_ptr<Gateway> gateway;
  std::shared_ptr<const PromptStore> prompts;
  std::shared_ptr<const ToolRegistry> tools;
  ModelConfig model;
  bool trace_full = false;
  std::vector<std::string> interpreter_cmd = {"python3", "{file}"};
  int exec_timeout_ms = 10000;
};

// Common base: inference(Sample) -> MASOutput with a complete trace.
// Transport errors surface as terminated_by=error; turn/round caps surface
// as terminated_by=turn_limit, never as exceptions.
class Method {
 public:
  explicit Method(MethodContext ctx) : ctx_(std::move(ctx)) {}
  virtual ~Method() = default;

  MASOutput inference(const Sample& sample);

  virtual std::string name() const = 0;

 protected:
  virtual void run_impl(const Sample& sample) = 0;

  // Issues one chat completion, appends a trace event, returns the text.
  std::string call_llm(const std::vector<ChatMessage>& messages,
                       TraceKind kind, const std::string& agent_id);
  // Records a tool/sandbox step (zero usage).
  void add_tool_event(const std::string& agent_id, const std::string& request,
                      const std::string& observation);

  void set_response(std::string text) { response_ = std::move(text); }
  void set_terminated(TerminatedBy t, std::string reason = {}) {
    terminated_by_ = t;
    error_reason_ = std::move(reason);
  }

  ChatMessage sys(const std::string& content) const;
  ChatMessage user(const std::string& content) const;

  MethodContext ctx_;

 private:
  std::vector<TraceEvent> trace_;
  TokenUsage usage_;
  std::string response_;
  TerminatedBy terminated_by_ = TerminatedBy::completed;
  std::string error_reason_;
  std::int64_t next_seq_ = 0;
};

// Parses AgentVerse recruitment output: one agent per line, exactly
// "N. <name> | <role description>", N counting from 1. Returns empty on any
// deviation or count mismatch.
std::vector<AgentProfile> parse_agent_profiles(const std::string& text,
                                               int expected_count);

// Name-keyed construction with schema-validated params.
class MethodRegistry {
 public:
  static const MethodRegistry& instance();

  std::unique_ptr<Method> create(const MethodSpec& spec,
                                 MethodContext ctx) const;
  std::vector<std::string> names() const;

  // Throws ValidationError for unknown names / params; names the
  // out-of-scope status of known optimization or coding-pipeline methods.
  void validate_spec(const MethodSpec& spec) const;

 private:
  MethodRegistry();
  struct ParamDef {
    enum class Kind { integer, string } kind = Kind::integer;
    std::int64_t min = 1;
  };
  struct Entry {
    std::map<std::string, ParamDef> params;
    std::function<std::unique_ptr<Method>(const MethodSpec&, MethodContext)> make;
  };
  std::map<std::string, Entry> entries_;
};

// Convenience: validate + construct + run.
MASOutput run_method(const MethodSpec& spec, MethodContext ctx,
                     const Sample& sample);

}  // namespace masbench
