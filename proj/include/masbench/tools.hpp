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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "masbench/sandbox.hpp"

namespace masbench {

struct ToolCall {
  std::string name;
  std::string argument;
  bool operator==(const ToolCall&) const = default;
};

// Handlers are total: they return observation text, never throw into the
// agent loop.
class ToolRegistry {
 public:
  using Handler = std::function<std::string(const std::string& argument)>;

  void register_tool(const std::string& name, const std::string& description,
                     Handler handler);
  bool has(const std::string& name) const;
  std::vector<std::string> names() const;
  const std::string& description(const std::string& name) const;

  // One line per tool: "name: description"; used in ReAct prompts.
  std::string describe_all() const;

  std::string run(const ToolCall& call) const;

 private:
  struct Entry {
    std::string description;
    Handler handler;
  };
  std::map<std::string, Entry> tools_;
};

// Parses the last line of the form "Action: <name>[<argument>]". Arguments
// may not contain newlines or ']'.
std::optional<ToolCall> parse_tool_call(const std::string& text);

// Inverse of parse_tool_call for well-formed (name, argument) pairs.
std::string render_tool_call(const ToolCall& call);

// Arithmetic over +,-,*,/ and parentheses; returns the value or an error
// observation.
std::string evaluate_arithmetic(const std::string& expr);

// Default registry: calculator, code_exec, and a fixture-backed search stub.
// search_fixture_path may be empty (search then reports no fixture).
ToolRegistry default_tools(std::vector<std::string> interpreter_cmd,
                           std::string search_fixture_path = {});

}  // namespace masbench
