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

#include "masbench/tools.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace masbench {

void ToolRegistry::register_tool(const std::string& name,
                                 const std::string& description,
                                 Handler handler) {
  if (tools_.count(name)) {
    throw std::invalid_argument("duplicate tool name: " + name);
  }
  tools_[name] = Entry{description, std::move(handler)};
}

bool ToolRegistry::has(const std::string& name) const {
  return tools_.count(name) > 0;
}

std::vector<std::string> ToolRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : tools_) out.push_back(k);
  return out;
}

const std::string& ToolRegistry::description(const std::string& name) const {
  return tools_.at(name).description;
}

std::string ToolRegistry::describe_all() const {
  std::ostringstream os;
  for (const auto& [k, v] : tools_) os << k << ": " << v.description << "\n";
  return os.str();
}

std::string ToolRegistry::run(const ToolCall& call) const {
  auto it = tools_.find(call.name);
  if (it == tools_.end()) {
    std::ostringstream os;
    os << "error: unknown tool " << call.name << "; available:";
    for (const auto& [k, v] : tools_) os << " " << k;
    return os.str();
  }
  try {
    return it->second.handler(call.argument);
  } catch (const std::exception& e) {
    return std::string("error: tool failed: ") + e.what();
  }
}

std::optional<ToolCall> parse_tool_call(const std::string& text) {
  std::optional<ToolCall> found;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string prefix = "Action: ";
    if (line.rfind(prefix, 0) != 0) continue;
    size_t open = line.find('[', prefix.size());
    if (open == std::string::npos || line.back() != ']') continue;
    std::string name = line.substr(prefix.size(), open - prefix.size());
    if (name.empty()) continue;
    std::string arg = line.substr(open + 1, line.size() - open - 2);
    if (arg.find(']') != std::string::npos) continue;
    found = ToolCall{name, arg};
  }
  return found;
}

std::string render_tool_call(const ToolCall& call) {
  return "Action: " + call.name + "[" + call.argument + "]";
}

// ---------------------------------------------------------------------------
// Calculator: recursive-descent over +,-,*,/ and parentheses.

namespace {

struct Calc {
  const std::string& s;
  size_t i = 0;
  bool error = false;
  std::string message;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  double expression() {
    double v = term();
    while (!error) {
      skip_ws();
      if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        char op = s[i++];
        double rhs = term();
        v = op == '+' ? v + rhs : v - rhs;
      } else {
        break;
      }
    }
    return v;
  }

  double term() {
    double v = factor();
    while (!error) {
      skip_ws();
      if (i < s.size() && (s[i] == '*' || s[i] == '/')) {
        char op = s[i++];
        double rhs = factor();
        if (op == '/') {
          if (rhs == 0.0) {
            fail("division by zero");
            return 0.0;
          }
          v /= rhs;
        } else {
          v *= rhs;
        }
      } else {
        break;
      }
    }
    return v;
  }

  double factor() {
    skip_ws();
    if (i >= s.size()) {
      fail("unexpected end of expression");
      return 0.0;
    }
    if (s[i] == '(') {
      ++i;
      double v = expression();
      skip_ws();
      if (i >= s.size() || s[i] != ')') {
        fail("missing closing parenthesis");
        return 0.0;
      }
      ++i;
      return v;
    }
    if (s[i] == '-') {
      ++i;
      return -factor();
    }
    if (s[i] == '+') {
      ++i;
      return factor();
    }
    size_t start = i;
    while (i < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
      ++i;
    }
    if (start == i) {
      fail(std::string("unexpected character '") + s[i] + "'");
      return 0.0;
    }
    try {
      return std::stod(s.substr(start, i - start));
    } catch (const std::exception&) {
      fail("invalid number");
      return 0.0;
    }
  }

  void fail(std::string msg) {
    if (!error) {
      error = true;
      message = std::move(msg);
    }
  }
};

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::string evaluate_arithmetic(const std::string& expr) {
  Calc c{expr};
  double v = c.expression();
  c.skip_ws();
  if (!c.error && c.i != expr.size()) {
    c.fail(std::string("unexpected character '") + expr[c.i] + "'");
  }
  if (c.error) return "error: " + c.message;
  return format_number(v);
}

ToolRegistry default_tools(std::vector<std::string> interpreter_cmd,
                           std::string search_fixture_path) {
  ToolRegistry reg;
  reg.register_tool("calculator",
                    "evaluate an arithmetic expression with + - * / ( )",
                    [](const std::string& arg) { return evaluate_arithmetic(arg); });
  reg.register_tool(
      "code_exec", "run a python snippet and return its output",
      [interpreter_cmd](const std::string& arg) {
        ExecRequest req;
        req.program = arg;
        req.interpreter_cmd = interpreter_cmd;
        ExecResult res = sandbox_exec(req);
        switch (res.status) {
          case ExecStatus::ok:
            return res.stdout_data.empty() ? std::string("(no output)")
                                           : res.stdout_data;
          case ExecStatus::timeout:
            return std::string("error: execution timed out");
          case ExecStatus::output_truncated:
            return "error: output truncated\n" + res.stdout_data;
          case ExecStatus::spawn_error:
            return "error: could not start interpreter: " + res.spawn_reason;
          case ExecStatus::nonzero_exit:
            return "error: exit code " +
                   std::to_string(res.exit_code.value_or(-1)) + "\n" +
                   res.stderr_data;
        }
        return std::string("error: unknown execution status");
      });
  reg.register_tool(
      "search", "look up a query in the offline search fixture",
      [search_fixture_path](const std::string& arg) -> std::string {
        if (search_fixture_path.empty()) {
          return "error: no search fixture configured";
        }
        // Fixture format: "query\tresult" per line; first substring hit wins.
        std::ifstream in(search_fixture_path);
        if (!in) return "error: cannot open search fixture";
        std::string line;
        while (std::getline(in, line)) {
          auto tab = line.find('\t');
          if (tab == std::string::npos) continue;
          if (line.substr(0, tab).find(arg) != std::string::npos ||
              arg.find(line.substr(0, tab)) != std::string::npos) {
            return line.substr(tab + 1);
          }
        }
        return "no results";
      });
  return reg;
}

}  // namespace masbench
