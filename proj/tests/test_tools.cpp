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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "masbench/tools.hpp"

using namespace masbench;

TEST_CASE("parse_tool_call reads the last well-formed Action line") {
  auto c = parse_tool_call("Thought: hmm\nAction: calculator[1 + 2]");
  REQUIRE(c.has_value());
  CHECK(c->name == "calculator");
  CHECK(c->argument == "1 + 2");

  auto last = parse_tool_call("Action: a[1]\nAction: b[2]");
  REQUIRE(last.has_value());
  CHECK(last->name == "b");

  CHECK_FALSE(parse_tool_call("no action here").has_value());
  CHECK_FALSE(parse_tool_call("Action: noarg").has_value());
  CHECK_FALSE(parse_tool_call("Action: x[unclosed").has_value());
  CHECK_FALSE(parse_tool_call("Action: [1]").has_value());
  // Mid-line mentions do not count.
  CHECK_FALSE(parse_tool_call("see Action: x[1] inline").has_value());
}

TEST_CASE("render then parse is the identity on well-formed calls") {
  std::mt19937_64 rng(4242);
  const std::string name_chars = "abcdefghijklmnopqrstuvwxyz_";
  const std::string arg_chars =
      "abcdefghijklmnopqrstuvwxyz0123456789 +-*/(). ,";
  for (int i = 0; i < 300; ++i) {
    ToolCall call;
    int name_len = static_cast<int>(rng() % 10 + 1);
    for (int k = 0; k < name_len; ++k) {
      call.name.push_back(name_chars[rng() % name_chars.size()]);
    }
    int arg_len = static_cast<int>(rng() % 30);
    for (int k = 0; k < arg_len; ++k) {
      call.argument.push_back(arg_chars[rng() % arg_chars.size()]);
    }
    auto back = parse_tool_call(render_tool_call(call));
    REQUIRE(back.has_value());
    CHECK(*back == call);
  }
}

TEST_CASE("calculator handles precedence, parens and unary signs") {
  CHECK(evaluate_arithmetic("1 + 2") == "3");
  CHECK(evaluate_arithmetic("2 + 3 * 4") == "14");
  CHECK(evaluate_arithmetic("(2 + 3) * 4") == "20");
  CHECK(evaluate_arithmetic("-5 + 2") == "-3");
  CHECK(evaluate_arithmetic("10 / 4") == "2.5");
  CHECK(evaluate_arithmetic("2 * (3 + (4 - 1))") == "12");
  CHECK(evaluate_arithmetic("6*7") == "42");
}

TEST_CASE("calculator reports errors as observations, not exceptions") {
  CHECK(evaluate_arithmetic("1 / 0") == "error: division by zero");
  CHECK(evaluate_arithmetic("1 +") .rfind("error:", 0) == 0);
  CHECK(evaluate_arithmetic("(1 + 2").rfind("error:", 0) == 0);
  CHECK(evaluate_arithmetic("two plus two").rfind("error:", 0) == 0);
  CHECK(evaluate_arithmetic("").rfind("error:", 0) == 0);
}

TEST_CASE("calculator agrees with direct evaluation on random expressions") {
  std::mt19937_64 rng(777);
  for (int i = 0; i < 200; ++i) {
    int a = static_cast<int>(rng() % 100);
    int b = static_cast<int>(rng() % 100);
    int c = static_cast<int>(rng() % 99 + 1);
    std::ostringstream expr;
    expr << a << " + " << b << " * " << c;
    double expected = a + static_cast<double>(b) * c;
    std::string got = evaluate_arithmetic(expr.str());
    CHECK(got == std::to_string(static_cast<long long>(expected)));
  }
}

TEST_CASE("registry runs tools and reports unknown names") {
  ToolRegistry reg;
  reg.register_tool("echo", "repeats its argument",
                    [](const std::string& a) { return a; });
  CHECK(reg.has("echo"));
  CHECK_FALSE(reg.has("nope"));
  CHECK(reg.run({"echo", "hi"}) == "hi");
  std::string err = reg.run({"nope", "x"});
  CHECK(err.rfind("error: unknown tool nope", 0) == 0);
  CHECK(err.find("echo") != std::string::npos);
  CHECK_THROWS(reg.register_tool("echo", "dup", [](const std::string&) {
    return std::string();
  }));
}

TEST_CASE("tool handler exceptions become error observations") {
  ToolRegistry reg;
  reg.register_tool("boom", "always throws", [](const std::string&) -> std::string {
    throw std::runtime_error("kaput");
  });
  std::string obs = reg.run({"boom", ""});
  CHECK(obs.rfind("error: tool failed:", 0) == 0);
  CHECK(obs.find("kaput") != std::string::npos);
}

TEST_CASE("default registry wires calculator, code_exec and search") {
  ToolRegistry reg =
      default_tools({"python3", "{file}"}, MASBENCH_FIXTURES_DIR
                    "/search_fixture.tsv");
  CHECK(reg.run({"calculator", "6 * 7"}) == "42");
  CHECK(reg.run({"code_exec", "print(2 ** 10)"}) == "1024\n");
  std::string obs = reg.run({"search", "speed of light"});
  CHECK(obs.find("299792458") != std::string::npos);
  CHECK(reg.run({"search", "unknown topic xyz"}) == "no results");
  std::string desc = reg.describe_all();
  CHECK(desc.find("calculator:") != std::string::npos);
  CHECK(desc.find("code_exec:") != std::string::npos);
  CHECK(desc.find("search:") != std::string::npos);
}

TEST_CASE("search without a fixture degrades to an error observation") {
  ToolRegistry reg = default_tools({"python3", "{file}"});
  CHECK(reg.run({"search", "anything"}) ==
        "error: no search fixture configured");
}
