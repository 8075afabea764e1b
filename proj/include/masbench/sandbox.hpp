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
#include <optional>
#include <string>
#include <vector>

#include "masbench/types.hpp"

namespace masbench {

enum class ExecStatus { ok, nonzero_exit, timeout, output_truncated, spawn_error };

std::string to_string(ExecStatus s);

struct ExecRequest {
  std::string program;
  // External interpreter argv; "{file}" is replaced by the program path.
  std::vector<std::string> interpreter_cmd = {"python3", "{file}"};
  std::optional<std::string> stdin_data;
  int timeout_ms = 10000;
  std::int64_t max_output_bytes = 1048576;
};

struct ExecResult {
  ExecStatus status = ExecStatus::ok;
  std::optional<int> exit_code;
  std::string stdout_data;
  std::string stderr_data;
  std::int64_t elapsed_ms = 0;
  std::string spawn_reason;  // spawn_error only
};

// Runs the program in a child process: private temp dir as cwd, environment
// scrubbed to an allowlist, output capped at max_output_bytes, the whole
// process group killed at timeout, temp dir removed afterward.
ExecResult sandbox_exec(const ExecRequest& req);

// Returns the body of the last triple-backtick fenced block, or nullopt.
std::optional<std::string> extract_code_block(const std::string& response);

// Outcome of running one program against a list of test cases.
struct TestRun {
  bool passed = false;
  bool timed_out = false;        // any case hit the timeout
  int failed_case = -1;          // index of the first failing case
  std::string failure_text;      // stderr / diff of the first failure
};

// assertion_block cases append the test code to the program and pass iff the
// process exits 0; stdin_stdout cases feed the input and compare trimmed
// stdout to the expected output.
TestRun run_test_cases(const std::string& program,
                       const std::vector<TestCase>& cases,
                       const std::vector<std::string>& interpreter_cmd,
                       int timeout_ms = 10000);

}  // namespace masbench
