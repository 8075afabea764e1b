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

#include <signal.h>
#include <stdlib.h>

#include <string>

#include "masbench/sandbox.hpp"

using namespace masbench;

TEST_CASE("successful run captures stdout and stderr separately") {
  ExecRequest req;
  req.program = "import sys\nprint('out line')\nprint('err line', file=sys.stderr)\n";
  ExecResult res = sandbox_exec(req);
  CHECK(res.status == ExecStatus::ok);
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_data == "out line\n");
  CHECK(res.stderr_data == "err line\n");
}

TEST_CASE("nonzero exit is reported with the exit code") {
  ExecRequest req;
  req.program = "import sys\nsys.exit(3)\n";
  ExecResult res = sandbox_exec(req);
  CHECK(res.status == ExecStatus::nonzero_exit);
  CHECK(res.exit_code == 3);
}

TEST_CASE("stdin is delivered to the child") {
  ExecRequest req;
  req.program = "import sys\nprint(sys.stdin.read().strip().upper())\n";
  req.stdin_data = "hello sandbox\n";
  ExecResult res = sandbox_exec(req);
  CHECK(res.status == ExecStatus::ok);
  CHECK(res.stdout_data == "HELLO SANDBOX\n");
}

TEST_CASE("timeout kills the child inside the grace window") {
  ExecRequest req;
  req.program = "import time\ntime.sleep(60)\n";
  req.timeout_ms = 2000;
  ExecResult res = sandbox_exec(req);
  CHECK(res.status == ExecStatus::timeout);
  CHECK(res.elapsed_ms >= 2000);
  CHECK(res.elapsed_ms < 4000);
}

TEST_CASE("timeout kills grandchildren too") {
  // The parent spawns a sleeper that prints its pid, then blocks.
  ExecRequest req;
  req.program =
      "import subprocess, sys, time\n"
      "p = subprocess.Popen(['sleep', '60'])\n"
      "print(p.pid, flush=True)\n"
      "time.sleep(60)\n";
  req.timeout_ms = 1500;
  ExecResult res = sandbox_exec(req);
  REQUIRE(res.status == ExecStatus::timeout);
  long pid = std::stol(res.stdout_data);
  // The whole process group was killed, so the grandchild must be gone
  // (or a zombie reparented to init, which kill() reports as ESRCH after
  // reaping; allow a moment for that).
  int alive = -1;
  for (int i = 0; i < 50; ++i) {
    alive = ::kill(static_cast<pid_t>(pid), 0);
    if (alive != 0) break;
    ::usleep(100000);
  }
  CHECK(alive != 0);
}

TEST_CASE("output beyond the cap is truncated") {
  ExecRequest req;
  req.program = "print('x' * 100000)\n";
  req.max_output_bytes = 1000;
  ExecResult res = sandbox_exec(req);
  CHECK(res.status == ExecStatus::output_truncated);
  CHECK(static_cast<std::int64_t>(res.stdout_data.size()) <= 1000);
}

TEST_CASE("status precedence: timeout beats truncation beats exit code") {
  ExecRequest req;
  req.program =
      "import sys, time\n"
      "sys.stdout.write('y' * 5000)\n"
      "sys.stdout.flush()\n"
      "time.sleep(60)\n";
  req.timeout_ms = 1500;
  req.max_output_bytes = 1000;
  ExecResult res = sandbox_exec(req);
  CHECK(res.status == ExecStatus::timeout);

  ExecRequest req2;
  req2.program =
      "import sys\n"
      "sys.stdout.write('y' * 5000)\n"
      "sys.exit(9)\n";
  req2.max_output_bytes = 1000;
  ExecResult res2 = sandbox_exec(req2);
  CHECK(res2.status == ExecStatus::output_truncated);
}

TEST_CASE("environment is scrubbed to the allowlist") {
  setenv("MASBENCH_SECRET_CANARY", "leaky", 1);
  ExecRequest req;
  req.program =
      "import os\n"
      "print('SECRET' if 'MASBENCH_SECRET_CANARY' in os.environ else 'CLEAN')\n"
      "print('PATH_OK' if os.environ.get('PATH') else 'PATH_MISSING')\n"
      "print(os.environ.get('PYTHONDONTWRITEBYTECODE', 'unset'))\n";
  ExecResult res = sandbox_exec(req);
  unsetenv("MASBENCH_SECRET_CANARY");
  REQUIRE(res.status == ExecStatus::ok);
  CHECK(res.stdout_data.find("CLEAN") != std::string::npos);
  CHECK(res.stdout_data.find("PATH_OK") != std::string::npos);
  CHECK(res.stdout_data.find("1") != std::string::npos);
}

TEST_CASE("child runs in a private scratch directory") {
  ExecRequest req;
  req.program =
      "import os\n"
      "print(os.getcwd())\n"
      "print(os.environ.get('HOME'))\n"
      "open('scratch.txt', 'w').write('data')\n";
  ExecResult res = sandbox_exec(req);
  REQUIRE(res.status == ExecStatus::ok);
  // cwd and HOME point at the same temp dir, away from the test's cwd.
  std::string cwd = res.stdout_data.substr(0, res.stdout_data.find('\n'));
  CHECK(cwd.find("masbench") != std::string::npos);
  CHECK(res.stdout_data.find(cwd + "\n" + cwd) != std::string::npos);

  // The directory is removed afterward, so a second run can't see the file.
  ExecRequest probe;
  probe.program =
      "import os\nprint('FOUND' if os.path.exists('scratch.txt') else 'GONE')\n";
  ExecResult res2 = sandbox_exec(probe);
  REQUIRE(res2.status == ExecStatus::ok);
  CHECK(res2.stdout_data == "GONE\n");
}

TEST_CASE("unknown interpreter is a spawn error") {
  ExecRequest req;
  req.program = "print('hi')\n";
  req.interpreter_cmd = {"/no/such/interpreter", "{file}"};
  ExecResult res = sandbox_exec(req);
  CHECK(res.status == ExecStatus::spawn_error);
  CHECK_FALSE(res.spawn_reason.empty());
}

TEST_CASE("extract_code_block returns the last fenced block") {
  CHECK(extract_code_block("no fences") == std::nullopt);
  CHECK(extract_code_block("```python\nprint(1)\n```") == "print(1)");
  CHECK(extract_code_block("```\nfirst\n```\ntext\n```py\nsecond\n```") ==
        "second");
  CHECK(extract_code_block("```python\nunclosed\n") == std::nullopt);
  // Inner newlines are preserved; only the final one is stripped.
  CHECK(extract_code_block("```\na\n\nb\n```") == "a\n\nb");
}

TEST_CASE("run_test_cases: assertion and stdio kinds") {
  std::vector<TestCase> cases;
  TestCase a;
  a.kind = TestCaseKind::assertion_block;
  a.code_or_input = "assert add(2, 3) == 5";
  cases.push_back(a);
  TestRun good = run_test_cases("def add(a, b):\n    return a + b\n", cases,
                                {"python3", "{file}"});
  CHECK(good.passed);

  TestRun bad = run_test_cases("def add(a, b):\n    return a * b\n", cases,
                               {"python3", "{file}"});
  CHECK_FALSE(bad.passed);
  CHECK(bad.failed_case == 0);

  std::vector<TestCase> stdio;
  TestCase s;
  s.kind = TestCaseKind::stdin_stdout;
  s.code_or_input = "5\n";
  s.expected_output = "25";
  stdio.push_back(s);
  TestRun sq = run_test_cases("print(int(input()) ** 2)\n", stdio,
                              {"python3", "{file}"});
  CHECK(sq.passed);
}
