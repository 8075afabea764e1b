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

#include "masbench/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace masbench {

namespace fs = std::filesystem;

std::string to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::ok: return "ok";
    case ExecStatus::nonzero_exit: return "nonzero_exit";
    case ExecStatus::timeout: return "timeout";
    case ExecStatus::output_truncated: return "output_truncated";
    case ExecStatus::spawn_error: return "spawn_error";
  }
  return "spawn_error";
}

namespace {

ExecResult spawn_failure(const std::string& reason) {
  ExecResult r;
  r.status = ExecStatus::spawn_error;
  r.spawn_reason = reason;
  return r;
}

void ignore_sigpipe_once() {
  static bool done = [] {
    struct sigaction sa {};
    sa.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &sa, nullptr);
    return true;
  }();
  (void)done;
}

// Environment allowlist; everything else (credentials, proxies, canaries)
// is absent in the child.
std::vector<std::string> scrubbed_env(const std::string& tmpdir) {
  std::vector<std::string> env;
  for (const char* keep : {"PATH", "LANG", "LC_ALL"}) {
    if (const char* v = std::getenv(keep)) {
      env.push_back(std::string(keep) + "=" + v);
    }
  }
  env.push_back("HOME=" + tmpdir);
  env.push_back("TMPDIR=" + tmpdir);
  env.push_back("PYTHONDONTWRITEBYTECODE=1");
  return env;
}

}  // namespace

ExecResult sandbox_exec(const ExecRequest& req) {
  if (req.interpreter_cmd.empty()) {
    return spawn_failure("interpreter_cmd is empty");
  }
  if (req.timeout_ms < 100) return spawn_failure("timeout_ms below minimum 100");
  ignore_sigpipe_once();

  char tmpl[] = "/tmp/masbench-sbx-XXXXXX";
  char* dir = mkdtemp(tmpl);
  if (!dir) return spawn_failure(std::string("mkdtemp: ") + std::strerror(errno));
  std::string tmpdir = dir;
  struct Cleanup {
    std::string d;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(d, ec);
    }
  } cleanup{tmpdir};

  std::string prog_path = tmpdir + "/program.py";
  {
    std::ofstream f(prog_path, std::ios::binary);
    if (!f) return spawn_failure("cannot write program file");
    f << req.program;
  }

  std::vector<std::string> argv_s;
  for (const auto& a : req.interpreter_cmd) {
    std::string arg = a;
    auto pos = arg.find("{file}");
    if (pos != std::string::npos) arg.replace(pos, 6, prog_path);
    argv_s.push_back(arg);
  }

  int in_pipe[2], out_pipe[2], err_pipe[2], exec_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe) || pipe(exec_pipe)) {
    return spawn_failure(std::string("pipe: ") + std::strerror(errno));
  }
  fcntl(exec_pipe[1], F_SETFD, FD_CLOEXEC);

  auto env = scrubbed_env(tmpdir);
  std::vector<char*> argv, envp;
  for (auto& s : argv_s) argv.push_back(s.data());
  argv.push_back(nullptr);
  for (auto& s : env) envp.push_back(s.data());
  envp.push_back(nullptr);

  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                   err_pipe[0], err_pipe[1], exec_pipe[0], exec_pipe[1]}) {
      close(fd);
    }
    return spawn_failure(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);  // own process group, so the whole tree can be killed
    if (chdir(tmpdir.c_str()) != 0) _exit(127);
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    dup2(err_pipe[1], 2);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1],
                   err_pipe[0], err_pipe[1], exec_pipe[0]}) {
      close(fd);
    }
    execvpe(argv[0], argv.data(), envp.data());
    // Report the exec errno through the CLOEXEC pipe; reached only on failure.
    int err = errno;
    ssize_t ignored = write(exec_pipe[1], &err, sizeof err);
    (void)ignored;
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  close(exec_pipe[1]);

  int exec_errno = 0;
  if (read(exec_pipe[0], &exec_errno, sizeof exec_errno) ==
      sizeof exec_errno) {
    close(exec_pipe[0]);
    for (int fd : {in_pipe[1], out_pipe[0], err_pipe[0]}) close(fd);
    waitpid(pid, nullptr, 0);
    return spawn_failure(std::string("exec ") + argv_s[0] + ": " +
                         std::strerror(exec_errno));
  }
  close(exec_pipe[0]);

  if (req.stdin_data) {
    const std::string& data = *req.stdin_data;
    size_t off = 0;
    while (off < data.size()) {
      ssize_t n = write(in_pipe[1], data.data() + off, data.size() - off);
      if (n <= 0) break;
      off += static_cast<size_t>(n);
    }
  }
  close(in_pipe[1]);

  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  ExecResult result;
  std::string& sout = result.stdout_data;
  std::string& serr = result.stderr_data;
  bool truncated = false;
  bool timed_out = false;
  auto deadline = start + std::chrono::milliseconds(req.timeout_ms);

  bool out_open = true, err_open = true;
  char buf[8192];
  while (out_open || err_open) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      kill(-pid, SIGKILL);
      break;
    }
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count());
    wait_ms = std::max(1, std::min(wait_ms, 100));

    struct pollfd fds[2];
    int nfds = 0;
    int out_idx = -1, err_idx = -1;
    if (out_open) {
      out_idx = nfds;
      fds[nfds++] = {out_pipe[0], POLLIN, 0};
    }
    if (err_open) {
      err_idx = nfds;
      fds[nfds++] = {err_pipe[0], POLLIN, 0};
    }
    int pr = poll(fds, nfds, wait_ms);
    if (pr < 0 && errno != EINTR) break;
    auto drain = [&](int fd, std::string& dst, bool& open_flag) {
      while (true) {
        ssize_t n = read(fd, buf, sizeof buf);
        if (n > 0) {
          std::int64_t room =
              req.max_output_bytes - static_cast<std::int64_t>(dst.size());
          if (room > 0) {
            dst.append(buf, static_cast<size_t>(std::min<std::int64_t>(n, room)));
          }
          if (n > room) truncated = true;
          continue;
        }
        if (n == 0) {
          open_flag = false;
        }
        break;  // EOF or EAGAIN
      }
    };
    if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
      drain(out_pipe[0], sout, out_open);
    }
    if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP))) {
      drain(err_pipe[0], serr, err_open);
    }
  }
  close(out_pipe[0]);
  close(err_pipe[0]);

  int wstatus = 0;
  if (timed_out) {
    // The group is already killed; reap without blocking forever.
    waitpid(pid, &wstatus, 0);
  } else {
    waitpid(pid, &wstatus, 0);
  }
  // Sweep any surviving descendants of the group.
  kill(-pid, SIGKILL);

  auto end = std::chrono::steady_clock::now();
  result.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();

  if (timed_out) {
    result.status = ExecStatus::timeout;
    if (result.elapsed_ms < req.timeout_ms) result.elapsed_ms = req.timeout_ms;
  } else if (truncated) {
    result.status = ExecStatus::output_truncated;
  } else if (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 0) {
    result.status = ExecStatus::ok;
    result.exit_code = 0;
  } else {
    result.status = ExecStatus::nonzero_exit;
    if (WIFEXITED(wstatus)) result.exit_code = WEXITSTATUS(wstatus);
  }
  return result;
}

namespace {

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

TestRun run_test_cases(const std::string& program,
                       const std::vector<TestCase>& cases,
                       const std::vector<std::string>& interpreter_cmd,
                       int timeout_ms) {
  TestRun run;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const TestCase& tc = cases[i];
    ExecRequest req;
    req.interpreter_cmd = interpreter_cmd;
    req.timeout_ms = timeout_ms;
    if (tc.kind == TestCaseKind::assertion_block) {
      req.program = program + "\n\n" + tc.code_or_input + "\n";
    } else {
      req.program = program;
      req.stdin_data = tc.code_or_input;
    }
    ExecResult res = sandbox_exec(req);
    if (res.status == ExecStatus::timeout) {
      run.timed_out = true;
      run.failed_case = static_cast<int>(i);
      run.failure_text = "test case " + std::to_string(i) + " timed out";
      return run;
    }
    bool case_ok = false;
    if (tc.kind == TestCaseKind::assertion_block) {
      case_ok = res.status == ExecStatus::ok;
    } else {
      case_ok = res.status == ExecStatus::ok && tc.expected_output &&
                trim_copy(res.stdout_data) == trim_copy(*tc.expected_output);
    }
    if (!case_ok) {
      run.failed_case = static_cast<int>(i);
      std::ostringstream os;
      os << "test case " << i << " failed";
      if (!res.stderr_data.empty()) {
        os << "\nstderr:\n" << res.stderr_data.substr(0, 2000);
      }
      if (tc.kind == TestCaseKind::stdin_stdout) {
        os << "\nexpected:\n" << (tc.expected_output ? *tc.expected_output : "")
           << "\ngot:\n" << res.stdout_data.substr(0, 2000);
      }
      run.failure_text = os.str();
      return run;
    }
  }
  run.passed = true;
  return run;
}

std::optional<std::string> extract_code_block(const std::string& response) {
  // Last fenced block wins: refinement methods append corrected code after
  // discussion.
  std::optional<std::string> found;
  size_t pos = 0;
  while (true) {
    size_t open = response.find("```", pos);
    if (open == std::string::npos) break;
    size_t body_start = response.find('\n', open);
    if (body_start == std::string::npos) break;
    ++body_start;
    size_t close = response.find("```", body_start);
    if (close == std::string::npos) break;
    std::string body = response.substr(body_start, close - body_start);
    // Drop at most one trailing newline before the closing fence.
    if (!body.empty() && body.back() == '\n') body.pop_back();
    found = body;
    pos = close + 3;
  }
  return found;
}

}  // namespace masbench
