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

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "masbench/runner.hpp"

using namespace masbench;
namespace fs = std::filesystem;

namespace {

const std::string kSmoke = MASBENCH_FIXTURES_DIR "/dataset_smoke.jsonl";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("masbench-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Rig {
  std::shared_ptr<MockBackend> backend;
  MethodContext ctx;
};

Rig make_rig() {
  Rig rig;
  rig.backend = std::make_shared<MockBackend>(MockScript{});
  rig.ctx.gateway = std::make_shared<Gateway>(rig.backend, 4);
  rig.ctx.prompts = std::make_shared<PromptStore>();
  rig.ctx.tools = std::make_shared<ToolRegistry>(
      default_tools({"python3", "{file}"}));
  rig.ctx.model.name = "mock-model";
  rig.ctx.model.base_url = "mock";
  return rig;
}

RunPlan smoke_plan(const std::string& out_path,
                   std::vector<std::string> method_names = {"vanilla", "cot"}) {
  RunPlan plan;
  for (auto& name : method_names) {
    MethodSpec m;
    m.name = std::move(name);
    plan.methods.push_back(std::move(m));
  }
  plan.dataset.path = kSmoke;
  plan.model.name = "mock-model";
  plan.model.base_url = "mock";
  plan.concurrency = 4;
  plan.out_path = out_path;
  return plan;
}

}  // namespace

TEST_CASE("load_dataset: unified format preserves file order") {
  DatasetSpec spec;
  spec.path = kSmoke;
  auto samples = load_dataset(spec);
  REQUIRE(samples.size() == 10);
  CHECK(samples.front().id == "smoke-001");
  CHECK(samples.back().id == "smoke-010");
  auto mcq = std::find_if(samples.begin(), samples.end(),
                          [](const Sample& s) { return s.id == "smoke-007"; });
  REQUIRE(mcq != samples.end());
  CHECK(mcq->domain == Domain::mcq);
  REQUIRE(mcq->choices.has_value());
  CHECK(mcq->choices->size() == 4);
}

TEST_CASE("load_dataset: limit cuts after the optional shuffle") {
  DatasetSpec spec;
  spec.path = kSmoke;
  spec.limit = 3;
  auto head = load_dataset(spec);
  REQUIRE(head.size() == 3);
  CHECK(head[0].id == "smoke-001");
  CHECK(head[2].id == "smoke-003");

  DatasetSpec shuffled;
  shuffled.path = kSmoke;
  shuffled.shuffle_seed = 7;
  auto full = load_dataset(shuffled);
  shuffled.limit = 4;
  auto cut = load_dataset(shuffled);
  REQUIRE(cut.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(cut[i].id == full[i].id);

  DatasetSpec bad;
  bad.path = kSmoke;
  bad.limit = 0;
  CHECK_THROWS_AS(load_dataset(bad), ValidationError);
}

TEST_CASE("load_dataset: seeded shuffle is a deterministic permutation") {
  DatasetSpec a, b, c;
  a.path = b.path = c.path = kSmoke;
  a.shuffle_seed = b.shuffle_seed = 42;
  c.shuffle_seed = 43;
  auto sa = load_dataset(a);
  auto sb = load_dataset(b);
  auto sc = load_dataset(c);
  CHECK(sa == sb);
  CHECK(sa != sc);  // 10! orderings; a seed collision would be remarkable

  std::set<std::string> ids_a, ids_c;
  for (const auto& s : sa) ids_a.insert(s.id);
  for (const auto& s : sc) ids_c.insert(s.id);
  CHECK(ids_a == ids_c);
  CHECK(ids_a.size() == 10);
}

TEST_CASE("load_dataset: mcq adapter maps question/options/answer") {
  TempDir dir;
  std::string path = dir.file("mcq.jsonl");
  write_file(path,
             R"({"id": "q1", "question": "Pick one.", "options": ["x", "y"], "answer": "A"})"
             "\n"
             R"({"question": "Another.", "choices": ["p", "q"], "gold_answer": "B"})"
             "\n");
  DatasetSpec spec;
  spec.path = path;
  spec.format = DatasetFormat::mcq_jsonl;
  auto samples = load_dataset(spec);
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].id == "q1");
  CHECK(samples[0].domain == Domain::mcq);
  CHECK(samples[0].query == "Pick one.");
  CHECK(samples[0].choices == std::vector<std::string>{"x", "y"});
  CHECK(samples[0].gold_answer == "A");
  CHECK(samples[1].id == "mcq-2");  // synthesized from the line number
  CHECK(samples[1].gold_answer == "B");
}

TEST_CASE("load_dataset: coding adapter maps task_id/prompt/test_list") {
  TempDir dir;
  std::string path = dir.file("coding.jsonl");
  write_file(
      path,
      R"({"task_id": "t1", "prompt": "Write f.", "test_list": ["assert f() == 1", "assert f() != 2"]})"
      "\n"
      R"({"id": "t2", "query": "Write g.", "test": "assert g() == 0"})"
      "\n");
  DatasetSpec spec;
  spec.path = path;
  spec.format = DatasetFormat::coding_jsonl;
  auto samples = load_dataset(spec);
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].id == "t1");
  CHECK(samples[0].domain == Domain::coding);
  REQUIRE(samples[0].test_cases.has_value());
  REQUIRE(samples[0].test_cases->size() == 2);
  CHECK((*samples[0].test_cases)[0].kind == TestCaseKind::assertion_block);
  CHECK((*samples[0].test_cases)[0].code_or_input == "assert f() == 1");
  CHECK(samples[1].id == "t2");
  REQUIRE(samples[1].test_cases.has_value());
  CHECK(samples[1].test_cases->size() == 1);
}

TEST_CASE("load_dataset: duplicate ids are rejected by name") {
  TempDir dir;
  std::string path = dir.file("dup.jsonl");
  write_file(path,
             R"({"id": "same", "domain": "math", "query": "a", "gold_answer": "1"})"
             "\n"
             R"({"id": "same", "domain": "math", "query": "b", "gold_answer": "2"})"
             "\n");
  DatasetSpec spec;
  spec.path = path;
  try {
    load_dataset(spec);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("'same'") != std::string::npos);
  }
}

TEST_CASE("load_dataset: invalid samples and malformed lines name the line") {
  TempDir dir;
  std::string bad_sample = dir.file("bad.jsonl");
  write_file(bad_sample,
             R"({"id": "ok", "domain": "math", "query": "q", "gold_answer": "1"})"
             "\n"
             R"({"id": "empty-query", "domain": "math", "query": "", "gold_answer": "1"})"
             "\n");
  DatasetSpec spec;
  spec.path = bad_sample;
  try {
    load_dataset(spec);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  std::string malformed = dir.file("malformed.jsonl");
  write_file(malformed,
             R"({"id": "ok", "domain": "math", "query": "q", "gold_answer": "1"})"
             "\n{not json\n");
  spec.path = malformed;
  try {
    load_dataset(spec);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("run_plan executes the full method x sample grid") {
  TempDir dir;
  Rig rig = make_rig();
  DatasetSpec ds;
  ds.path = kSmoke;
  auto samples = load_dataset(ds);
  RunPlan plan = smoke_plan(dir.file("out.jsonl"));

  RunSummary summary = run_plan(plan, rig.ctx, samples);
  CHECK(summary.total_cells == 20);
  CHECK(summary.executed == 20);
  CHECK(summary.skipped == 0);
  CHECK(summary.errors == 0);
  CHECK(rig.backend->call_count() == 20);  // 1 call per vanilla/cot cell

  auto records = read_run_file(plan.out_path);
  REQUIRE(records.size() == 20);
  std::set<std::string> keys;
  for (const auto& r : records) {
    keys.insert(r.resume_key());
    CHECK(r.model == "mock-model");
    CHECK(r.output.response == "Answer: 42");
    CHECK(r.verdicts.empty());
  }
  CHECK(keys.size() == 20);
  // Sorted by (method, sample_id).
  for (size_t i = 1; i < records.size(); ++i) {
    auto key = [](const RunRecord& r) {
      return std::make_pair(r.method, r.sample_id);
    };
    CHECK(key(records[i - 1]) <= key(records[i]));
  }
}

TEST_CASE("run_plan bounds in-flight calls by the gateway limit") {
  TempDir dir;
  Rig rig = make_rig();
  rig.backend->set_delay_ms(10);
  rig.ctx.gateway = std::make_shared<Gateway>(rig.backend, 3);
  DatasetSpec ds;
  ds.path = kSmoke;
  auto samples = load_dataset(ds);
  RunPlan plan = smoke_plan(dir.file("out.jsonl"), {"vanilla"});
  plan.concurrency = 8;
  run_plan(plan, rig.ctx, samples);
  CHECK(rig.backend->max_in_flight() <= 3);
  CHECK(rig.backend->max_in_flight() >= 2);
}

TEST_CASE("per-cell exceptions become error records, not crashes") {
  TempDir dir;
  Rig rig = make_rig();
  DatasetSpec ds;
  ds.path = kSmoke;
  ds.limit = 3;
  auto samples = load_dataset(ds);
  // reflexion rejects non-coding samples with std::invalid_argument.
  RunPlan plan = smoke_plan(dir.file("out.jsonl"), {"vanilla", "reflexion"});

  RunSummary summary = run_plan(plan, rig.ctx, samples);
  CHECK(summary.total_cells == 6);
  CHECK(summary.executed == 6);
  CHECK(summary.errors == 3);

  auto records = read_run_file(plan.out_path);
  REQUIRE(records.size() == 6);
  for (const auto& r : records) {
    if (r.method == "reflexion") {
      CHECK(r.output.terminated_by == TerminatedBy::error);
      CHECK_FALSE(r.output.error_reason.empty());
    } else {
      CHECK(r.output.terminated_by == TerminatedBy::completed);
    }
  }
}

TEST_CASE("run_plan validates inputs up front") {
  Rig rig = make_rig();
  DatasetSpec ds;
  ds.path = kSmoke;
  ds.limit = 1;
  auto samples = load_dataset(ds);

  RunPlan bad_dir = smoke_plan("/no/such/dir/out.jsonl", {"vanilla"});
  CHECK_THROWS(run_plan(bad_dir, rig.ctx, samples));

  TempDir dir;
  RunPlan bad_conc = smoke_plan(dir.file("out.jsonl"), {"vanilla"});
  bad_conc.concurrency = 0;
  CHECK_THROWS_AS(run_plan(bad_conc, rig.ctx, samples), ValidationError);

  RunPlan bad_method = smoke_plan(dir.file("out.jsonl"), {"nonsense"});
  CHECK_THROWS_AS(run_plan(bad_method, rig.ctx, samples), ValidationError);
}

TEST_CASE("resume skips completed cells and finishes the grid") {
  TempDir dir;
  std::string out = dir.file("out.jsonl");
  DatasetSpec ds;
  ds.path = kSmoke;
  auto samples = load_dataset(ds);

  // Full reference run.
  {
    Rig rig = make_rig();
    run_plan(smoke_plan(out), rig.ctx, samples);
  }
  std::string full = read_file(out);
  auto full_records = read_run_file(out);
  REQUIRE(full_records.size() == 20);

  // Simulate kills at several points: after k complete lines, plus a
  // partial trailing line.
  for (int k : {0, 1, 7, 19, 20}) {
    std::string truncated;
    size_t pos = 0;
    for (int i = 0; i < k; ++i) pos = full.find('\n', pos) + 1;
    truncated = full.substr(0, pos);
    if (k < 20) {
      // Half of the next record, as an interrupted write would leave it.
      size_t next_eol = full.find('\n', pos);
      truncated += full.substr(pos, (next_eol - pos) / 2);
    }
    write_file(out, truncated);

    Rig rig = make_rig();
    RunSummary summary = resume_plan(smoke_plan(out), rig.ctx, samples);
    INFO("kill point after ", k, " records");
    CHECK(summary.total_cells == 20);
    CHECK(summary.skipped == k);
    CHECK(summary.executed == 20 - k);
    CHECK(rig.backend->call_count() == 20 - k);

    auto records = read_run_file(out);
    REQUIRE(records.size() == 20);
    std::set<std::string> keys;
    for (const auto& r : records) keys.insert(r.resume_key());
    CHECK(keys.size() == 20);
  }
}

TEST_CASE("resume on a missing file behaves like a fresh run") {
  TempDir dir;
  Rig rig = make_rig();
  DatasetSpec ds;
  ds.path = kSmoke;
  ds.limit = 2;
  auto samples = load_dataset(ds);
  RunPlan plan = smoke_plan(dir.file("fresh.jsonl"), {"vanilla"});
  RunSummary summary = resume_plan(plan, rig.ctx, samples);
  CHECK(summary.executed == 2);
  CHECK(summary.skipped == 0);
  CHECK(read_run_file(plan.out_path).size() == 2);
}

TEST_CASE("resume key distinguishes params and model, not output") {
  TempDir dir;
  std::string out = dir.file("out.jsonl");
  DatasetSpec ds;
  ds.path = kSmoke;
  ds.limit = 4;
  auto samples = load_dataset(ds);
  {
    Rig rig = make_rig();
    run_plan(smoke_plan(out, {"vanilla"}), rig.ctx, samples);
  }
  // Same grid with different params: nothing is skipped.
  Rig rig = make_rig();
  RunPlan plan = smoke_plan(out, {});
  MethodSpec m;
  m.name = "self_consistency";
  m.params["n"] = 2;
  plan.methods.push_back(m);
  RunSummary summary = resume_plan(plan, rig.ctx, samples);
  CHECK(summary.skipped == 0);
  CHECK(summary.executed == 4);
  // The file now holds both grids.
  CHECK(read_run_file(out).size() == 8);
}
