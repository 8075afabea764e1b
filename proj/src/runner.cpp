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

#include "masbench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <thread>

namespace masbench {

namespace fs = std::filesystem;

DatasetFormat dataset_format_from_string(const std::string& s) {
  if (s == "unified_jsonl") return DatasetFormat::unified_jsonl;
  if (s == "mcq_jsonl") return DatasetFormat::mcq_jsonl;
  if (s == "coding_jsonl") return DatasetFormat::coding_jsonl;
  throw ParseError("unknown dataset format: '" + s + "'");
}

namespace {

// Adapters mapping source schemas onto the unified Sample schema. The
// mappings are versioned here, not claimed equivalent to any upstream
// preprocessing.
Sample adapt_line(const Json& j, DatasetFormat format, int lineno) {
  switch (format) {
    case DatasetFormat::unified_jsonl:
      return j.get<Sample>();
    case DatasetFormat::mcq_jsonl: {
      Sample s;
      s.domain = Domain::mcq;
      s.id = j.contains("id") ? j.at("id").get<std::string>()
                              : "mcq-" + std::to_string(lineno);
      s.query = j.contains("question") ? j.at("question").get<std::string>()
                                       : j.at("query").get<std::string>();
      const auto& ch = j.contains("choices") ? j.at("choices") : j.at("options");
      s.choices = ch.get<std::vector<std::string>>();
      if (j.contains("answer")) s.gold_answer = j.at("answer").get<std::string>();
      if (j.contains("gold_answer")) {
        s.gold_answer = j.at("gold_answer").get<std::string>();
      }
      return s;
    }
    case DatasetFormat::coding_jsonl: {
      Sample s;
      s.domain = Domain::coding;
      s.id = j.contains("task_id") ? j.at("task_id").get<std::string>()
             : j.contains("id")    ? j.at("id").get<std::string>()
                                   : "coding-" + std::to_string(lineno);
      s.query = j.contains("prompt") ? j.at("prompt").get<std::string>()
                                     : j.at("query").get<std::string>();
      std::vector<TestCase> cases;
      if (j.contains("test_cases")) {
        cases = j.at("test_cases").get<std::vector<TestCase>>();
      } else if (j.contains("test_list")) {
        for (const auto& t : j.at("test_list")) {
          TestCase tc;
          tc.kind = TestCaseKind::assertion_block;
          tc.code_or_input = t.get<std::string>();
          cases.push_back(std::move(tc));
        }
      } else if (j.contains("test")) {
        TestCase tc;
        tc.kind = TestCaseKind::assertion_block;
        tc.code_or_input = j.at("test").get<std::string>();
        cases.push_back(std::move(tc));
      }
      s.test_cases = std::move(cases);
      return s;
    }
  }
  throw ParseError("unhandled dataset format");
}

}  // namespace

std::vector<Sample> load_dataset(const DatasetSpec& spec) {
  if (spec.limit && *spec.limit < 1) {
    throw ValidationError("dataset limit must be >= 1");
  }
  std::ifstream in(spec.path);
  if (!in) throw std::runtime_error("cannot open dataset: " + spec.path);
  std::vector<Sample> samples;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Sample s;
    try {
      Json j = Json::parse(line);
      s = adapt_line(j, spec.format, lineno);
    } catch (const Json::exception& e) {
      throw ParseError(spec.path + ": line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    auto violations = validate_sample(s);
    if (!violations.empty()) {
      std::string msg = spec.path + ": line " + std::to_string(lineno) +
                        ": invalid sample '" + s.id + "':";
      for (const auto& v : violations) msg += " " + v + ";";
      throw ValidationError(msg);
    }
    if (!seen.insert(s.id).second) {
      throw ValidationError(spec.path + ": duplicate sample id '" + s.id + "'");
    }
    samples.push_back(std::move(s));
  }
  if (spec.shuffle_seed) {
    std::mt19937_64 rng(*spec.shuffle_seed);
    std::shuffle(samples.begin(), samples.end(), rng);
  }
  if (spec.limit && samples.size() > static_cast<size_t>(*spec.limit)) {
    samples.resize(static_cast<size_t>(*spec.limit));
  }
  return samples;
}

// ---------------------------------------------------------------------------

namespace {

struct Cell {
  const MethodSpec* method;
  const Sample* sample;
};

RunRecord make_record(const MethodSpec& spec, const Sample& sample,
                      const ModelConfig& model, MASOutput output) {
  RunRecord rec;
  rec.sample_id = sample.id;
  rec.method = spec.name;
  rec.method_params = spec.params;
  rec.model = model.name;
  rec.output = std::move(output);
  return rec;
}

RunSummary execute(const RunPlan& plan, const MethodContext& base_ctx,
                   const std::vector<Sample>& samples,
                   const std::set<std::string>& done_keys,
                   std::vector<RunRecord> existing) {
  if (plan.concurrency < 1) {
    throw ValidationError("concurrency must be >= 1");
  }
  fs::path out(plan.out_path);
  if (out.has_parent_path() && !fs::exists(out.parent_path())) {
    throw std::runtime_error("output directory does not exist: " +
                             out.parent_path().string());
  }
  for (const auto& m : plan.methods) {
    MethodRegistry::instance().validate_spec(m);
  }

  std::vector<Cell> cells;
  RunSummary summary;
  for (const auto& m : plan.methods) {
    for (const auto& s : samples) {
      ++summary.total_cells;
      RunRecord probe = make_record(m, s, plan.model, {});
      if (done_keys.count(probe.resume_key())) {
        ++summary.skipped;
        continue;
      }
      cells.push_back(Cell{&m, &s});
    }
  }

  // Keep existing records (resume) and append new ones through one writer.
  std::ofstream appender(plan.out_path,
                         existing.empty() ? std::ios::trunc : std::ios::app);
  if (!appender) {
    throw std::runtime_error("cannot write run file: " + plan.out_path);
  }
  std::mutex write_mu;
  std::vector<RunRecord> produced;
  std::atomic<size_t> next{0};
  std::atomic<int> errors{0};

  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      const Cell& cell = cells[i];
      MASOutput output;
      try {
        auto method =
            MethodRegistry::instance().create(*cell.method, base_ctx);
        output = method->inference(*cell.sample);
      } catch (const std::exception& e) {
        output = MASOutput{};
        output.terminated_by = TerminatedBy::error;
        output.error_reason = e.what();
      }
      if (output.terminated_by == TerminatedBy::error) errors.fetch_add(1);
      RunRecord rec = make_record(*cell.method, *cell.sample, plan.model,
                                  std::move(output));
      std::lock_guard lock(write_mu);
      appender << serialize_record(rec) << "\n";
      appender.flush();  // durable checkpoint per cell
      produced.push_back(std::move(rec));
    }
  };

  int workers = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(plan.concurrency),
      std::max<std::size_t>(cells.size(), 1)));
  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  appender.close();

  summary.executed = static_cast<int>(produced.size());
  summary.errors = errors.load();

  // Re-sort for diff-friendliness.
  std::vector<RunRecord> all = std::move(existing);
  for (auto& r : produced) all.push_back(std::move(r));
  std::sort(all.begin(), all.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.method != b.method) return a.method < b.method;
    if (a.sample_id != b.sample_id) return a.sample_id < b.sample_id;
    return a.resume_key() < b.resume_key();
  });
  write_run_file(plan.out_path, all);

  std::cerr << "run: " << summary.total_cells << " cells, "
            << summary.executed << " executed, " << summary.skipped
            << " skipped, " << summary.errors << " errors\n";
  return summary;
}

}  // namespace

RunSummary run_plan(const RunPlan& plan, const MethodContext& base_ctx,
                    const std::vector<Sample>& samples) {
  return execute(plan, base_ctx, samples, {}, {});
}

RunSummary resume_plan(const RunPlan& plan, const MethodContext& base_ctx,
                       const std::vector<Sample>& samples) {
  std::vector<RunRecord> existing;
  if (fs::exists(plan.out_path)) {
    existing = read_run_file(plan.out_path);
  }
  std::set<std::string> keys;
  for (const auto& r : existing) keys.insert(r.resume_key());
  // Rewrite first so a discarded partial trailing line is gone before
  // appending resumes.
  write_run_file(plan.out_path, existing);
  return execute(plan, base_ctx, samples, keys, std::move(existing));
}

}  // namespace masbench
