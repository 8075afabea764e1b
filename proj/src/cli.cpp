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

#include "masbench/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <set>

#include <CLI11.hpp>

#include "masbench/config.hpp"
#include "masbench/eval.hpp"
#include "masbench/gateway.hpp"
#include "masbench/methods.hpp"
#include "masbench/report.hpp"
#include "masbench/runner.hpp"

namespace masbench {

namespace {

std::shared_ptr<Gateway> make_gateway(const ModelConfig& mc, int concurrency) {
  std::shared_ptr<Backend> backend;
  if (mc.base_url == "mock") {
    backend = std::make_shared<MockBackend>(MockScript{});
  } else {
    backend = std::make_shared<HttpBackend>();
  }
  return std::make_shared<Gateway>(backend, concurrency);
}

MethodContext make_context(const Config& cfg,
                           const std::shared_ptr<Gateway>& gateway,
                           bool trace_full) {
  MethodContext ctx;
  ctx.gateway = gateway;
  ctx.prompts = std::make_shared<PromptStore>();
  ctx.model = cfg.model();
  ctx.trace_full = trace_full;
  ctx.interpreter_cmd = cfg.interpreter_cmd();
  ctx.tools = std::make_shared<ToolRegistry>(
      default_tools(ctx.interpreter_cmd, cfg.search_fixture_path()));
  return ctx;
}

int cmd_run(const Config& cfg, const std::vector<std::string>& methods,
            const std::string& dataset_path, const std::string& format,
            const std::string& out, int concurrency, int limit,
            std::int64_t seed, bool has_seed, bool trace_full, bool resume) {
  DatasetSpec ds;
  ds.path = dataset_path;
  ds.format = dataset_format_from_string(format);
  if (limit > 0) ds.limit = limit;
  if (has_seed) ds.shuffle_seed = static_cast<std::uint64_t>(seed);
  auto samples = load_dataset(ds);

  RunPlan plan;
  for (const auto& name : methods) {
    MethodSpec spec;
    spec.name = name;
    spec.params = cfg.method_params(name);
    plan.methods.push_back(std::move(spec));
  }
  plan.dataset = ds;
  plan.model = cfg.model();
  plan.concurrency = concurrency;
  plan.out_path = out;

  auto gateway = make_gateway(plan.model, concurrency);
  MethodContext ctx = make_context(cfg, gateway, trace_full);
  RunSummary s = resume ? resume_plan(plan, ctx, samples)
                        : run_plan(plan, ctx, samples);
  std::cout << "cells=" << s.total_cells << " executed=" << s.executed
            << " skipped=" << s.skipped << " errors=" << s.errors << "\n";
  return 0;
}

int cmd_eval(const Config& cfg, const std::string& dataset_path,
             const std::string& format, const std::string& out,
             const std::vector<std::string>& protocols, int concurrency) {
  DatasetSpec ds;
  ds.path = dataset_path;
  ds.format = dataset_format_from_string(format);
  auto samples = load_dataset(ds);
  std::map<std::string, const Sample*> by_id;
  for (const auto& s : samples) by_id[s.id] = &s;

  auto records = read_run_file(out);
  PromptStore prompts;
  ModelConfig mc = cfg.model();
  std::shared_ptr<Gateway> gateway;  // created lazily for LLM protocols
  auto interpreter = cfg.interpreter_cmd();

  for (auto& rec : records) {
    auto it = by_id.find(rec.sample_id);
    if (it == by_id.end()) {
      std::cerr << "warning: sample '" << rec.sample_id
                << "' not in dataset; skipping\n";
      continue;
    }
    const Sample& sample = *it->second;
    for (const auto& proto : protocols) {
      try {
        EvalVerdict v;
        if (proto == "rule_boxed") {
          v = eval_rule_boxed(sample, rec.output.response);
        } else if (proto == "rule_lastnum") {
          v = eval_rule_lastnum(sample, rec.output.response);
        } else if (proto == "rule_tag") {
          v = eval_rule_tag(sample, rec.output.response);
        } else if (proto == "coding") {
          v = eval_coding(sample, rec.output.response, interpreter);
        } else if (proto == "llm_two_step") {
          if (!gateway) gateway = make_gateway(mc, concurrency);
          v = eval_llm_two_step(sample, rec.output.response, *gateway, prompts,
                                mc);
        } else if (proto == "judge_endpoint") {
          ModelConfig judge = mc;
          if (cfg.has("judge.base_url")) judge.base_url = cfg.get("judge.base_url");
          if (cfg.has("judge.name")) judge.name = cfg.get("judge.name");
          if (cfg.has("judge.api_key_env")) {
            judge.api_key_env = cfg.get("judge.api_key_env");
          }
          if (!gateway) gateway = make_gateway(judge, concurrency);
          v = eval_judge_endpoint(sample, rec.output.response, *gateway,
                                  prompts, judge);
        } else {
          std::cerr << "error: unknown protocol '" << proto << "'\n";
          return 1;
        }
        rec.verdicts[v.protocol] = std::move(v);
      } catch (const ValidationError& e) {
        std::cerr << "warning: " << rec.sample_id << "/" << proto << ": "
                  << e.what() << "\n";
      }
    }
  }
  write_run_file(out, records);
  std::cout << "evaluated " << records.size() << " records under "
            << protocols.size() << " protocol(s)\n";
  return 0;
}

int cmd_report(const std::string& out, const std::string& format) {
  auto records = read_run_file(out);
  auto metrics = aggregate(records);
  RenderFormat rf =
      format == "csv" ? RenderFormat::csv : RenderFormat::markdown;
  std::cout << render_metrics(metrics, rf);
  return 0;
}

int cmd_compare(const std::string& out, const std::string& format) {
  auto records = read_run_file(out);
  std::set<std::string> seen;
  for (const auto& r : records) {
    for (const auto& [p, v] : r.verdicts) seen.insert(p);
  }
  std::vector<std::string> protocols(seen.begin(), seen.end());
  if (protocols.size() < 2) {
    std::cerr << "error: need verdicts under at least two protocols; found "
              << protocols.size() << "\n";
    return 1;
  }
  auto report = agreement(records, protocols);
  RenderFormat rf =
      format == "csv" ? RenderFormat::csv : RenderFormat::markdown;
  std::cout << render_agreement(report, rf);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"multi-agent method benchmarking harness"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "config file path")
      ->envname("MASBENCH_CONFIG");

  // run
  auto* run = app.add_subcommand("run", "execute a method x dataset grid");
  std::vector<std::string> methods;
  std::string dataset, out, dataset_format = "unified_jsonl";
  int concurrency = 4, limit = 0;
  std::int64_t seed = 0;
  bool trace_full = false, resume = false;
  run->add_option("--method", methods, "method name (repeatable)")->required();
  run->add_option("--dataset", dataset, "dataset JSONL path")->required();
  run->add_option("--dataset-format", dataset_format,
                  "unified_jsonl|mcq_jsonl|coding_jsonl");
  run->add_option("--out", out, "run-record output path")->required();
  run->add_option("--concurrency", concurrency, "max in-flight cells");
  run->add_option("--limit", limit, "sample limit");
  auto* seed_opt = run->add_option("--seed", seed, "shuffle seed");
  run->add_flag("--trace-full", trace_full, "store full prompts in traces");
  run->add_flag("--resume", resume, "skip cells already in the run file");

  // eval
  auto* eval = app.add_subcommand("eval", "apply evaluation protocols");
  std::vector<std::string> protocols;
  std::string eval_dataset, eval_out, eval_format = "unified_jsonl";
  int eval_concurrency = 4;
  eval->add_option("--protocol", protocols, "protocol name (repeatable)")
      ->required();
  eval->add_option("--dataset", eval_dataset, "dataset JSONL path")->required();
  eval->add_option("--dataset-format", eval_format,
                   "unified_jsonl|mcq_jsonl|coding_jsonl");
  eval->add_option("--out", eval_out, "run file to evaluate in place")
      ->required();
  eval->add_option("--concurrency", eval_concurrency, "LLM judge concurrency");

  // report
  auto* report = app.add_subcommand("report", "aggregate a run file");
  std::string report_out, report_format = "markdown";
  report->add_option("--out", report_out, "run file path")->required();
  report->add_option("--format", report_format, "markdown|csv");

  // compare-protocols
  auto* compare =
      app.add_subcommand("compare-protocols", "protocol agreement report");
  std::string compare_out, compare_format = "markdown";
  compare->add_option("--out", compare_out, "run file path")->required();
  compare->add_option("--format", compare_format, "markdown|csv");

  // list-methods
  auto* list = app.add_subcommand("list-methods", "list registered methods");

  // config show
  auto* config_cmd = app.add_subcommand("config", "configuration commands");
  auto* config_show =
      config_cmd->add_subcommand("show", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Config cfg;
    if (!config_path.empty()) cfg = Config::from_file(config_path);

    if (*run) {
      return cmd_run(cfg, methods, dataset, dataset_format, out, concurrency,
                     limit, seed, seed_opt->count() > 0, trace_full, resume);
    }
    if (*eval) {
      return cmd_eval(cfg, eval_dataset, eval_format, eval_out, protocols,
                      eval_concurrency);
    }
    if (*report) return cmd_report(report_out, report_format);
    if (*compare) return cmd_compare(compare_out, compare_format);
    if (*list) {
      for (const auto& name : MethodRegistry::instance().names()) {
        std::cout << name << "\n";
      }
      return 0;
    }
    if (*config_cmd) {
      if (*config_show || config_cmd->get_subcommands().empty()) {
        std::cout << cfg.dump();
        return 0;
      }
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace masbench
