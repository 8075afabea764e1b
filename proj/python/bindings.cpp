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

// Python surface. All structured values cross the boundary as JSON text;
// the pure-Python wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <set>

#include "masbench/eval.hpp"
#include "masbench/methods.hpp"
#include "masbench/report.hpp"
#include "masbench/runner.hpp"

namespace py = pybind11;
using namespace masbench;

namespace {

MockScript script_from_json(const std::string& script_json) {
  MockScript script;
  if (script_json.empty()) return script;
  Json j = Json::parse(script_json);
  if (j.contains("default_response")) {
    script.default_response = j.at("default_response").get<std::string>();
  }
  for (const auto& e : j.value("entries", Json::array())) {
    std::string response = e.at("response").get<std::string>();
    if (e.contains("contains")) {
      script.entries.push_back(
          MockScript::contains(e.at("contains").get<std::string>(), response));
    } else {
      script.entries.push_back(MockScript::seq(response));
    }
  }
  return script;
}

MethodContext make_context(const MockScript& script) {
  MethodContext ctx;
  ctx.gateway =
      std::make_shared<Gateway>(std::make_shared<MockBackend>(script), 8);
  ctx.prompts = std::make_shared<PromptStore>();
  ctx.tools = std::make_shared<ToolRegistry>(
      default_tools({"python3", "{file}"}));
  ctx.model.name = "mock-model";
  ctx.model.base_url = "mock";
  return ctx;
}

std::string run_method_json(const std::string& method,
                            const std::string& sample_json,
                            const std::string& params_json,
                            const std::string& script_json) {
  MethodSpec spec;
  spec.name = method;
  if (!params_json.empty()) {
    spec.params = Json::parse(params_json).get<ParamMap>();
  }
  Sample sample = Json::parse(sample_json).get<Sample>();
  MASOutput out =
      run_method(spec, make_context(script_from_json(script_json)), sample);
  Json j = out;
  return j.dump();
}

std::string evaluate_json(const std::string& protocol,
                          const std::string& sample_json,
                          const std::string& response, int timeout_ms) {
  Sample sample = Json::parse(sample_json).get<Sample>();
  EvalVerdict v;
  if (protocol == "rule_boxed") {
    v = eval_rule_boxed(sample, response);
  } else if (protocol == "rule_lastnum") {
    v = eval_rule_lastnum(sample, response);
  } else if (protocol == "rule_tag") {
    v = eval_rule_tag(sample, response);
  } else if (protocol == "coding") {
    v = eval_coding(sample, response, {"python3", "{file}"}, timeout_ms);
  } else {
    throw ValidationError("unsupported protocol: '" + protocol + "'");
  }
  Json j = v;
  return j.dump();
}

std::string load_dataset_json(const std::string& path,
                              const std::string& format, int limit,
                              py::object seed) {
  DatasetSpec spec;
  spec.path = path;
  spec.format = dataset_format_from_string(format);
  if (limit > 0) spec.limit = limit;
  if (!seed.is_none()) spec.shuffle_seed = seed.cast<std::uint64_t>();
  Json out = Json::array();
  for (const auto& s : load_dataset(spec)) out.push_back(s);
  return out.dump();
}

std::string run_grid_json(const std::vector<std::string>& methods,
                          const std::string& dataset_path,
                          const std::string& out_path,
                          const std::string& format, int concurrency,
                          int limit) {
  DatasetSpec ds;
  ds.path = dataset_path;
  ds.format = dataset_format_from_string(format);
  if (limit > 0) ds.limit = limit;
  auto samples = load_dataset(ds);

  RunPlan plan;
  for (const auto& name : methods) {
    MethodSpec m;
    m.name = name;
    plan.methods.push_back(std::move(m));
  }
  plan.dataset = ds;
  plan.model.name = "mock-model";
  plan.model.base_url = "mock";
  plan.concurrency = concurrency;
  plan.out_path = out_path;

  MethodContext ctx = make_context(MockScript{});
  RunSummary s = run_plan(plan, ctx, samples);
  Json j = {{"total_cells", s.total_cells},
            {"executed", s.executed},
            {"skipped", s.skipped},
            {"errors", s.errors}};
  return j.dump();
}

std::string report_table(const std::string& run_path,
                         const std::string& format) {
  auto metrics = aggregate(read_run_file(run_path));
  return render_metrics(metrics, format == "csv" ? RenderFormat::csv
                                                 : RenderFormat::markdown);
}

std::string agreement_json(const std::string& run_path) {
  auto records = read_run_file(run_path);
  std::set<std::string> seen;
  for (const auto& r : records) {
    for (const auto& [p, v] : r.verdicts) seen.insert(p);
  }
  AgreementReport rep =
      agreement(records, {seen.begin(), seen.end()});
  Json j;
  j["protocols"] = rep.protocols;
  j["pairwise"] = rep.pairwise;
  j["accuracy"] = rep.accuracy;
  Json shifts = Json::object();
  for (const auto& [method, shift] : rep.rank_shift) {
    shifts[method] = {shift.first, shift.second};
  }
  j["rank_shift"] = shifts;
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_masbench, m) {
  m.doc() = "multi-agent method benchmarking harness (native core)";

  m.def("list_methods",
        [] { return MethodRegistry::instance().names(); });
  m.def("run_method", &run_method_json, py::arg("method"),
        py::arg("sample_json"), py::arg("params_json") = "",
        py::arg("script_json") = "");
  m.def("evaluate", &evaluate_json, py::arg("protocol"),
        py::arg("sample_json"), py::arg("response"),
        py::arg("timeout_ms") = 10000);
  m.def("load_dataset", &load_dataset_json, py::arg("path"),
        py::arg("format") = "unified_jsonl", py::arg("limit") = 0,
        py::arg("seed") = py::none());
  m.def("run_grid", &run_grid_json, py::arg("methods"),
        py::arg("dataset_path"), py::arg("out_path"),
        py::arg("format") = "unified_jsonl", py::arg("concurrency") = 4,
        py::arg("limit") = 0);
  m.def("report_table", &report_table, py::arg("run_path"),
        py::arg("format") = "csv");
  m.def("protocol_agreement", &agreement_json, py::arg("run_path"));
  m.def("stable_digest", &stable_digest);
  m.def("estimate_tokens", &estimate_tokens);

  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<ParseError>(m, "ParseError");
}
