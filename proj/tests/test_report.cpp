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

#include <algorithm>
#include <sstream>

#include "masbench/report.hpp"

using namespace masbench;

namespace {

RunRecord rec(const std::string& sample, const std::string& method,
              std::map<std::string, bool> verdicts,
              TokenUsage usage = {100, 50}) {
  RunRecord r;
  r.sample_id = sample;
  r.method = method;
  r.model = "m";
  r.output.total_usage = usage;
  for (const auto& [protocol, correct] : verdicts) {
    EvalVerdict v;
    v.protocol = protocol;
    v.correct = correct;
    v.failure = correct ? FailureKind::none : FailureKind::wrong_answer;
    r.verdicts[protocol] = v;
  }
  return r;
}

const MethodMetrics& find_method(const std::vector<MethodMetrics>& metrics,
                                 const std::string& name) {
  auto it = std::find_if(metrics.begin(), metrics.end(),
                         [&](const MethodMetrics& m) { return m.method == name; });
  REQUIRE(it != metrics.end());
  return *it;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  // Good enough for the unquoted numeric tables produced here.
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.push_back("");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("aggregate computes per-protocol accuracy and token averages") {
  std::vector<RunRecord> records = {
      rec("s1", "m1", {{"p", true}, {"q", true}}, {100, 40}),
      rec("s2", "m1", {{"p", true}, {"q", false}}, {200, 60}),
      rec("s3", "m1", {{"p", false}, {"q", false}}, {300, 80}),
      rec("s1", "m2", {{"p", true}}, {10, 5}),
  };
  auto metrics = aggregate(records);
  REQUIRE(metrics.size() == 2);
  const MethodMetrics& m1 = find_method(metrics, "m1");
  CHECK(m1.n_samples == 3);
  CHECK(m1.accuracy.at("p") == doctest::Approx(2.0 / 3.0));
  CHECK(m1.accuracy.at("q") == doctest::Approx(1.0 / 3.0));
  CHECK(m1.avg_prompt_tokens == doctest::Approx(200.0));
  CHECK(m1.avg_completion_tokens == doctest::Approx(60.0));
  // Only s3's primary ("p") verdict is incorrect, a wrong answer.
  CHECK(m1.failure_breakdown.at(FailureBucket::wrong) == doctest::Approx(1.0));
  CHECK(m1.failure_breakdown.at(FailureBucket::format) == doctest::Approx(0.0));

  const MethodMetrics& m2 = find_method(metrics, "m2");
  CHECK(m2.accuracy.at("p") == doctest::Approx(1.0));
  CHECK(m2.failure_breakdown.empty());  // nothing incorrect to classify
}

TEST_CASE("aggregate counts verdictless error cells against every protocol") {
  RunRecord err;
  err.sample_id = "s3";
  err.method = "m1";
  err.model = "m";
  err.output.terminated_by = TerminatedBy::error;
  err.output.error_reason = "format";

  std::vector<RunRecord> records = {
      rec("s1", "m1", {{"p", true}, {"q", true}}),
      rec("s2", "m1", {{"p", false}, {"q", false}}),
      err,
  };
  auto metrics = aggregate(records);
  const MethodMetrics& m1 = find_method(metrics, "m1");
  CHECK(m1.n_samples == 3);
  // The error cell joins the denominator of both protocols.
  CHECK(m1.accuracy.at("p") == doctest::Approx(1.0 / 3.0));
  CHECK(m1.accuracy.at("q") == doctest::Approx(1.0 / 3.0));
  // Incorrect: the error cell (reason "format") and the s2 primary
  // verdict (wrong answer); the breakdown halves between them.
  CHECK(m1.failure_breakdown.at(FailureBucket::format) == doctest::Approx(0.5));
  CHECK(m1.failure_breakdown.at(FailureBucket::wrong) == doctest::Approx(0.5));
}

TEST_CASE("aggregate never credits correctness to an errored record") {
  RunRecord err = rec("s1", "m1", {{"p", true}});
  err.output.terminated_by = TerminatedBy::error;
  err.output.error_reason = "transport: boom";
  auto metrics = aggregate({err});
  const MethodMetrics& m1 = find_method(metrics, "m1");
  CHECK(m1.accuracy.at("p") == doctest::Approx(0.0));
  CHECK(m1.failure_breakdown.at(FailureBucket::other) == doctest::Approx(1.0));
}

TEST_CASE("rank_table closed-form oracle") {
  // Dense ranks per dataset:
  //   d1: A=1 (0.9), B=2 (0.8), C=3 (0.7)
  //   d2: B=1 (0.6), A=2 (0.5), C=3 (0.4)
  std::map<std::string, std::map<std::string, double>> acc = {
      {"A", {{"d1", 0.9}, {"d2", 0.5}}},
      {"B", {{"d1", 0.8}, {"d2", 0.6}}},
      {"C", {{"d1", 0.7}, {"d2", 0.4}}},
  };
  auto rows = rank_table(acc);
  REQUIRE(rows.size() == 3);
  // A and B tie at avg_rank 1.5 and avg_value 0.7; name breaks the tie.
  CHECK(rows[0].method == "A");
  CHECK(rows[1].method == "B");
  CHECK(rows[2].method == "C");
  for (int i = 0; i < 2; ++i) {
    CHECK(rows[i].avg_rank == doctest::Approx(1.5));
    CHECK(rows[i].avg_value == doctest::Approx(0.7));
    CHECK(rows[i].rank_std == doctest::Approx(0.5));
  }
  CHECK(rows[2].avg_rank == doctest::Approx(3.0));
  CHECK(rows[2].rank_std == doctest::Approx(0.0));
  CHECK(rows[2].avg_value == doctest::Approx(0.55));
}

namespace {

MethodMetrics point(const std::string& name, double tokens, double acc,
                    const std::string& protocol = "p") {
  MethodMetrics m;
  m.method = name;
  m.avg_prompt_tokens = tokens;
  m.avg_completion_tokens = 0.0;
  m.accuracy[protocol] = acc;
  m.n_samples = 1;
  return m;
}

}  // namespace

TEST_CASE("frontier: two points give the exact interpolating line") {
  // x = log10(tokens): (2, 0.2) and (4, 0.6) -> slope 0.2, intercept -0.2.
  auto fit = frontier({point("a", 100, 0.2), point("b", 10000, 0.6)}, "p");
  CHECK(fit.slope == doctest::Approx(0.2));
  CHECK(fit.intercept == doctest::Approx(-0.2));
  CHECK(fit.residuals.at("a") == doctest::Approx(0.0));
  CHECK(fit.residuals.at("b") == doctest::Approx(0.0));
}

TEST_CASE("frontier: three-point OLS against a hand-computed fit") {
  // Points (2, 0.2), (3, 0.5), (4, 0.6):
  // slope = 0.2, intercept = -1/6, residuals -1/30, +1/15, -1/30.
  auto fit = frontier({point("a", 100, 0.2), point("b", 1000, 0.5),
                       point("c", 10000, 0.6)},
                      "p");
  CHECK(fit.slope == doctest::Approx(0.2));
  CHECK(fit.intercept == doctest::Approx(-1.0 / 6.0));
  CHECK(fit.residuals.at("a") == doctest::Approx(-1.0 / 30.0));
  CHECK(fit.residuals.at("b") == doctest::Approx(1.0 / 15.0));
  CHECK(fit.residuals.at("c") == doctest::Approx(-1.0 / 30.0));
  // Residuals of an OLS fit sum to zero.
  double sum = 0.0;
  for (const auto& [name, r] : fit.residuals) sum += r;
  CHECK(sum == doctest::Approx(0.0));
}

TEST_CASE("frontier: equal costs degrade to a flat line through the mean") {
  auto fit = frontier({point("a", 500, 0.2), point("b", 500, 0.8)}, "p");
  CHECK(fit.slope == doctest::Approx(0.0));
  CHECK(fit.intercept == doctest::Approx(0.5));
  CHECK(fit.residuals.at("a") == doctest::Approx(-0.3));
  CHECK(fit.residuals.at("b") == doctest::Approx(0.3));
}

TEST_CASE("frontier: fewer than two usable points is an error") {
  CHECK_THROWS_AS(frontier({point("a", 100, 0.2)}, "p"), ValidationError);
  // A point without the protocol and a point without tokens don't count.
  MethodMetrics no_tokens = point("b", 0, 0.5);
  MethodMetrics other_proto = point("c", 100, 0.5, "q");
  CHECK_THROWS_AS(frontier({point("a", 100, 0.2), no_tokens, other_proto}, "p"),
                  ValidationError);
}

TEST_CASE("render_metrics CSV parses back to the right cells") {
  std::vector<RunRecord> records = {
      rec("s1", "m1", {{"p", true}}, {100, 50}),
      rec("s2", "m1", {{"p", false}}, {100, 50}),
  };
  std::string csv = render_metrics(aggregate(records), RenderFormat::csv);
  auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 2);
  const auto& header = rows[0];
  auto col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    REQUIRE(it != header.end());
    return static_cast<size_t>(it - header.begin());
  };
  CHECK(rows[1][col("method")] == "m1");
  CHECK(rows[1][col("n_samples")] == "2");
  CHECK(std::stod(rows[1][col("accuracy_p")]) == doctest::Approx(0.5));
  CHECK(std::stod(rows[1][col("avg_prompt_tokens")]) == doctest::Approx(100));
  CHECK(std::stod(rows[1][col("failure_wrong")]) == doctest::Approx(1.0));
}

TEST_CASE("render_metrics markdown has a header separator row") {
  std::vector<RunRecord> records = {rec("s1", "m1", {{"p", true}})};
  std::string md = render_metrics(aggregate(records), RenderFormat::markdown);
  CHECK(md.find("| method |") != std::string::npos);
  CHECK(md.find("| --- |") != std::string::npos);
  CHECK(md.find("| m1 |") != std::string::npos);
}

TEST_CASE("render_rank_table emits rows in rank order") {
  std::map<std::string, std::map<std::string, double>> acc = {
      {"worse", {{"d1", 0.1}}}, {"better", {{"d1", 0.9}}}};
  std::string csv = render_rank_table(rank_table(acc), RenderFormat::csv);
  auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "method");
  CHECK(rows[1][0] == "better");
  CHECK(rows[2][0] == "worse");
}

TEST_CASE("render_agreement includes the matrix and the rank-shift table") {
  std::vector<RunRecord> records = {
      rec("s1", "m1", {{"p", true}, {"q", false}}),
      rec("s2", "m1", {{"p", true}, {"q", true}}),
  };
  AgreementReport rep = agreement(records, {"p", "q"});
  std::string csv = render_agreement(rep, RenderFormat::csv);
  CHECK(csv.find("protocol,p,q") == 0);
  CHECK(csv.find("0.5") != std::string::npos);  // the p/q agreement rate
  CHECK(csv.find("method,rank_p,rank_q,best_rank,worst_rank") !=
        std::string::npos);
}

TEST_CASE("csv_quote follows RFC rules") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("") == "");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_quote("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_quote("tab\there") == "tab\there");
}
