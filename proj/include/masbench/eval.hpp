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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "masbench/gateway.hpp"
#include "masbench/prompts.hpp"
#include "masbench/types.hpp"

namespace masbench {

// Registry keys for EvalVerdict.protocol.
inline const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names = {
      "llm_two_step", "judge_endpoint", "rule_boxed", "rule_lastnum",
      "rule_tag"};
  return names;
}

// ---------------------------------------------------------------------------
// Rule protocols (pure functions, no gateway)

// Contents of the last \boxed{...}, brace-balanced.
std::optional<std::string> extract_boxed(const std::string& text);

// Normalization for boxed-style math answers: \left/\right removal,
// \frac{a}{b} -> a/b, '$' and whitespace stripped, trailing periods dropped.
// Idempotent.
std::string normalize_math_answer(const std::string& text);

// Last numeric literal: optional sign, commas, decimals, a/b fractions.
std::optional<std::string> extract_last_number(const std::string& text);
std::optional<double> parse_numeric(const std::string& text);

// 1e-6 relative tolerance, 1e-9 absolute near zero.
bool numeric_equal(double a, double b);

EvalVerdict eval_rule_boxed(const Sample& s, const std::string& response);
EvalVerdict eval_rule_lastnum(const Sample& s, const std::string& response);
EvalVerdict eval_rule_tag(const Sample& s, const std::string& response,
                          const std::string& tag = "Answer:");

// ---------------------------------------------------------------------------
// LLM-backed protocols

EvalVerdict eval_llm_two_step(const Sample& s, const std::string& response,
                              Gateway& gateway, const PromptStore& prompts,
                              const ModelConfig& model);

EvalVerdict eval_judge_endpoint(const Sample& s, const std::string& response,
                                Gateway& judge_gateway,
                                const PromptStore& prompts,
                                const ModelConfig& judge_model);

// ---------------------------------------------------------------------------
// Coding

EvalVerdict eval_coding(const Sample& s, const std::string& response,
                        const std::vector<std::string>& interpreter_cmd,
                        int timeout_ms = 10000, Gateway* gateway = nullptr,
                        const PromptStore* prompts = nullptr,
                        const ModelConfig* model = nullptr);

// ---------------------------------------------------------------------------
// Failure taxonomy -> the three reporting buckets.

enum class FailureBucket { wrong, format, other };
std::string to_string(FailureBucket b);
FailureBucket classify_failure(const EvalVerdict& v);

// ---------------------------------------------------------------------------
// Cross-protocol agreement

struct AgreementReport {
  std::vector<std::string> protocols;
  // Symmetric with unit diagonal; indexed as protocols x protocols.
  std::vector<std::vector<double>> pairwise;
  // protocol -> method -> accuracy.
  std::map<std::string, std::map<std::string, double>> accuracy;
  // protocol -> method -> dense rank (1 = best; ties share the better rank).
  std::map<std::string, std::map<std::string, int>> ranks;
  // method -> (best rank, worst rank) across protocols.
  std::map<std::string, std::pair<int, int>> rank_shift;

  double pairwise_rate(const std::string& a, const std::string& b) const;
};

AgreementReport agreement(const std::vector<RunRecord>& records,
                          const std::vector<std::string>& protocols);

// Dense ranking of methods by accuracy, descending; ties share the better
// rank; the next distinct value gets the next integer.
std::map<std::string, int> dense_rank(
    const std::map<std::string, double>& accuracy_by_method);

}  // namespace masbench
