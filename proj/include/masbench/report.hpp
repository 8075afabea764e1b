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
#include <string>
#include <vector>

#include "masbench/eval.hpp"
#include "masbench/types.hpp"

namespace masbench {

struct MethodMetrics {
  std::string method;
  // Protocol name -> accuracy in [0,1]. Never mixed in one column.
  std::map<std::string, double> accuracy;
  double avg_prompt_tokens = 0.0;
  double avg_completion_tokens = 0.0;
  std::int64_t n_samples = 0;
  // Fractions over incorrect samples; sums to 1 when any are incorrect.
  std::map<FailureBucket, double> failure_breakdown;
};

// Per-method accuracy under each evaluated protocol, token averages from
// total_usage. Records with terminated_by=error count incorrect; their
// failure bucket is `other` unless a verdict says format.
std::vector<MethodMetrics> aggregate(const std::vector<RunRecord>& records);

struct RankRow {
  std::string method;
  double avg_value = 0.0;   // mean accuracy across datasets
  double avg_rank = 0.0;    // mean dense rank (1 = best)
  double rank_std = 0.0;    // std deviation of ranks over datasets
};

// Input: method -> dataset -> accuracy (same dataset set for every method).
// Output sorted by avg_rank, then avg_value descending.
std::vector<RankRow> rank_table(
    const std::map<std::string, std::map<std::string, double>>& accuracies);

struct FrontierFit {
  double slope = 0.0;
  double intercept = 0.0;
  // method -> residual (accuracy - fitted); positive = cost-effective.
  std::map<std::string, double> residuals;
};

// OLS of accuracy against log10(avg total tokens per query). Throws
// ValidationError with fewer than 2 points.
FrontierFit frontier(const std::vector<MethodMetrics>& metrics,
                     const std::string& protocol);

enum class RenderFormat { markdown, csv };

std::string render_metrics(const std::vector<MethodMetrics>& metrics,
                           RenderFormat format);
std::string render_rank_table(const std::vector<RankRow>& rows,
                              RenderFormat format);
std::string render_agreement(const AgreementReport& report,
                             RenderFormat format);

// RFC-style CSV quoting.
std::string csv_quote(const std::string& field);

}  // namespace masbench
