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

#include <optional>
#include <string>
#include <vector>

#include "masbench/methods.hpp"
#include "masbench/types.hpp"

namespace masbench {

enum class DatasetFormat { unified_jsonl, mcq_jsonl, coding_jsonl };

DatasetFormat dataset_format_from_string(const std::string& s);

struct DatasetSpec {
  std::string path;
  DatasetFormat format = DatasetFormat::unified_jsonl;
  std::optional<int> limit;
  std::optional<std::uint64_t> shuffle_seed;
};

// Deterministic order (optionally seeded shuffle before the limit cut);
// every sample validates; duplicate ids are an error.
std::vector<Sample> load_dataset(const DatasetSpec& spec);

struct RunPlan {
  std::vector<MethodSpec> methods;
  DatasetSpec dataset;
  ModelConfig model;
  int concurrency = 4;
  std::string out_path;
};

struct RunSummary {
  int total_cells = 0;
  int executed = 0;
  int skipped = 0;   // resume hits
  int errors = 0;    // cells recorded with terminated_by=error
};

// Executes every (method, sample) cell with at most `concurrency` in flight.
// Each finished cell is appended to out_path immediately; per-cell failures
// are recorded, never fatal. The file is re-sorted by (method, sample_id)
// at the end.
RunSummary run_plan(const RunPlan& plan, const MethodContext& base_ctx,
                    const std::vector<Sample>& samples);

// Cells already present in out_path (by resume key) are skipped; the final
// file holds exactly the full grid.
RunSummary resume_plan(const RunPlan& plan, const MethodContext& base_ctx,
                       const std::vector<Sample>& samples);

}  // namespace masbench
