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

#include "masbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace masbench {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

std::vector<MethodMetrics> aggregate(const std::vector<RunRecord>& records) {
  struct Tally {
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> per_protocol;
    std::int64_t n = 0;
    std::int64_t prompt = 0;
    std::int64_t completion = 0;
    std::map<FailureBucket, std::int64_t> failures;
    std::int64_t incorrect = 0;
  };
  std::map<std::string, Tally> tallies;

  // Pre-register every protocol seen for a method, so error cells without
  // verdicts can be counted against all of them.
  for (const auto& r : records) {
    for (const auto& [proto, verdict] : r.verdicts) {
      tallies[r.method].per_protocol[proto];
    }
  }

  for (const auto& r : records) {
    Tally& t = tallies[r.method];
    ++t.n;
    t.prompt += r.output.total_usage.prompt_tokens;
    t.completion += r.output.total_usage.completion_tokens;

    bool errored = r.output.terminated_by == TerminatedBy::error;
    for (const auto& [proto, verdict] : r.verdicts) {
      auto& [correct, total] = t.per_protocol[proto];
      ++total;
      if (verdict.correct && !errored) ++correct;
    }
    if (errored && r.verdicts.empty()) {
      // Error cells with nothing to evaluate still count incorrect.
      for (auto& [proto, counts] : t.per_protocol) ++counts.second;
    }

    // Breakdown uses the primary (alphabetically first) verdict per record.
    if (errored) {
      ++t.incorrect;
      ++t.failures[r.output.error_reason == "format" ? FailureBucket::format
                                                     : FailureBucket::other];
    } else if (!r.verdicts.empty()) {
      const EvalVerdict& primary = r.verdicts.begin()->second;
      if (!primary.correct) {
        ++t.incorrect;
        ++t.failures[classify_failure(primary)];
      }
    }
  }

  std::vector<MethodMetrics> out;
  for (const auto& [method, t] : tallies) {
    MethodMetrics m;
    m.method = method;
    m.n_samples = t.n;
    if (t.n > 0) {
      m.avg_prompt_tokens = static_cast<double>(t.prompt) / t.n;
      m.avg_completion_tokens = static_cast<double>(t.completion) / t.n;
    }
    for (const auto& [proto, counts] : t.per_protocol) {
      m.accuracy[proto] = counts.second == 0
                              ? 0.0
                              : static_cast<double>(counts.first) / counts.second;
    }
    std::int64_t classified = 0;
    for (const auto& [b, c] : t.failures) classified += c;
    if (classified > 0) {
      for (auto b :
           {FailureBucket::wrong, FailureBucket::format, FailureBucket::other}) {
        auto it = t.failures.find(b);
        m.failure_breakdown[b] =
            it == t.failures.end()
                ? 0.0
                : static_cast<double>(it->second) / classified;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<RankRow> rank_table(
    const std::map<std::string, std::map<std::string, double>>& accuracies) {
  // Collect the dataset set.
  std::set<std::string> datasets;
  for (const auto& [method, per_ds] : accuracies) {
    for (const auto& [ds, acc] : per_ds) datasets.insert(ds);
  }
  // Per-dataset dense ranks.
  std::map<std::string, std::map<std::string, int>> ranks_per_ds;
  for (const auto& ds : datasets) {
    std::map<std::string, double> col;
    for (const auto& [method, per_ds] : accuracies) {
      auto it = per_ds.find(ds);
      if (it != per_ds.end()) col[method] = it->second;
    }
    ranks_per_ds[ds] = dense_rank(col);
  }

  std::vector<RankRow> rows;
  for (const auto& [method, per_ds] : accuracies) {
    RankRow row;
    row.method = method;
    double sum_v = 0.0, sum_r = 0.0, sum_r2 = 0.0;
    int n = 0;
    for (const auto& [ds, acc] : per_ds) {
      sum_v += acc;
      double r = ranks_per_ds[ds][method];
      sum_r += r;
      sum_r2 += r * r;
      ++n;
    }
    if (n > 0) {
      row.avg_value = sum_v / n;
      row.avg_rank = sum_r / n;
      double var = sum_r2 / n - row.avg_rank * row.avg_rank;
      row.rank_std = var > 0 ? std::sqrt(var) : 0.0;
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const RankRow& a, const RankRow& b) {
    if (a.avg_rank != b.avg_rank) return a.avg_rank < b.avg_rank;
    if (a.avg_value != b.avg_value) return a.avg_value > b.avg_value;
    return a.method < b.method;
  });
  return rows;
}

FrontierFit frontier(const std::vector<MethodMetrics>& metrics,
                     const std::string& protocol) {
  std::vector<std::pair<std::string, std::pair<double, double>>> points;
  for (const auto& m : metrics) {
    auto it = m.accuracy.find(protocol);
    if (it == m.accuracy.end()) continue;
    double tokens = m.avg_prompt_tokens + m.avg_completion_tokens;
    if (tokens <= 0) continue;
    points.push_back({m.method, {std::log10(tokens), it->second}});
  }
  if (points.size() < 2) {
    throw ValidationError("frontier fit needs at least 2 methods with tokens");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& [name, p] : points) {
    sx += p.first;
    sy += p.second;
    sxx += p.first * p.first;
    sxy += p.first * p.second;
  }
  double denom = n * sxx - sx * sx;
  FrontierFit fit;
  if (std::abs(denom) < 1e-15) {
    // All methods at the same cost: flat line through the mean.
    fit.slope = 0.0;
    fit.intercept = sy / n;
  } else {
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
  }
  for (const auto& [name, p] : points) {
    fit.residuals[name] = p.second - (fit.slope * p.first + fit.intercept);
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Rendering

std::string csv_quote(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

namespace {

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows,
                         RenderFormat format) {
  std::ostringstream os;
  if (format == RenderFormat::csv) {
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) os << ",";
      os << csv_quote(header[i]);
    }
    os << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) os << ",";
        os << csv_quote(row[i]);
      }
      os << "\n";
    }
  } else {
    os << "|";
    for (const auto& h : header) os << " " << h << " |";
    os << "\n|";
    for (size_t i = 0; i < header.size(); ++i) os << " --- |";
    os << "\n";
    for (const auto& row : rows) {
      os << "|";
      for (const auto& cell : row) os << " " << cell << " |";
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace

std::string render_metrics(const std::vector<MethodMetrics>& metrics,
                           RenderFormat format) {
  // Stable column order: protocols sorted by name.
  std::set<std::string> protocols;
  for (const auto& m : metrics) {
    for (const auto& [p, acc] : m.accuracy) protocols.insert(p);
  }
  std::vector<std::string> header = {"method", "n_samples"};
  for (const auto& p : protocols) header.push_back("accuracy_" + p);
  header.insert(header.end(),
                {"avg_prompt_tokens", "avg_completion_tokens", "failure_wrong",
                 "failure_format", "failure_other"});
  std::vector<std::vector<std::string>> rows;
  for (const auto& m : metrics) {
    std::vector<std::string> row = {m.method, std::to_string(m.n_samples)};
    for (const auto& p : protocols) {
      auto it = m.accuracy.find(p);
      row.push_back(it == m.accuracy.end() ? "" : fmt(it->second));
    }
    row.push_back(fmt(m.avg_prompt_tokens));
    row.push_back(fmt(m.avg_completion_tokens));
    for (auto b :
         {FailureBucket::wrong, FailureBucket::format, FailureBucket::other}) {
      auto it = m.failure_breakdown.find(b);
      row.push_back(it == m.failure_breakdown.end() ? "0" : fmt(it->second));
    }
    rows.push_back(std::move(row));
  }
  return render_table(header, rows, format);
}

std::string render_rank_table(const std::vector<RankRow>& rows,
                              RenderFormat format) {
  // avg_rank_std is the standard deviation of per-dataset ranks.
  std::vector<std::string> header = {"method", "avg_value", "avg_rank",
                                     "avg_rank_std"};
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) {
    out.push_back({r.method, fmt(r.avg_value), fmt(r.avg_rank),
                   fmt(r.rank_std)});
  }
  return render_table(header, out, format);
}

std::string render_agreement(const AgreementReport& report,
                             RenderFormat format) {
  std::ostringstream os;
  {
    std::vector<std::string> header = {"protocol"};
    for (const auto& p : report.protocols) header.push_back(p);
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < report.protocols.size(); ++i) {
      std::vector<std::string> row = {report.protocols[i]};
      for (size_t j = 0; j < report.protocols.size(); ++j) {
        row.push_back(fmt(report.pairwise[i][j]));
      }
      rows.push_back(std::move(row));
    }
    os << render_table(header, rows, format);
  }
  os << "\n";
  {
    std::vector<std::string> header = {"method"};
    for (const auto& p : report.protocols) header.push_back("rank_" + p);
    header.push_back("best_rank");
    header.push_back("worst_rank");
    std::vector<std::vector<std::string>> rows;
    for (const auto& [method, shift] : report.rank_shift) {
      std::vector<std::string> row = {method};
      for (const auto& p : report.protocols) {
        auto pit = report.ranks.find(p);
        if (pit != report.ranks.end() && pit->second.count(method)) {
          row.push_back(std::to_string(pit->second.at(method)));
        } else {
          row.push_back("");
        }
      }
      row.push_back(std::to_string(shift.first));
      row.push_back(std::to_string(shift.second));
      rows.push_back(std::move(row));
    }
    os << render_table(header, rows, format);
  }
  return os.str();
}

}  // namespace masbench
