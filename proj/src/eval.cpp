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

#include "masbench/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <sstream>

#include "masbench/sandbox.hpp"

namespace masbench {

namespace {

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower_copy(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string remove_all(std::string s, const std::string& needle) {
  size_t pos;
  while ((pos = s.find(needle)) != std::string::npos) s.erase(pos, needle.size());
  return s;
}

EvalVerdict base_verdict(const std::string& protocol) {
  EvalVerdict v;
  v.protocol = protocol;
  return v;
}

// Letter of an MCQ gold answer: either the letter itself or the index of
// the matching choice text.
std::optional<char> mcq_gold_letter(const Sample& s) {
  if (!s.gold_answer || !s.choices) return std::nullopt;
  std::string g = trim_copy(*s.gold_answer);
  if (g.size() == 1 && std::isalpha(static_cast<unsigned char>(g[0]))) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(g[0])));
  }
  for (size_t i = 0; i < s.choices->size() && i < 10; ++i) {
    if (lower_copy(trim_copy((*s.choices)[i])) == lower_copy(g)) {
      return static_cast<char>('A' + i);
    }
  }
  return std::nullopt;
}

// Choice letter in an extracted answer: a standalone A-J token, or a full
// choice-text match.
std::optional<char> mcq_extracted_letter(const Sample& s,
                                         const std::string& extracted) {
  std::string t = trim_copy(extracted);
  if (!t.empty()) {
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
    bool standalone = t.size() == 1 ||
                      !std::isalnum(static_cast<unsigned char>(t[1]));
    if (c >= 'A' && c <= 'J' && standalone) return c;
  }
  if (s.choices) {
    std::string probe = lower_copy(t);
    if (!probe.empty() && probe.back() == '.') probe.pop_back();
    for (size_t i = 0; i < s.choices->size() && i < 10; ++i) {
      if (lower_copy(trim_copy((*s.choices)[i])) == probe) {
        return static_cast<char>('A' + i);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Boxed extraction + math normalization

std::optional<std::string> extract_boxed(const std::string& text) {
  const std::string marker = "\\boxed{";
  size_t found = std::string::npos;
  size_t pos = 0;
  while (true) {
    size_t hit = text.find(marker, pos);
    if (hit == std::string::npos) break;
    found = hit;
    pos = hit + marker.size();
  }
  if (found == std::string::npos) return std::nullopt;
  size_t start = found + marker.size();
  int depth = 1;
  for (size_t i = start; i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    if (text[i] == '}') {
      --depth;
      if (depth == 0) return text.substr(start, i - start);
    }
  }
  return std::nullopt;  // unbalanced
}

std::string normalize_math_answer(const std::string& text) {
  std::string s = text;
  s = remove_all(s, "\\left");
  s = remove_all(s, "\\right");
  // Innermost \frac{a}{b} -> a/b, repeated for nesting.
  std::regex frac(R"(\\frac\{([^{}]*)\}\{([^{}]*)\})");
  std::string prev;
  while (prev != s) {
    prev = s;
    s = std::regex_replace(s, frac, "$1/$2");
  }
  std::string out;
  for (char c : s) {
    if (c == '$' || c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    out.push_back(c);
  }
  while (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

std::optional<std::string> extract_last_number(const std::string& text) {
  static const std::regex number(
      R"([-+]?\d[\d,]*(?:\.\d+)?(?:\s*/\s*\d[\d,]*(?:\.\d+)?)?)");
  auto begin = std::sregex_iterator(text.begin(), text.end(), number);
  auto end = std::sregex_iterator();
  std::optional<std::string> last;
  for (auto it = begin; it != end; ++it) last = it->str();
  if (last) {
    std::string cleaned = remove_all(*last, ",");
    cleaned = remove_all(cleaned, " ");
    return cleaned;
  }
  return std::nullopt;
}

std::optional<double> parse_numeric(const std::string& text) {
  std::string t = remove_all(remove_all(trim_copy(text), ","), " ");
  if (t.empty()) return std::nullopt;
  auto slash = t.find('/');
  try {
    size_t used = 0;
    if (slash != std::string::npos && slash > 0) {
      double num = std::stod(t.substr(0, slash), &used);
      if (used != slash) return std::nullopt;
      double den = std::stod(t.substr(slash + 1), &used);
      if (used != t.size() - slash - 1 || den == 0.0) return std::nullopt;
      return num / den;
    }
    double v = std::stod(t, &used);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool numeric_equal(double a, double b) {
  double diff = std::abs(a - b);
  if (diff <= 1e-9) return true;
  double scale = std::max(std::abs(a), std::abs(b));
  return diff <= 1e-6 * scale;
}

// ---------------------------------------------------------------------------
// Rule protocols

EvalVerdict eval_rule_boxed(const Sample& s, const std::string& response) {
  EvalVerdict v = base_verdict("rule_boxed");
  if (!s.gold_answer) {
    throw ValidationError("rule_boxed requires a gold answer");
  }
  auto boxed = extract_boxed(response);
  if (!boxed) {
    v.failure = FailureKind::format_error;
    return v;
  }
  std::string norm = normalize_math_answer(*boxed);
  v.extracted = norm;
  v.correct = norm == normalize_math_answer(*s.gold_answer);
  v.failure = v.correct ? FailureKind::none : FailureKind::wrong_answer;
  return v;
}

EvalVerdict eval_rule_lastnum(const Sample& s, const std::string& response) {
  EvalVerdict v = base_verdict("rule_lastnum");
  if (!s.gold_answer) {
    throw ValidationError("rule_lastnum requires a gold answer");
  }
  auto num = extract_last_number(response);
  if (!num) {
    v.failure = FailureKind::format_error;
    return v;
  }
  v.extracted = *num;
  auto a = parse_numeric(*num);
  auto b = parse_numeric(*s.gold_answer);
  if (a && b) {
    v.correct = numeric_equal(*a, *b);
  } else {
    v.correct = trim_copy(*num) == trim_copy(*s.gold_answer);
  }
  v.failure = v.correct ? FailureKind::none : FailureKind::wrong_answer;
  return v;
}

EvalVerdict eval_rule_tag(const Sample& s, const std::string& response,
                          const std::string& tag) {
  EvalVerdict v = base_verdict("rule_tag");
  if (!s.gold_answer) {
    throw ValidationError("rule_tag requires a gold answer");
  }
  // Last occurrence of the tag, case-insensitive.
  std::string haystack = lower_copy(response);
  std::string needle = lower_copy(tag);
  size_t found = std::string::npos, pos = 0;
  while (true) {
    size_t hit = haystack.find(needle, pos);
    if (hit == std::string::npos) break;
    found = hit;
    pos = hit + needle.size();
  }
  if (found == std::string::npos) {
    v.failure = FailureKind::format_error;
    return v;
  }
  size_t start = found + tag.size();
  size_t eol = response.find('\n', start);
  std::string rest = trim_copy(response.substr(
      start, eol == std::string::npos ? std::string::npos : eol - start));
  if (rest.empty()) {
    v.failure = FailureKind::format_error;
    return v;
  }
  v.extracted = rest;

  if (s.domain == Domain::mcq) {
    auto got = mcq_extracted_letter(s, rest);
    auto want = mcq_gold_letter(s);
    v.correct = got && want && *got == *want;
  } else {
    std::string a = lower_copy(rest);
    std::string b = lower_copy(trim_copy(*s.gold_answer));
    while (!a.empty() && a.back() == '.') a.pop_back();
    while (!b.empty() && b.back() == '.') b.pop_back();
    v.correct = a == b;
  }
  v.failure = v.correct ? FailureKind::none : FailureKind::wrong_answer;
  return v;
}

// ---------------------------------------------------------------------------
// LLM-backed protocols

namespace {

std::string choices_block(const Sample& s) {
  if (!s.choices) return "";
  std::ostringstream os;
  os << "Choices:\n";
  for (size_t i = 0; i < s.choices->size(); ++i) {
    os << static_cast<char>('A' + i) << ". " << (*s.choices)[i] << "\n";
  }
  return os.str();
}

std::string one_call(Gateway& gw, const ModelConfig& model,
                     const std::string& prompt) {
  ChatRequest req;
  ChatMessage m;
  m.role = Role::user;
  m.content = prompt;
  req.messages = {m};
  req.model = model;
  return gw.complete_with_retry(req).text;
}

}  // namespace

EvalVerdict eval_llm_two_step(const Sample& s, const std::string& response,
                              Gateway& gateway, const PromptStore& prompts,
                              const ModelConfig& model) {
  EvalVerdict v = base_verdict("llm_two_step");
  if (!s.gold_answer) {
    throw ValidationError("llm_two_step requires a gold answer");
  }
  std::string extract_prompt = PromptStore::fill(
      prompts.get("eval_extract"),
      {{"query", s.query}, {"choices", choices_block(s)}, {"response", response}});
  std::string extracted = trim_copy(one_call(gateway, model, extract_prompt));
  if (extracted.empty() || extracted == "NO ANSWER") {
    v.failure = FailureKind::format_error;
    return v;
  }
  v.extracted = extracted;

  std::string judge_prompt = PromptStore::fill(
      prompts.get("eval_judge"),
      {{"query", s.query}, {"extracted", extracted}, {"gold", *s.gold_answer}});
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string prompt = judge_prompt;
    if (attempt == 1) {
      prompt += "\n\nYour reply must be exactly one word: CORRECT or INCORRECT.";
    }
    std::string raw = one_call(gateway, model, prompt);
    std::string word = trim_copy(raw);
    if (word == "CORRECT") {
      v.correct = true;
      v.failure = FailureKind::none;
      return v;
    }
    if (word == "INCORRECT") {
      v.correct = false;
      v.failure = FailureKind::wrong_answer;
      return v;
    }
    v.judge_raw = raw;
  }
  v.correct = false;
  v.failure = FailureKind::other;
  return v;
}

EvalVerdict eval_judge_endpoint(const Sample& s, const std::string& response,
                                Gateway& judge_gateway,
                                const PromptStore& prompts,
                                const ModelConfig& judge_model) {
  EvalVerdict v = base_verdict("judge_endpoint");
  if (!s.gold_answer) {
    throw ValidationError("judge_endpoint requires a gold answer");
  }
  std::string prompt = PromptStore::fill(
      prompts.get("judge_endpoint"),
      {{"query", s.query}, {"response", response}, {"gold", *s.gold_answer}});
  std::string raw = one_call(judge_gateway, judge_model, prompt);
  std::string l = lower_copy(raw);
  // "incorrect" contains "correct": check it first.
  if (l.find("incorrect") != std::string::npos) {
    v.correct = false;
    v.failure = FailureKind::wrong_answer;
  } else if (l.find("correct") != std::string::npos) {
    v.correct = true;
    v.failure = FailureKind::none;
  } else {
    v.correct = false;
    v.failure = FailureKind::other;
    v.judge_raw = raw;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Coding

EvalVerdict eval_coding(const Sample& s, const std::string& response,
                        const std::vector<std::string>& interpreter_cmd,
                        int timeout_ms, Gateway* gateway,
                        const PromptStore* prompts, const ModelConfig* model) {
  EvalVerdict v = base_verdict("coding");
  if (s.domain != Domain::coding || !s.test_cases || s.test_cases->empty()) {
    throw ValidationError("eval_coding requires a coding sample with tests");
  }
  auto program = extract_code_block(response);
  if (!program && gateway && prompts && model) {
    std::string prompt = PromptStore::fill(
        prompts->get("code_extract"),
        {{"query", s.query}, {"response", response}});
    program = extract_code_block(one_call(*gateway, *model, prompt));
  }
  if (!program) {
    v.failure = FailureKind::format_error;
    return v;
  }
  v.extracted = *program;
  TestRun run = run_test_cases(*program, *s.test_cases, interpreter_cmd,
                               timeout_ms);
  if (run.passed) {
    v.correct = true;
    v.failure = FailureKind::none;
  } else if (run.timed_out) {
    v.failure = FailureKind::tool_error;
  } else {
    v.failure = FailureKind::wrong_answer;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Failure buckets

std::string to_string(FailureBucket b) {
  switch (b) {
    case FailureBucket::wrong: return "wrong";
    case FailureBucket::format: return "format";
    case FailureBucket::other: return "other";
  }
  return "other";
}

FailureBucket classify_failure(const EvalVerdict& v) {
  switch (v.failure) {
    case FailureKind::wrong_answer: return FailureBucket::wrong;
    case FailureKind::format_error: return FailureBucket::format;
    case FailureKind::tool_error:
    case FailureKind::other:
    case FailureKind::none: return FailureBucket::other;
  }
  return FailureBucket::other;
}

// ---------------------------------------------------------------------------
// Agreement

std::map<std::string, int> dense_rank(
    const std::map<std::string, double>& accuracy_by_method) {
  std::vector<double> values;
  for (const auto& [m, acc] : accuracy_by_method) values.push_back(acc);
  std::sort(values.begin(), values.end(), std::greater<>());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::map<std::string, int> ranks;
  for (const auto& [m, acc] : accuracy_by_method) {
    auto it = std::find(values.begin(), values.end(), acc);
    ranks[m] = static_cast<int>(it - values.begin()) + 1;
  }
  return ranks;
}

double AgreementReport::pairwise_rate(const std::string& a,
                                      const std::string& b) const {
  auto ia = std::find(protocols.begin(), protocols.end(), a);
  auto ib = std::find(protocols.begin(), protocols.end(), b);
  if (ia == protocols.end() || ib == protocols.end()) {
    throw std::out_of_range("protocol not in report");
  }
  return pairwise[ia - protocols.begin()][ib - protocols.begin()];
}

AgreementReport agreement(const std::vector<RunRecord>& records,
                          const std::vector<std::string>& protocols) {
  AgreementReport rep;
  rep.protocols = protocols;
  const size_t n = protocols.size();
  rep.pairwise.assign(n, std::vector<double>(n, 1.0));

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      std::int64_t both = 0, same = 0;
      for (const auto& r : records) {
        auto a = r.verdicts.find(protocols[i]);
        auto b = r.verdicts.find(protocols[j]);
        if (a == r.verdicts.end() || b == r.verdicts.end()) continue;
        ++both;
        if (a->second.correct == b->second.correct) ++same;
      }
      double rate = both == 0 ? 1.0 : static_cast<double>(same) / both;
      rep.pairwise[i][j] = rate;
      rep.pairwise[j][i] = rate;
    }
  }

  for (const auto& p : protocols) {
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> tally;
    for (const auto& r : records) {
      auto it = r.verdicts.find(p);
      if (it == r.verdicts.end()) continue;
      auto& [correct, total] = tally[r.method];
      ++total;
      if (it->second.correct) ++correct;
    }
    for (const auto& [method, counts] : tally) {
      rep.accuracy[p][method] =
          counts.second == 0
              ? 0.0
              : static_cast<double>(counts.first) / counts.second;
    }
    rep.ranks[p] = dense_rank(rep.accuracy[p]);
  }

  for (const auto& [p, ranks] : rep.ranks) {
    for (const auto& [method, rank] : ranks) {
      auto it = rep.rank_shift.find(method);
      if (it == rep.rank_shift.end()) {
        rep.rank_shift[method] = {rank, rank};
      } else {
        it->second.first = std::min(it->second.first, rank);
        it->second.second = std::max(it->second.second, rank);
      }
    }
  }
  return rep;
}

}  // namespace masbench
