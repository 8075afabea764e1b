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

#include "masbench/methods.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>

#include "masbench/sandbox.hpp"

namespace masbench {

namespace {

std::int64_t get_int(const ParamMap& p, const std::string& key,
                     std::int64_t fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  return it->second.get<std::int64_t>();
}

std::string get_string(const ParamMap& p, const std::string& key,
                       const std::string& fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  return it->second.get<std::string>();
}

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool has_line_equal(const std::string& text, const std::string& wanted) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (trim_copy(line) == wanted) return true;
  }
  return false;
}

void require_query(const Sample& s) {
  if (s.query.empty()) {
    throw std::invalid_argument("sample query is empty");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Base

ChatMessage Method::sys(const std::string& content) const {
  ChatMessage m;
  m.role = Role::system;
  m.content = content;
  return m;
}

ChatMessage Method::user(const std::string& content) const {
  ChatMessage m;
  m.role = Role::user;
  m.content = content;
  return m;
}

std::string Method::call_llm(const std::vector<ChatMessage>& messages,
                             TraceKind kind, const std::string& agent_id) {
  ChatRequest req;
  req.messages = messages;
  req.model = ctx_.model;
  auto start = std::chrono::steady_clock::now();
  Completion c = ctx_.gateway->complete_with_retry(req);
  auto end = std::chrono::steady_clock::now();

  TraceEvent ev;
  ev.seq = next_seq_++;
  ev.kind = kind;
  ev.agent_id = agent_id;
  ev.request_digest = req.digest();
  ev.response_text = c.text;
  ev.usage = c.usage;
  ev.usage_estimated = c.usage_estimated;
  ev.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
  if (ctx_.trace_full) ev.request_full = req.flattened();
  trace_.push_back(std::move(ev));
  usage_ = merge_usage(usage_, c.usage);
  return c.text;
}

void Method::add_tool_event(const std::string& agent_id,
                            const std::string& request,
                            const std::string& observation) {
  TraceEvent ev;
  ev.seq = next_seq_++;
  ev.kind = TraceKind::tool_call;
  ev.agent_id = agent_id;
  ev.request_digest = stable_digest(request);
  ev.response_text = observation;
  if (ctx_.trace_full) ev.request_full = request;
  trace_.push_back(std::move(ev));
}

MASOutput Method::inference(const Sample& sample) {
  trace_.clear();
  usage_ = {};
  response_.clear();
  terminated_by_ = TerminatedBy::completed;
  error_reason_.clear();
  next_seq_ = 0;

  auto start = std::chrono::steady_clock::now();
  try {
    run_impl(sample);
  } catch (const TransportError& e) {
    terminated_by_ = TerminatedBy::error;
    error_reason_ = std::string("transport: ") + e.what();
  } catch (const ConfigurationError& e) {
    terminated_by_ = TerminatedBy::error;
    error_reason_ = std::string("configuration: ") + e.what();
  }
  auto end = std::chrono::steady_clock::now();

  MASOutput out;
  out.response = response_;
  out.trace = std::move(trace_);
  out.total_usage = usage_;
  out.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
  out.terminated_by = terminated_by_;
  out.error_reason = error_reason_;
  return out;
}

// ---------------------------------------------------------------------------
// Single-agent baselines

class VanillaMethod : public Method {
 public:
  using Method::Method;
  std::string name() const override { return "vanilla"; }

 protected:
  void run_impl(const Sample& s) override {
    require_query(s);
    set_response(call_llm({sys(ctx_.prompts->get("system_default")),
                           user(s.query)},
                          TraceKind::llm_call, "solver"));
  }
};

class CotMethod : public Method {
 public:
  CotMethod(MethodContext ctx, std::string suffix)
      : Method(std::move(ctx)), suffix_(std::move(suffix)) {}
  std::string name() const override { return "cot"; }

 protected:
  void run_impl(const Sample& s) override {
    require_query(s);
    set_response(call_llm({sys(ctx_.prompts->get("system_default")),
                           user(s.query + "\n\n" + suffix_)},
                          TraceKind::llm_call, "solver"));
  }

 private:
  std::string suffix_;
};

// ---------------------------------------------------------------------------
// Self-Consistency

class SelfConsistencyMethod : public Method {
 public:
  SelfConsistencyMethod(MethodContext ctx, int n, std::string vote)
      : Method(std::move(ctx)), n_(n), vote_(std::move(vote)) {}
  std::string name() const override { return "self_consistency"; }

 protected:
  void run_impl(const Sample& s) override {
    require_query(s);
    std::vector<std::string> solutions;
    for (int i = 0; i < n_; ++i) {
      solutions.push_back(call_llm({sys(ctx_.prompts->get("system_default")),
                                    user(s.query)},
                                   TraceKind::llm_call,
                                   "sampler_" + std::to_string(i + 1)));
    }
    if (vote_ == "exact") {
      // Literal majority over trimmed solution texts, lexicographic
      // tie-break. No aggregation call is made.
      std::map<std::string, int> counts;
      for (const auto& sol : solutions) ++counts[trim_copy(sol)];
      std::string best;
      int best_count = -1;
      for (const auto& [text, count] : counts) {
        if (count > best_count) {
          best = text;
          best_count = count;
        }
      }
      set_response(best);
      return;
    }
    std::ostringstream listing;
    for (int i = 0; i < n_; ++i) {
      listing << "Solution " << (i + 1) << ":\n" << solutions[i] << "\n\n";
    }
    std::string prompt = PromptStore::fill(
        ctx_.prompts->get("sc_aggregate"),
        {{"n", std::to_string(n_)}, {"query", s.query},
         {"solutions", listing.str()}});
    set_response(call_llm({user(prompt)}, TraceKind::aggregation, "aggregator"));
  }

 private:
  int n_;
  std::string vote_;
};

// ---------------------------------------------------------------------------
// LLM-Debate

class DebateMethod : public Method {
 public:
  DebateMethod(MethodContext ctx, int agents, int rounds)
      : Method(std::move(ctx)), agents_(agents), rounds_(rounds) {}
  std::string name() const override { return "debate"; }

 protected:
  void run_impl(const Sample& s) override {
    require_query(s);
    std::vector<std::vector<std::string>> responses(rounds_);
    for (int r = 0; r < rounds_; ++r) {
      responses[r].resize(agents_);
      for (int a = 0; a < agents_; ++a) {
        std::string agent_id = "agent_" + std::to_string(a + 1);
        std::vector<ChatMessage> msgs;
        msgs.push_back(sys(PromptStore::fill(
            ctx_.prompts->get("debate_system"), {{"agent_id", agent_id}})));
        msgs.push_back(user(s.query));
        if (r > 0) {
          // One message per peer answer, verbatim, attribution preserved.
          msgs.push_back(user(ctx_.prompts->get("debate_revise")));
          for (int p = 0; p < agents_; ++p) {
            if (p == a) continue;
            ChatMessage m = user("Agent agent_" + std::to_string(p + 1) +
                                 " said:\n" + responses[r - 1][p]);
            m.agent_id = "agent_" + std::to_string(p + 1);
            m.round = r - 1;
            msgs.push_back(std::move(m));
          }
        }
        responses[r][a] = call_llm(msgs, TraceKind::llm_call, agent_id);
      }
    }
    std::ostringstream listing;
    for (int a = 0; a < agents_; ++a) {
      listing << "Agent agent_" << (a + 1) << ":\n"
              << responses[rounds_ - 1][a] << "\n\n";
    }
    std::string prompt = PromptStore::fill(
        ctx_.prompts->get("debate_aggregate"),
        {{"query", s.query}, {"solutions", listing.str()}});
    set_response(call_llm({user(prompt)}, TraceKind::aggregation, "aggregator"));
  }

 private:
  int agents_;
  int rounds_;
};

// ---------------------------------------------------------------------------
// MAD: affirmative/negative debaters plus a judge with an early-stop tag.

class MadMethod : public Method {
 public:
  MadMethod(MethodContext ctx, int rounds)
      : Method(std::move(ctx)), rounds_(rounds) {}
  std::string name() const override { return "mad"; }

 protected:
  void run_impl(const Sample& s) override {
    require_query(s);
    std::string aff, neg;
    for (int r = 0; r < rounds_; ++r) {
      {
        std::vector<ChatMessage> msgs{sys(ctx_.prompts->get("mad_affirmative")),
                                      user(s.query)};
        if (!neg.empty()) {
          msgs.push_back(user("The negative side argued:\n" + neg));
        }
        aff = call_llm(msgs, TraceKind::llm_call, "affirmative");
      }
      {
        std::vector<ChatMessage> msgs{sys(ctx_.prompts->get("mad_negative")),
                                      user(s.query),
                                      user("The affirmative side argued:\n" + aff)};
        neg = call_llm(msgs, TraceKind::llm_call, "negative");
      }
      std::string verdict = call_llm(
          {sys(ctx_.prompts->get("mad_judge")), user(s.query),
           user("Affirmative:\n" + aff + "\n\nNegative:\n" + neg)},
          TraceKind::llm_call, "judge");
      if (has_line_equal(verdict, "<verdict>AFFIRMATIVE</verdict>") ||
          has_line_equal(verdict, "<verdict>NEGATIVE</verdict>")) {
        set_response(verdict);
        return;
      }
    }
    // Round cap hit: force a verdict.
    std::string verdict = call_llm(
        {sys(ctx_.prompts->get("mad_final")), user(s.query),
         user("Affirmative:\n" + aff + "\n\nNegative:\n" + neg)},
        TraceKind::llm_call, "judge");
    set_response(verdict);
    set_terminated(TerminatedBy::turn_limit);
  }

 private:
  int rounds_;
};

// ---------------------------------------------------------------------------
// Self-Refine

class SelfRefineMethod : public Method {
 public:
  SelfRefineMethod(MethodContext ctx, int max_iters, std::string stop_marker)
      : Method(std::move(ctx)),
        max_iters_(max_iters),
        stop_marker_(std::move(stop_marker)) {}
  std::string name() const override { return "self_refine"; }

 protected:
  void run_impl(const Sample& s) override {
    require_query(s);
    std::string current =
        call_llm({sys(ctx_.prompts->get("self_refine_generate")), user(s.query)},
                 TraceKind::llm_call, "generator");
    bool stopped = max_iters_ == 0;
    for (int i = 0; i < max_iters_; ++i) {
      std::string feedback = call_llm(
          {user(PromptStore::fill(ctx_.prompts->get("self_refine_feedback"),
                                  {{"query", s.query},
                                   {"solution", current},
                                   {"stop_marker", stop_marker_}}))},
          TraceKind::critique, "critic");
      if (feedback.find(stop_marker_) != std::string::npos) {
        stopped = true;
        break;
      }
      current = call_llm(
          {user(PromptStore::fill(ctx_.prompts->get("self_refine_refine"),
                                  {{"query", s.query},
                                   {"solution", current},
                                   {"feedback", feedback}}))},
          TraceKind::llm_call, "refiner");
    }
    set_response(current);
    if (!stopped) set_terminated(TerminatedBy::turn_limit);
  }

 private:
  int max_iters_;
  std::string stop_marker_;
};

// ---------------------------------------------------------------------------
// Reflexion (coding)

class ReflexionMethod : public Method {
 public:
  ReflexionMethod(MethodContext ctx, int max_trials)
      : Method(std::move(ctx)), max_trials_(max_trials) {}
  std::string name() const override { return "reflexion"; }

 protected:
  void run_impl(const Sample& s) override {
    require_query(s);
    if (s.domain != Domain::coding || !s.test_cases || s.test_cases->empty()) {
      throw std::invalid_argument(
          "reflexion requires a coding sample with test cases");
    }
    std::string reflection;
    std::string last_response;
    for (int trial = 0; trial < max_trials_; ++trial) {
      std::vector<ChatMessage> msgs;
      msgs.push_back(user(PromptStore::fill(
          ctx_.prompts->get("reflexion_generate"), {{"query", s.query}})));
      if (!reflection.empty()) {
        msgs.push_back(user("Reflection on the previous failed attempt:\n" +
                            reflection));
      }
      last_response = call_llm(msgs, TraceKind::llm_call, "coder");
      auto program = extract_code_block(last_response);
      std::string failure;
      if (program) {
        TestRun result = run_test_cases(*program, *s.test_cases,
                                        ctx_.interpreter_cmd,
                                        ctx_.exec_timeout_ms);
        add_tool_event("coder", *program,
                       result.passed ? "all tests passed" : result.failure_text);
        if (result.passed) {
          set_response(last_response);
          return;
        }
        failure = result.failure_text;
      } else {
        add_tool_event("coder", last_response, "no fenced code block found");
        failure = "the response contained no fenced code block";
      }
      if (trial + 1 < max_trials_) {
        reflection = call_llm(
            {user(PromptStore::fill(
                ctx_.prompts->get("reflexion_reflect"),
                {{"query", s.query},
                 {"program", program.value_or("(none)")},
                 {"failure", failure}}))},
            TraceKind::reflection, "coder");
      }
    }
    set_response(last_response);
    set_terminated(TerminatedBy::turn_limit);
  }

 private:
  int max_trials_;
};

// ---------------------------------------------------------------------------
// AgentVerse

std::vector<AgentProfile> parse_agent_profiles(const std::string& text,
                                               int expected_count) {
  std::vector<AgentProfile> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim_copy(line).empty()) continue;
    std::size_t n = out.size() + 1;
    std::string prefix = std::to_string(n) + ". ";
    if (line.rfind(prefix, 0) != 0) return {};
    std::string rest = line.substr(prefix.size());
    auto bar = rest.find(" | ");
    if (bar == std::string::npos) return {};
    AgentProfile p;
    p.agent_id = trim_copy(rest.substr(0, bar));
    p.role_description = trim_copy(rest.substr(bar + 3));
    if (p.agent_id.empty() || p.role_description.empty()) return {};
    out.push_back(std::move(p));
  }
  if (static_cast<int>(out.size()) != expected_count) return {};
  return out;
}

class AgentVerseMethod : public Method {
 public:
  AgentVerseMethod(MethodContext ctx, int recruits, int loop_turns,
                   int critic_rounds)
      : Method(std::move(ctx)),
        recruits_(recruits),
        loop_turns_(loop_turns),
        critic_rounds_(critic_rounds) {}
  std::string name() const override { return "agentverse"; }

 protected:
  void run_impl(const Sample& s) override {
    require_query(s);
    std::string last_eval;
    for (int turn = 0; turn < loop_turns_; ++turn) {
      std::string recruit_prompt = PromptStore::fill(
          ctx_.prompts->get("agentverse_recruit"),
          {{"n", std::to_string(recruits_)}, {"query", s.query}});
      std::string recruit_text =
          call_llm({user(recruit_prompt)}, TraceKind::recruitment, "recruiter");
      auto profiles = parse_agent_profiles(recruit_text, recruits_);
      if (profiles.empty()) {
        // One re-prompt, then the failure becomes measurable.
        recruit_text = call_llm(
            {user(recruit_prompt),
             user("Your previous output did not follow the required format. "
                  "Output exactly " + std::to_string(recruits_) +
                  " lines, each exactly 'N. <name> | <role description>'.")},
            TraceKind::recruitment, "recruiter");
        profiles = parse_agent_profiles(recruit_text, recruits_);
        if (profiles.empty()) {
          set_terminated(TerminatedBy::error, "format");
          return;
        }
      }
      std::ostringstream solutions;
      for (const auto& p : profiles) {
        std::string sol = call_llm(
            {user(PromptStore::fill(ctx_.prompts->get("agentverse_solve"),
                                    {{"name", p.agent_id},
                                     {"role", p.role_description},
                                     {"query", s.query}}))},
            TraceKind::llm_call, p.agent_id);
        solutions << p.agent_id << ":\n" << sol << "\n\n";
      }
      std::ostringstream discussion;
      discussion << solutions.str();
      for (int c = 0; c < critic_rounds_; ++c) {
        std::string critique = call_llm(
            {user(PromptStore::fill(ctx_.prompts->get("agentverse_critique"),
                                    {{"query", s.query},
                                     {"solutions", discussion.str()}}))},
            TraceKind::critique, "critic");
        discussion << "Critique " << (c + 1) << ":\n" << critique << "\n\n";
      }
      last_eval = call_llm(
          {user(PromptStore::fill(ctx_.prompts->get("agentverse_evaluate"),
                                  {{"query", s.query},
                                   {"discussion", discussion.str()}}))},
          TraceKind::llm_call, "evaluator");
      if (has_line_equal(last_eval, "STOP") ||
          trim_copy(last_eval).rfind("STOP", 0) == 0) {
        set_response(last_eval);
        return;
      }
    }
    set_response(last_eval);
    set_terminated(TerminatedBy::turn_limit);
  }

 private:
  int recruits_;
  int loop_turns_;
  int critic_rounds_;
};

// ---------------------------------------------------------------------------
// ReAct

class ReactMethod : public Method {
 public:
  ReactMethod(MethodContext ctx, int max_turns)
      : Method(std::move(ctx)), max_turns_(max_turns) {}
  std::string name() const override { return "react"; }

 protected:
  void run_impl(const Sample& s) override {
    require_query(s);
    if (!ctx_.tools) {
      throw std::invalid_argument("react requires a tool registry");
    }
    std::vector<ChatMessage> msgs;
    msgs.push_back(sys(PromptStore::fill(ctx_.prompts->get("react_system"),
                                         {{"tools", ctx_.tools->describe_all()}})));
    msgs.push_back(user(s.query));
    for (int turn = 0; turn < max_turns_; ++turn) {
      std::string text = call_llm(msgs, TraceKind::llm_call, "react");
      ChatMessage assistant;
      assistant.role = Role::assistant;
      assistant.content = text;
      msgs.push_back(std::move(assistant));
      auto call = parse_tool_call(text);
      if (!call) {
        msgs.push_back(user("Observation: error: no valid Action line; reply "
                            "with Action: <tool_name>[<argument>]"));
        continue;
      }
      if (call->name == "final_answer") {
        set_response(call->argument);
        return;
      }
      std::string observation = ctx_.tools->run(*call);
      add_tool_event("react", render_tool_call(*call), observation);
      msgs.push_back(user("Observation: " + observation));
    }
    // Turn cap: one best-effort final answer request.
    msgs.push_back(user(ctx_.prompts->get("react_force_final")));
    set_response(call_llm(msgs, TraceKind::llm_call, "react"));
    set_terminated(TerminatedBy::turn_limit);
  }

 private:
  int max_turns_;
};

// ---------------------------------------------------------------------------
// Registry

MethodRegistry::MethodRegistry() {
  using Kind = ParamDef::Kind;
  entries_["vanilla"] = Entry{
      {},
      [](const MethodSpec&, MethodContext ctx) -> std::unique_ptr<Method> {
        return std::make_unique<VanillaMethod>(std::move(ctx));
      }};
  entries_["cot"] = Entry{
      {{"suffix", {Kind::string, 0}}},
      [](const MethodSpec& s, MethodContext ctx) -> std::unique_ptr<Method> {
        std::string suffix = get_string(s.params, "suffix",
                                        ctx.prompts->get("cot_suffix"));
        while (!suffix.empty() && suffix.back() == '\n') suffix.pop_back();
        return std::make_unique<CotMethod>(std::move(ctx), suffix);
      }};
  entries_["self_consistency"] = Entry{
      {{"n", {Kind::integer, 1}}, {"vote", {Kind::string, 0}}},
      [](const MethodSpec& s, MethodContext ctx) -> std::unique_ptr<Method> {
        return std::make_unique<SelfConsistencyMethod>(
            std::move(ctx), static_cast<int>(get_int(s.params, "n", 3)),
            get_string(s.params, "vote", "llm"));
      }};
  entries_["debate"] = Entry{
      {{"agents", {Kind::integer, 1}}, {"rounds", {Kind::integer, 1}}},
      [](const MethodSpec& s, MethodContext ctx) -> std::unique_ptr<Method> {
        return std::make_unique<DebateMethod>(
            std::move(ctx), static_cast<int>(get_int(s.params, "agents", 3)),
            static_cast<int>(get_int(s.params, "rounds", 2)));
      }};
  entries_["mad"] = Entry{
      {{"rounds", {Kind::integer, 1}}},
      [](const MethodSpec& s, MethodContext ctx) -> std::unique_ptr<Method> {
        return std::make_unique<MadMethod>(
            std::move(ctx), static_cast<int>(get_int(s.params, "rounds", 3)));
      }};
  entries_["self_refine"] = Entry{
      {{"max_iters", {Kind::integer, 0}}, {"stop_marker", {Kind::string, 0}}},
      [](const MethodSpec& s, MethodContext ctx) -> std::unique_ptr<Method> {
        return std::make_unique<SelfRefineMethod>(
            std::move(ctx), static_cast<int>(get_int(s.params, "max_iters", 2)),
            get_string(s.params, "stop_marker", "NO ISSUES FOUND"));
      }};
  entries_["reflexion"] = Entry{
      {{"max_trials", {Kind::integer, 1}}},
      [](const MethodSpec& s, MethodContext ctx) -> std::unique_ptr<Method> {
        return std::make_unique<ReflexionMethod>(
            std::move(ctx),
            static_cast<int>(get_int(s.params, "max_trials", 3)));
      }};
  entries_["agentverse"] = Entry{
      {{"recruits", {Kind::integer, 1}},
       {"loop_turns", {Kind::integer, 1}},
       {"critic_rounds", {Kind::integer, 1}}},
      [](const MethodSpec& s, MethodContext ctx) -> std::unique_ptr<Method> {
        return std::make_unique<AgentVerseMethod>(
            std::move(ctx), static_cast<int>(get_int(s.params, "recruits", 3)),
            static_cast<int>(get_int(s.params, "loop_turns", 2)),
            static_cast<int>(get_int(s.params, "critic_rounds", 1)));
      }};
  entries_["react"] = Entry{
      {{"max_turns", {Kind::integer, 1}}},
      [](const MethodSpec& s, MethodContext ctx) -> std::unique_ptr<Method> {
        return std::make_unique<ReactMethod>(
            std::move(ctx),
            static_cast<int>(get_int(s.params, "max_turns", 12)));
      }};
}

const MethodRegistry& MethodRegistry::instance() {
  static MethodRegistry reg;
  return reg;
}

std::vector<std::string> MethodRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

void MethodRegistry::validate_spec(const MethodSpec& spec) const {
  auto it = entries_.find(spec.name);
  if (it == entries_.end()) {
    static const std::map<std::string, std::string> out_of_scope = {
        {"gptswarm", "optimization-based"}, {"adas", "optimization-based"},
        {"aflow", "optimization-based"},    {"mas-gpt", "optimization-based"},
        {"masgpt", "optimization-based"},   {"metagpt", "coding-pipeline"},
        {"chatdev", "coding-pipeline"},     {"mapcoder", "coding-pipeline"},
        {"evomac", "coding-pipeline"},      {"macm", "domain-specific"},
        {"medagents", "domain-specific"},   {"owl", "multimodal tool fleet"},
    };
    auto oos = out_of_scope.find(spec.name);
    if (oos != out_of_scope.end()) {
      throw ValidationError("method '" + spec.name + "' is out of scope (" +
                            oos->second + " methods are not supported)");
    }
    throw ValidationError("unknown method: '" + spec.name + "'");
  }
  for (const auto& [key, value] : spec.params) {
    auto pd = it->second.params.find(key);
    if (pd == it->second.params.end()) {
      throw ValidationError("method '" + spec.name + "': unknown param '" +
                            key + "'");
    }
    if (pd->second.kind == ParamDef::Kind::integer) {
      if (!value.is_number_integer()) {
        throw ValidationError("method '" + spec.name + "': param '" + key +
                              "' must be an integer");
      }
      if (value.get<std::int64_t>() < pd->second.min) {
        throw ValidationError("method '" + spec.name + "': param '" + key +
                              "' must be >= " + std::to_string(pd->second.min));
      }
    } else if (!value.is_string()) {
      throw ValidationError("method '" + spec.name + "': param '" + key +
                            "' must be a string");
    }
  }
}

std::unique_ptr<Method> MethodRegistry::create(const MethodSpec& spec,
                                               MethodContext ctx) const {
  validate_spec(spec);
  return entries_.at(spec.name).make(spec, std::move(ctx));
}

MASOutput run_method(const MethodSpec& spec, MethodContext ctx,
                     const Sample& sample) {
  auto method = MethodRegistry::instance().create(spec, std::move(ctx));
  return method->inference(sample);
}

}  // namespace masbench
