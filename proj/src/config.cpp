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

#include "masbench/config.hpp"

#include <fstream>
#include <sstream>

namespace masbench {

namespace {

std::string trim_copy(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return from_string(os.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim_copy(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim_copy(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) +
                       ": expected key=value");
    }
    std::string key = trim_copy(t.substr(0, eq));
    std::string value = trim_copy(t.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    }
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& dotted_key) const {
  return values_.count(dotted_key) > 0;
}

std::string Config::get(const std::string& dotted_key,
                        const std::string& fallback) const {
  auto it = values_.find(dotted_key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t Config::get_int(const std::string& dotted_key,
                             std::int64_t fallback) const {
  auto it = values_.find(dotted_key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw ParseError("config key " + dotted_key + " is not an integer: '" +
                     it->second + "'");
  }
}

double Config::get_double(const std::string& dotted_key, double fallback) const {
  auto it = values_.find(dotted_key);
  if (it == values_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ParseError("config key " + dotted_key + " is not a number: '" +
                     it->second + "'");
  }
}

std::vector<std::string> Config::get_list(const std::string& dotted_key) const {
  std::vector<std::string> out;
  std::istringstream in(get(dotted_key));
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void Config::set(const std::string& dotted_key, const std::string& value) {
  values_[dotted_key] = value;
}

ModelConfig Config::model() const {
  ModelConfig mc;
  mc.name = get("model.name", "mock-model");
  mc.base_url = get("model.base_url", "mock");
  mc.api_key_env = get("model.api_key_env", "");
  mc.temperature = get_double("model.temperature", 0.5);
  mc.max_tokens = static_cast<int>(get_int("model.max_tokens", 2048));
  mc.timeout_ms = static_cast<int>(get_int("model.timeout_ms", 120000));
  mc.max_retries = static_cast<int>(get_int("model.max_retries", 3));
  mc.validate();
  return mc;
}

std::vector<std::string> Config::interpreter_cmd() const {
  auto cmd = get_list("tools.code.interpreter_cmd");
  if (cmd.empty()) cmd = {"python3", "{file}"};
  return cmd;
}

std::string Config::search_fixture_path() const {
  return get("tools.search.fixture_path");
}

ParamMap Config::method_params(const std::string& method_name) const {
  ParamMap params;
  const std::string prefix = "method." + method_name + ".";
  for (const auto& [key, value] : values_) {
    if (key.rfind(prefix, 0) != 0) continue;
    std::string param = key.substr(prefix.size());
    // Integers stay integers; everything else is a string.
    try {
      size_t used = 0;
      std::int64_t iv = std::stoll(value, &used);
      if (used == value.size()) {
        params[param] = iv;
        continue;
      }
    } catch (const std::exception&) {
    }
    params[param] = value;
  }
  return params;
}

std::string Config::dump() const {
  ModelConfig mc = model();
  std::ostringstream os;
  os << "[model]\n";
  os << "name=" << mc.name << "\n";
  os << "base_url=" << mc.base_url << "\n";
  os << "api_key_env=" << mc.api_key_env << "\n";
  os << "temperature=" << mc.temperature << "\n";
  os << "max_tokens=" << mc.max_tokens << "\n";
  os << "timeout_ms=" << mc.timeout_ms << "\n";
  os << "max_retries=" << mc.max_retries << "\n";
  os << "\n[tools]\n";
  os << "code.interpreter_cmd=";
  bool first = true;
  for (const auto& part : interpreter_cmd()) {
    if (!first) os << " ";
    os << part;
    first = false;
  }
  os << "\n";
  os << "search.fixture_path=" << search_fixture_path() << "\n";
  bool method_header = false;
  for (const auto& [key, value] : values_) {
    if (key.rfind("method.", 0) != 0) continue;
    if (!method_header) {
      os << "\n[method]\n";
      method_header = true;
    }
    os << key.substr(7) << "=" << value << "\n";
  }
  return os.str();
}

}  // namespace masbench
