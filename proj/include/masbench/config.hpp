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

#include "masbench/gateway.hpp"
#include "masbench/types.hpp"

namespace masbench {

// INI-style config: [section] headers, key=value lines, '#' comments.
// Keys are addressed as "section.key".
class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& dotted_key) const;
  std::string get(const std::string& dotted_key,
                  const std::string& fallback = {}) const;
  std::int64_t get_int(const std::string& dotted_key, std::int64_t fallback) const;
  double get_double(const std::string& dotted_key, double fallback) const;
  // Whitespace-separated list value.
  std::vector<std::string> get_list(const std::string& dotted_key) const;

  void set(const std::string& dotted_key, const std::string& value);

  // Model settings with the standard defaults applied.
  ModelConfig model() const;
  std::vector<std::string> interpreter_cmd() const;
  std::string search_fixture_path() const;
  // Collects method.<name>.<param> entries for one method.
  ParamMap method_params(const std::string& method_name) const;

  // Effective configuration, defaults included, in file format.
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace masbench
