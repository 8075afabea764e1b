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

namespace masbench {

// Prompt texts live in prompts/*.txt and are embedded at build time; the
// MASBENCH_PROMPTS env var points at an override directory.
class PromptStore {
 public:
  PromptStore();

  const std::string& get(const std::string& name) const;

  // Replaces "{key}" occurrences with the mapped values.
  static std::string fill(const std::string& tmpl,
                          const std::map<std::string, std::string>& vars);

 private:
  std::map<std::string, std::string> prompts_;
};

}  // namespace masbench
