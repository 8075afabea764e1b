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

#include "masbench/prompts.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace masbench {

namespace detail {
const std::map<std::string, std::string>& embedded_prompts();
}

PromptStore::PromptStore() : prompts_(detail::embedded_prompts()) {
  if (const char* dir = std::getenv("MASBENCH_PROMPTS")) {
    namespace fs = std::filesystem;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.path().extension() != ".txt") continue;
      std::ifstream in(entry.path());
      std::ostringstream os;
      os << in.rdbuf();
      prompts_[entry.path().stem().string()] = os.str();
    }
  }
}

const std::string& PromptStore::get(const std::string& name) const {
  auto it = prompts_.find(name);
  if (it == prompts_.end()) {
    throw std::out_of_range("unknown prompt: " + name);
  }
  return it->second;
}

std::string PromptStore::fill(const std::string& tmpl,
                              const std::map<std::string, std::string>& vars) {
  std::string out = tmpl;
  for (const auto& [key, value] : vars) {
    const std::string needle = "{" + key + "}";
    size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
      out.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }
  return out;
}

}  // namespace masbench
