// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace gmimo {

// Flat `key = value` text. Keys are dotted paths ("array.n_modules"), `#`
// starts a comment, blank lines are ignored, a repeated key is an error.
// Lists are comma separated. Every failure is a ConfigError carrying the key
// (or "line N" for syntax errors).
class ConfigFile {
public:
    static ConfigFile parse(std::string_view text);
    static ConfigFile load(const std::filesystem::path& path);

    bool contains(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<std::int64_t> get_int(const std::string& key) const;
    std::optional<std::uint64_t> get_uint(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    std::optional<std::vector<double>> get_double_list(const std::string& key) const;
    std::optional<std::vector<std::string>> get_string_list(const std::string& key) const;

    // Keys that were never read; callers use this to reject typos.
    std::vector<std::string> unused_keys() const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

private:
    const std::string* raw(const std::string& key) const;

    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> used_;
};

}  // namespace gmimo
