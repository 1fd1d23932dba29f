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

#include "gmimo/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gmimo/errors.hpp"

namespace gmimo {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool valid_key(std::string_view key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    return std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ConfigError(key, "cannot parse '" + std::string(text) + "' as a number");
    }
    return value;
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> items;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        items.push_back(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text) {
    ConfigFile cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto where = "line " + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!valid_key(key)) throw ConfigError(where, "invalid key '" + key + "'");
        if (value.empty()) throw ConfigError(key, "empty value");
        if (!cfg.entries_.emplace(key, value).second) throw ConfigError(key, "given more than once");
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const std::string* ConfigFile::raw(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
}

std::optional<std::string> ConfigFile::get_string(const std::string& key) const {
    if (const auto* v = raw(key)) return *v;
    return std::nullopt;
}

std::optional<double> ConfigFile::get_double(const std::string& key) const {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    return parse_number<double>(key, *v);
}

std::optional<std::int64_t> ConfigFile::get_int(const std::string& key) const {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    return parse_number<std::int64_t>(key, *v);
}

std::optional<std::uint64_t> ConfigFile::get_uint(const std::string& key) const {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    if (trim(*v).starts_with('-')) throw ConfigError(key, "must be non-negative");
    return parse_number<std::uint64_t>(key, *v);
}

std::optional<bool> ConfigFile::get_bool(const std::string& key) const {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "yes" || *v == "on" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "off" || *v == "0") return false;
    throw ConfigError(key, "expected true or false");
}

std::optional<std::vector<double>> ConfigFile::get_double_list(const std::string& key) const {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    for (const auto item : split_list(*v)) out.push_back(parse_number<double>(key, item));
    return out;
}

std::optional<std::vector<std::string>> ConfigFile::get_string_list(const std::string& key) const {
    const auto* v = raw(key);
    if (!v) return std::nullopt;
    std::vector<std::string> out;
    for (const auto item : split_list(*v)) {
        if (item.empty()) throw ConfigError(key, "empty list item");
        out.emplace_back(item);
    }
    return out;
}

std::vector<std::string> ConfigFile::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : entries_) {
        if (!used_.count(key)) out.push_back(key);
    }
    return out;
}

}  // namespace gmimo
