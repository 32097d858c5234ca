// Copyright 2026 the kgqa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa {

/// Error with a stable machine-readable code ("unbalanced-parens",
/// "no-triple-for-relation", ...) next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, bool retryable = false)
        : std::runtime_error(code + ": " + message),
          code_(std::move(code)),
          retryable_(retryable) {}

    const std::string& code() const noexcept { return code_; }
    bool retryable() const noexcept { return retryable_; }

private:
    std::string code_;
    bool retryable_;
};

enum class ValueKind { entity, literal };

/// A KG value: an entity id or a literal. Literals and entities with the
/// same text are distinct values.
struct Value {
    std::string text;
    ValueKind kind = ValueKind::entity;

    auto operator<=>(const Value&) const = default;
};

inline Value entity_value(std::string id) { return {std::move(id), ValueKind::entity}; }
inline Value literal_value(std::string v) { return {std::move(v), ValueKind::literal}; }

using AnswerSet = std::set<Value>;

/// Texts of an answer set, for metric comparison against gold ids.
inline std::set<std::string> answer_texts(const AnswerSet& a) {
    std::set<std::string> out;
    for (const auto& v : a) out.insert(v.text);
    return out;
}

namespace str {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

/// Lowercase + runs of whitespace collapsed to one space + trimmed.
/// The normal form used for paraphrase distinctness and dedup keys.
inline std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_ws = true;  // swallow leading whitespace
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out.push_back(' ');
        in_ws = false;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out.push_back(c);
    }
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return false;
    return lower(haystack).find(lower(needle)) != std::string::npos;
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    if (from.empty()) return s;
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

/// Whole-string numeric parse; trailing garbage makes it fail.
inline std::optional<double> to_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') ++begin;  // from_chars rejects a leading '+'
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

inline bool is_numeric(std::string_view s) { return to_number(s).has_value(); }

}  // namespace str
}  // namespace kgqa
