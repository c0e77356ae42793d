#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace getin {

using json = nlohmann::json;

// Compact serialization; invalid UTF-8 is replaced rather than thrown on.
std::string dump_json(const json& value);
std::string dump_json_pretty(const json& value);

// Rejects keys outside `allowed` unless `strict` is false. `context` names the
// object in the error message.
void check_keys(const json& object, std::initializer_list<std::string_view> allowed,
                std::string_view context, bool strict = true);

std::string to_lower(std::string_view text);
std::string trim(std::string_view text);
bool icontains(std::string_view haystack, std::string_view needle);

// Lowercase, trim and collapse internal whitespace runs to one space.
std::string normalize_input(std::string_view text);

// Replaces every invalid UTF-8 sequence with U+FFFD so that all text entering
// the event log survives a JSON round trip unchanged.
std::string sanitize_utf8(std::string_view text);

// Shell-style wildcard match: '*' matches any run, '?' any single byte.
bool glob_match(std::string_view pattern, std::string_view text);

// Random identifiers drawn from the OS entropy source.
std::string random_hex(std::size_t bytes);

// 8 dash-separated groups of 3 Crockford base32 symbols (120 bits).
std::string random_survey_token();

std::int64_t now_millis();
std::string now_iso8601();

std::string read_file(const std::string& path);

}  // namespace getin
