// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "codesign/errors.hpp"

namespace codesign::detail {

using nlohmann::json;

// Fail-fast key policy: every object key must be one of `allowed`.
inline void expect_keys(const json& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (key == a) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

inline json parse_json(const std::string& text, const std::string& where) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError(where + ": malformed JSON");
    return j;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for key '") + key + "'");
    }
}

template <typename T>
T get_req(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": bad value for key '" + key + "'");
    }
}

} // namespace codesign::detail
