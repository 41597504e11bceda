#include "ssklab/format.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <system_error>

namespace ssklab {

std::string format_double(double x, int digits) {
    if (!std::isfinite(x)) return "null";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
    return out;
}

JsonObject& JsonObject::add(std::string_view key, double value) {
    fields_.emplace_back(std::string(key), format_double(value, digits_));
    return *this;
}

JsonObject& JsonObject::add(std::string_view key, long long value) {
    fields_.emplace_back(std::string(key), std::to_string(value));
    return *this;
}

JsonObject& JsonObject::add(std::string_view key, unsigned long long value) {
    fields_.emplace_back(std::string(key), std::to_string(value));
    return *this;
}

JsonObject& JsonObject::add(std::string_view key, bool value) {
    fields_.emplace_back(std::string(key), value ? "true" : "false");
    return *this;
}

JsonObject& JsonObject::add(std::string_view key, std::string_view value) {
    fields_.emplace_back(std::string(key), json_escape(value));
    return *this;
}

JsonObject& JsonObject::add_null(std::string_view key) {
    fields_.emplace_back(std::string(key), "null");
    return *this;
}

JsonObject& JsonObject::add_raw(std::string_view key, std::string_view raw_json) {
    fields_.emplace_back(std::string(key), std::string(raw_json));
    return *this;
}

std::string JsonObject::str() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : fields_) {
        if (!first) out += ",";
        first = false;
        out += json_escape(k);
        out += ":";
        out += v;
    }
    out += "}";
    return out;
}

}  // namespace ssklab
