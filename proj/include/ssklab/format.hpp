#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ssklab {

// Locale-independent shortest-form formatting with a fixed number of
// significant digits. Non-finite values become "null" in JSON contexts.
std::string format_double(double x, int digits = 17);

// Minimal flat JSON object writer. Keys are emitted in insertion order.
class JsonObject {
public:
    explicit JsonObject(int digits = 17) : digits_(digits) {}

    JsonObject& add(std::string_view key, double value);
    JsonObject& add(std::string_view key, long long value);
    JsonObject& add(std::string_view key, unsigned long long value);
    JsonObject& add(std::string_view key, int value) { return add(key, static_cast<long long>(value)); }
    JsonObject& add(std::string_view key, bool value);
    JsonObject& add(std::string_view key, std::string_view value);
    JsonObject& add(std::string_view key, const char* value) { return add(key, std::string_view(value)); }
    JsonObject& add_null(std::string_view key);
    JsonObject& add_raw(std::string_view key, std::string_view raw_json);

    std::string str() const;

private:
    int digits_;
    std::vector<std::pair<std::string, std::string>> fields_;
};

std::string json_escape(std::string_view s);

}  // namespace ssklab
