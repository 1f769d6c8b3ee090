#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace xpinnlab::toml {

/// Just the TOML subset the run configs use: one level of [tables],
/// key = value lines with strings, integers, floats, booleans, and flat
/// arrays of those, plus # comments.
struct Value {
    enum class Kind { String, Integer, Float, Boolean, Array };
    Kind kind = Kind::String;
    std::string str;
    std::int64_t integer = 0;
    double number = 0.0;
    bool boolean = false;
    std::vector<Value> array;

    bool is_number() const { return kind == Kind::Integer || kind == Kind::Float; }
    double as_double() const;
    std::int64_t as_integer() const;
};

using Table = std::map<std::string, Value>;

struct Document {
    Table root;
    std::map<std::string, Table> tables;

    bool has(const std::string& section, const std::string& key) const;
    /// Value lookup; empty section name addresses the root table.
    const Value& get(const std::string& section, const std::string& key) const;
};

Document parse_string(const std::string& text, const std::string& name);
Document parse_file(const std::string& path);

} // namespace xpinnlab::toml
