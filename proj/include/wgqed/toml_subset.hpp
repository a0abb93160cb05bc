// Minimal TOML subset reader: tables, arrays of tables, scalars and flat arrays

#pragma once

#include <string>
#include <variant>
#include <vector>

namespace wgqed::toml {

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<double, bool, std::string, Array> data;
    int line{0};

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
};

struct Entry {
    std::string key;
    Value value;
    int line{0};
};

struct Table {
    std::string name; // empty for the root table
    bool is_array{false};
    int line{0};
    std::vector<Entry> entries;
};

struct Document {
    std::vector<Table> tables; // root first, then in file order
};

// Throws wgqed::ScenarioError with a ParseError diagnostic on malformed input.
Document parse(const std::string& text);

std::string quote(const std::string& s);

} // namespace wgqed::toml
