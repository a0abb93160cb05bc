#include "wgqed/toml_subset.hpp"

#include <cctype>
#include <cstdlib>
#include <set>

#include "wgqed/scenario.hpp"

namespace wgqed::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& msg)
{
    throw ScenarioError({{line, ErrorCode::ParseError, msg}});
}

bool bare_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'; }

struct Cursor {
    const std::string& s;
    std::size_t pos;
    int line;

    void skip_ws()
    {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool at_end_of_line()
    {
        skip_ws();
        return pos >= s.size() || s[pos] == '#';
    }
};

std::string parse_string(Cursor& c)
{
    ++c.pos; // opening quote
    std::string out;
    while (c.pos < c.s.size()) {
        char ch = c.s[c.pos++];
        if (ch == '"') return out;
        if (ch == '\\') {
            if (c.pos >= c.s.size()) break;
            char e = c.s[c.pos++];
            switch (e) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            default: fail(c.line, std::string("unsupported escape \\") + e);
            }
        } else {
            out += ch;
        }
    }
    fail(c.line, "unterminated string");
}

Value parse_value(Cursor& c);

Array parse_array(Cursor& c)
{
    ++c.pos; // '['
    Array out;
    while (true) {
        c.skip_ws();
        if (c.pos >= c.s.size()) fail(c.line, "unterminated array");
        if (c.s[c.pos] == ']') {
            ++c.pos;
            return out;
        }
        Value v = parse_value(c);
        if (v.is_array()) fail(c.line, "nested arrays are not supported");
        out.push_back(std::move(v));
        c.skip_ws();
        if (c.pos < c.s.size() && c.s[c.pos] == ',') {
            ++c.pos;
            continue;
        }
        c.skip_ws();
        if (c.pos < c.s.size() && c.s[c.pos] == ']') {
            ++c.pos;
            return out;
        }
        fail(c.line, "expected ',' or ']' in array");
    }
}

Value parse_value(Cursor& c)
{
    c.skip_ws();
    Value v;
    v.line = c.line;
    if (c.pos >= c.s.size()) fail(c.line, "missing value");
    const char ch = c.s[c.pos];
    if (ch == '"') {
        v.data = parse_string(c);
    } else if (ch == '[') {
        v.data = parse_array(c);
    } else {
        std::size_t end = c.pos;
        while (end < c.s.size() && (bare_char(c.s[end]) || c.s[end] == '+')) ++end;
        const std::string tok = c.s.substr(c.pos, end - c.pos);
        if (tok.empty()) fail(c.line, std::string("unexpected character '") + ch + "'");
        if (tok == "true" || tok == "false") {
            v.data = tok == "true";
        } else {
            const bool numeric_chars = tok.find_first_not_of("0123456789+-.eE") == std::string::npos;
            char* stop = nullptr;
            const double x = std::strtod(tok.c_str(), &stop);
            if (!numeric_chars || stop != tok.c_str() + tok.size())
                fail(c.line, "malformed value '" + tok + "'");
            v.data = x;
        }
        c.pos = end;
    }
    return v;
}

} // namespace

Document parse(const std::string& text)
{
    // Join lines inside open arrays so that multi-line arrays read as one logical line.
    struct Logical {
        std::string text;
        int line;
    };
    std::vector<Logical> lines;
    {
        std::size_t start = 0;
        int no = 0;
        std::string pending;
        int pending_line = 0;
        int depth = 0;
        while (start <= text.size()) {
            std::size_t nl = text.find('\n', start);
            if (nl == std::string::npos) nl = text.size();
            std::string raw = text.substr(start, nl - start);
            ++no;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            // Track bracket depth outside strings and comments.
            bool in_str = false;
            std::string kept;
            for (std::size_t i = 0; i < raw.size(); ++i) {
                char ch = raw[i];
                if (in_str) {
                    if (ch == '\\' && i + 1 < raw.size()) {
                        kept += ch;
                        kept += raw[++i];
                        continue;
                    }
                    if (ch == '"') in_str = false;
                } else {
                    if (ch == '#') break;
                    if (ch == '"') in_str = true;
                    if (ch == '[' && depth >= 0) ++depth;
                    if (ch == ']') --depth;
                }
                kept += ch;
            }
            if (pending.empty()) pending_line = no;
            pending += kept;
            // Table headers open and close on one line; only value arrays span lines.
            if (depth > 0 && pending.find('=') != std::string::npos) {
                pending += ' ';
            } else {
                lines.push_back({pending, pending_line});
                pending.clear();
                depth = 0;
            }
            start = nl + 1;
        }
        if (!pending.empty()) fail(pending_line, "unterminated array");
    }

    Document doc;
    doc.tables.push_back({"", false, 0, {}});
    std::set<std::string> plain_tables;
    for (const auto& lg : lines) {
        Cursor c{lg.text, 0, lg.line};
        if (c.at_end_of_line()) continue;
        if (lg.text[c.pos] == '[') {
            const bool arr = lg.text.compare(c.pos, 2, "[[") == 0;
            const std::size_t open = c.pos + (arr ? 2 : 1);
            const std::size_t close = lg.text.find(arr ? "]]" : "]", open);
            if (close == std::string::npos) fail(lg.line, "unterminated table header");
            std::string name = lg.text.substr(open, close - open);
            while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.erase(0, 1);
            while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
            if (name.empty()) fail(lg.line, "empty table name");
            for (char ch : name)
                if (!bare_char(ch)) fail(lg.line, "invalid table name '" + name + "'");
            c.pos = close + (arr ? 2 : 1);
            if (!c.at_end_of_line()) fail(lg.line, "unexpected text after table header");
            if (!arr && !plain_tables.insert(name).second) fail(lg.line, "table [" + name + "] defined twice");
            doc.tables.push_back({name, arr, lg.line, {}});
            continue;
        }

        std::string key;
        if (lg.text[c.pos] == '"') {
            key = parse_string(c);
        } else {
            const std::size_t b = c.pos;
            while (c.pos < lg.text.size() && bare_char(lg.text[c.pos])) ++c.pos;
            key = lg.text.substr(b, c.pos - b);
        }
        if (key.empty()) fail(lg.line, "expected a key");
        c.skip_ws();
        if (c.pos >= lg.text.size() || lg.text[c.pos] != '=') fail(lg.line, "expected '=' after key '" + key + "'");
        ++c.pos;
        Value v = parse_value(c);
        if (!c.at_end_of_line()) fail(lg.line, "unexpected text after value");
        auto& tab = doc.tables.back();
        for (const auto& e : tab.entries)
            if (e.key == key) fail(lg.line, "duplicate key '" + key + "'");
        tab.entries.push_back({key, std::move(v), lg.line});
    }
    return doc;
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += ch;
        }
    }
    return out + "\"";
}

} // namespace wgqed::toml
