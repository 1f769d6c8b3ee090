#include "xpinnlab/toml.hpp"

#include "xpinnlab/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace xpinnlab::toml {

double Value::as_double() const {
    if (kind == Kind::Float) return number;
    if (kind == Kind::Integer) return static_cast<double>(integer);
    throw ParseError("value is not numeric");
}

std::int64_t Value::as_integer() const {
    if (kind == Kind::Integer) return integer;
    throw ParseError("value is not an integer");
}

bool Document::has(const std::string& section, const std::string& key) const {
    const Table* t = &root;
    if (!section.empty()) {
        auto it = tables.find(section);
        if (it == tables.end()) return false;
        t = &it->second;
    }
    return t->count(key) > 0;
}

const Value& Document::get(const std::string& section, const std::string& key) const {
    const Table* t = &root;
    if (!section.empty()) {
        auto it = tables.find(section);
        if (it == tables.end()) throw ParseError("missing table [" + section + "]");
        t = &it->second;
    }
    auto it = t->find(key);
    if (it == t->end())
        throw ParseError("missing key '" + key + "'" +
                         (section.empty() ? "" : " in [" + section + "]"));
    return it->second;
}

namespace {

struct Cursor {
    std::string name;
    std::size_t line = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError(name + ":" + std::to_string(line) + ": " + why);
    }
};

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

/// Drop a # comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool bare_key(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

std::string parse_basic_string(const std::string& s, const Cursor& at) {
    // s includes the surrounding quotes
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c == '\\') {
            if (i + 2 >= s.size()) at.fail("dangling escape in string");
            ++i;
            switch (s[i]) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            default: at.fail(std::string("unsupported escape \\") + s[i]);
            }
        } else if (c == '"') {
            at.fail("unescaped quote inside string");
        } else {
            out += c;
        }
    }
    return out;
}

bool integer_like(const std::string& s) {
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

Value parse_value(const std::string& raw, const Cursor& at);

std::vector<std::string> split_array(const std::string& inner, const Cursor& at) {
    std::vector<std::string> items;
    std::string cur;
    bool quoted = false;
    int depth = 0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        char c = inner[i];
        if (c == '"' && (i == 0 || inner[i - 1] != '\\')) quoted = !quoted;
        if (!quoted) {
            if (c == '[') ++depth;
            if (c == ']') --depth;
            if (c == ',' && depth == 0) {
                items.push_back(cur);
                cur.clear();
                continue;
            }
        }
        cur += c;
    }
    if (quoted || depth != 0) at.fail("unterminated array");
    if (!trim(cur).empty()) items.push_back(cur);
    return items;
}

Value parse_value(const std::string& raw, const Cursor& at) {
    const std::string s = trim(raw);
    if (s.empty()) at.fail("empty value");
    Value v;
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') at.fail("unterminated string");
        v.kind = Value::Kind::String;
        v.str = parse_basic_string(s, at);
        return v;
    }
    if (s == "true" || s == "false") {
        v.kind = Value::Kind::Boolean;
        v.boolean = (s == "true");
        return v;
    }
    if (s.front() == '[') {
        if (s.back() != ']') at.fail("unterminated array");
        v.kind = Value::Kind::Array;
        for (const auto& item : split_array(s.substr(1, s.size() - 2), at)) {
            Value element = parse_value(item, at);
            if (element.kind == Value::Kind::Array) at.fail("nested arrays are not supported");
            v.array.push_back(std::move(element));
        }
        return v;
    }
    if (integer_like(s)) {
        v.kind = Value::Kind::Integer;
        errno = 0;
        char* end = nullptr;
        v.integer = std::strtoll(s.c_str(), &end, 10);
        if (errno != 0 || end != s.c_str() + s.size()) at.fail("integer out of range: " + s);
        return v;
    }
    {
        errno = 0;
        char* end = nullptr;
        const double d = std::strtod(s.c_str(), &end);
        if (errno == 0 && end == s.c_str() + s.size() && std::isfinite(d)) {
            v.kind = Value::Kind::Float;
            v.number = d;
            return v;
        }
    }
    at.fail("cannot parse value: " + s);
}

} // namespace

Document parse_string(const std::string& text, const std::string& name) {
    Document doc;
    Table* current = &doc.root;
    std::string current_name;
    Cursor at{name, 0};
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++at.line;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') at.fail("unterminated table header");
            const std::string tname = trim(line.substr(1, line.size() - 2));
            if (!bare_key(tname)) at.fail("invalid table name: [" + tname + "]");
            if (doc.tables.count(tname)) at.fail("duplicate table [" + tname + "]");
            current = &doc.tables[tname];
            current_name = tname;
            continue;
        }
        const std::size_t eq = [&] {
            bool quoted = false;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') quoted = !quoted;
                if (line[i] == '=' && !quoted) return i;
            }
            return std::string::npos;
        }();
        if (eq == std::string::npos) at.fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!bare_key(key)) at.fail("invalid key: '" + key + "'");
        if (current->count(key))
            at.fail("duplicate key '" + key + "'" +
                    (current_name.empty() ? "" : " in [" + current_name + "]"));
        (*current)[key] = parse_value(line.substr(eq + 1), at);
    }
    return doc;
}

Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

} // namespace xpinnlab::toml
