#pragma once

// Reader/writer for the small sectioned key-value text format shared by maze
// files and experiment configs:
//
//   # comment
//   key = 1.5
//   [section]
//   name = "text"
//   list = [1, 2, 3]
//   [[repeated]]
//   x1 = 0.0
//
// It is a strict subset of TOML: no dotted keys, no inline tables, no
// multi-line values.

#include <jedi/common.hpp>

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace jedi::kv {

struct Value {
    enum class Kind { number, string, boolean, array };
    Kind kind = Kind::number;
    std::string text; // raw token for numbers, unescaped contents for strings
    bool flag = false;
    std::vector<Value> items;
};

struct Entry {
    std::string key;
    Value value;
    int line = 0;
};

struct Section {
    std::string name; // "" for the root
    bool repeated = false;
    int line = 0;
    std::vector<Entry> entries;

    const Entry* find(std::string_view key) const
    {
        for (const auto& e : entries)
            if (e.key == key)
                return &e;
        return nullptr;
    }
};

struct Document {
    std::vector<Section> sections; // sections[0] is the root

    const Section& root() const { return sections.front(); }

    const Section* section(std::string_view name) const
    {
        for (const auto& s : sections)
            if (!s.repeated && s.name == name && !s.name.empty())
                return &s;
        return nullptr;
    }

    std::vector<const Section*> repeated(std::string_view name) const
    {
        std::vector<const Section*> out;
        for (const auto& s : sections)
            if (s.repeated && s.name == name)
                out.push_back(&s);
        return out;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline bool valid_key(std::string_view k)
{
    if (k.empty())
        return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
            return false;
    return true;
}

class Parser {
public:
    Parser(std::string_view text, int line, std::string_view where) : s_(text), line_(line), where_(where) {}

    Value parse_value()
    {
        skip_ws();
        if (pos_ >= s_.size())
            fail("missing value");
        char c = s_[pos_];
        if (c == '"')
            return parse_string();
        if (c == '[')
            return parse_array();
        return parse_scalar();
    }

    void expect_end()
    {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] != '#')
            fail("unexpected trailing text");
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError(std::string(where_) + ":" + std::to_string(line_) + ": " + what);
    }

    void skip_ws()
    {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r'))
            ++pos_;
    }

    Value parse_string()
    {
        Value v;
        v.kind = Value::Kind::string;
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            char c = s_[pos_++];
            if (c == '\\') {
                if (pos_ >= s_.size())
                    fail("unterminated escape");
                char e = s_[pos_++];
                switch (e) {
                case 'n': v.text += '\n'; break;
                case 't': v.text += '\t'; break;
                case '"': v.text += '"'; break;
                case '\\': v.text += '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            }
            else {
                v.text += c;
            }
        }
        if (pos_ >= s_.size())
            fail("unterminated string");
        ++pos_;
        return v;
    }

    Value parse_array()
    {
        Value v;
        v.kind = Value::Kind::array;
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return v;
        }
        while (true) {
            v.items.push_back(parse_value());
            skip_ws();
            if (pos_ >= s_.size())
                fail("unterminated array");
            if (s_[pos_] == ',') {
                ++pos_;
                skip_ws();
                if (pos_ < s_.size() && s_[pos_] == ']') {
                    ++pos_;
                    return v;
                }
                continue;
            }
            if (s_[pos_] == ']') {
                ++pos_;
                return v;
            }
            fail("expected ',' or ']' in array");
        }
    }

    Value parse_scalar()
    {
        std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' '
               && s_[pos_] != '\t' && s_[pos_] != '\r')
            ++pos_;
        std::string_view tok = s_.substr(start, pos_ - start);
        Value v;
        if (tok == "true" || tok == "false") {
            v.kind = Value::Kind::boolean;
            v.flag = tok == "true";
            v.text = std::string(tok);
            return v;
        }
        double d = 0.0;
        auto first = tok.data();
        if (!tok.empty() && tok.front() == '+')
            ++first;
        auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), d);
        if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
            fail("invalid value '" + std::string(tok) + "'");
        v.kind = Value::Kind::number;
        v.text = std::string(first, tok.data() + tok.size());
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_;
    std::string_view where_;
};

} // namespace detail

inline Document parse(std::string_view text, std::string_view where = "<input>")
{
    Document doc;
    doc.sections.push_back(Section{});
    std::set<std::string> single_sections;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = detail::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        auto err = [&](const std::string& what) {
            return ConfigError(std::string(where) + ":" + std::to_string(line_no) + ": " + what);
        };
        if (line.front() == '[') {
            bool repeated = line.starts_with("[[");
            std::size_t close = line.find(repeated ? "]]" : "]");
            if (close == std::string_view::npos)
                throw err("unterminated section header");
            std::string_view name = detail::trim(line.substr(repeated ? 2 : 1, close - (repeated ? 2 : 1)));
            std::string_view rest = detail::trim(line.substr(close + (repeated ? 2 : 1)));
            if (!rest.empty() && rest.front() != '#')
                throw err("unexpected text after section header");
            if (!detail::valid_key(name))
                throw err("invalid section name '" + std::string(name) + "'");
            if (!repeated && !single_sections.insert(std::string(name)).second)
                throw err("duplicate section [" + std::string(name) + "]");
            doc.sections.push_back(Section{std::string(name), repeated, line_no, {}});
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw err("expected 'key = value'");
        std::string key(detail::trim(line.substr(0, eq)));
        if (!detail::valid_key(key))
            throw err("invalid key '" + key + "'");
        auto& sec = doc.sections.back();
        if (sec.find(key))
            throw err("duplicate key '" + key + "'");
        detail::Parser p(line.substr(eq + 1), line_no, where);
        Value v = p.parse_value();
        p.expect_end();
        sec.entries.push_back(Entry{std::move(key), std::move(v), line_no});
    }
    return doc;
}

inline Document parse_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

/// Typed access to one section; remembers which keys were read so that
/// finish() can reject anything unknown.
class SectionReader {
public:
    SectionReader(const Section* section, std::string label) : section_(section), label_(std::move(label)) {}

    bool present() const { return section_ != nullptr; }
    bool has(std::string_view key) const { return section_ && section_->find(key); }

    std::optional<double> number(std::string_view key)
    {
        const Value* v = get(key, Value::Kind::number);
        if (!v)
            return std::nullopt;
        double d = 0.0;
        std::from_chars(v->text.data(), v->text.data() + v->text.size(), d);
        return d;
    }

    std::optional<std::int64_t> integer(std::string_view key)
    {
        const Value* v = get(key, Value::Kind::number);
        if (!v)
            return std::nullopt;
        std::int64_t i = 0;
        auto [ptr, ec] = std::from_chars(v->text.data(), v->text.data() + v->text.size(), i);
        if (ec != std::errc() || ptr != v->text.data() + v->text.size())
            throw error(key, "expected an integer");
        return i;
    }

    std::optional<std::string> string(std::string_view key)
    {
        const Value* v = get(key, Value::Kind::string);
        return v ? std::optional<std::string>(v->text) : std::nullopt;
    }

    std::optional<bool> boolean(std::string_view key)
    {
        const Value* v = get(key, Value::Kind::boolean);
        return v ? std::optional<bool>(v->flag) : std::nullopt;
    }

    std::optional<std::vector<double>> numbers(std::string_view key)
    {
        const Value* v = get(key, Value::Kind::array);
        if (!v)
            return std::nullopt;
        std::vector<double> out;
        for (const auto& item : v->items) {
            if (item.kind != Value::Kind::number)
                throw error(key, "expected an array of numbers");
            double d = 0.0;
            std::from_chars(item.text.data(), item.text.data() + item.text.size(), d);
            out.push_back(d);
        }
        return out;
    }

    std::optional<std::vector<std::int64_t>> integers(std::string_view key)
    {
        const Value* v = get(key, Value::Kind::array);
        if (!v)
            return std::nullopt;
        std::vector<std::int64_t> out;
        for (const auto& item : v->items) {
            std::int64_t i = 0;
            auto [ptr, ec] = std::from_chars(item.text.data(), item.text.data() + item.text.size(), i);
            if (item.kind != Value::Kind::number || ec != std::errc() || ptr != item.text.data() + item.text.size())
                throw error(key, "expected an array of integers");
            out.push_back(i);
        }
        return out;
    }

    template <typename T>
    T require(std::optional<T> v, std::string_view key) const
    {
        if (!v)
            throw error(key, "missing required key");
        return *v;
    }

    ConfigError error(std::string_view key, const std::string& what) const
    {
        std::string where = label_.empty() ? std::string(key) : label_ + "." + std::string(key);
        int line = 0;
        if (section_)
            if (const Entry* e = section_->find(key))
                line = e->line;
        return ConfigError("'" + where + "'" + (line ? " (line " + std::to_string(line) + ")" : "") + ": " + what);
    }

    void finish() const
    {
        if (!section_)
            return;
        for (const auto& e : section_->entries)
            if (!used_.count(e.key))
                throw ConfigError("unknown key '" + (label_.empty() ? e.key : label_ + "." + e.key) + "' (line "
                                  + std::to_string(e.line) + ")");
    }

private:
    const Value* get(std::string_view key, Value::Kind kind)
    {
        if (!section_)
            return nullptr;
        const Entry* e = section_->find(key);
        if (!e)
            return nullptr;
        used_.insert(std::string(key));
        if (e->value.kind != kind)
            throw error(key, "wrong value type");
        return &e->value;
    }

    const Section* section_;
    std::string label_;
    std::set<std::string> used_;
};

/// Shortest round-trip decimal form, independent of the C locale.
inline std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

} // namespace jedi::kv
