#include "aggr/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

#include "aggr/core/state_path.hpp"

namespace aggr::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_name(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    });
}

} // namespace

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    auto push = [&](std::size_t end) {
        const auto item = trim(text.substr(start, end - start));
        if (item.empty()) throw ValidationError("empty item in list '" + std::string(text) + "'");
        out.emplace_back(item);
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '(') ++depth;
        else if (text[i] == ')') --depth;
        else if (text[i] == ',' && depth == 0) {
            push(i);
            start = i + 1;
        }
        if (depth < 0) throw ValidationError("unbalanced parentheses in '" + std::string(text) + "'");
    }
    if (depth != 0) throw ValidationError("unbalanced parentheses in '" + std::string(text) + "'");
    if (!trim(text).empty()) push(text.size());
    return out;
}

Config Config::parse(std::istream& is, std::string source, std::filesystem::path base_dir) {
    Config c;
    c.source_ = std::move(source);
    c.base_dir_ = std::move(base_dir);
    c.sections_[""];
    std::string section;
    std::string raw;
    std::size_t line = 0;
    auto error = [&](const std::string& msg) { return ConfigError(c.source_ + ":" + std::to_string(line) + ": " + msg); };
    while (std::getline(is, raw)) {
        ++line;
        std::string_view s = raw;
        if (const auto h = s.find_first_of("#;"); h != std::string_view::npos) s = s.substr(0, h);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw error("malformed section header '" + std::string(s) + "'");
            const auto name = trim(s.substr(1, s.size() - 2));
            if (!valid_name(name)) throw error("invalid section name '" + std::string(name) + "'");
            section = std::string(name);
            if (c.section_lines_.count(section)) throw error("section [" + section + "] appears twice");
            c.section_lines_[section] = line;
            c.sections_[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw error("expected key = value, got '" + std::string(s) + "'");
        const auto key = trim(s.substr(0, eq));
        const auto value = trim(s.substr(eq + 1));
        if (!valid_name(key)) throw error("invalid key '" + std::string(key) + "'");
        if (value.empty()) throw error("key '" + std::string(key) + "' has no value");
        auto& sec = c.sections_[section];
        if (sec.count(key)) throw error("key '" + std::string(key) + "' is set twice");
        sec.emplace(std::string(key), Entry{std::string(value), line});
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    auto dir = path.parent_path();
    if (dir.empty()) dir = std::filesystem::current_path();
    return parse(in, path.string(), dir);
}

bool Config::has_section(std::string_view section) const { return sections_.count(section) > 0; }

const Config::Entry* Config::find(std::string_view section, std::string_view key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
}

bool Config::has(std::string_view section, std::string_view key) const { return find(section, key) != nullptr; }

std::vector<std::string> Config::keys(std::string_view section) const {
    std::vector<std::string> out;
    if (const auto s = sections_.find(section); s != sections_.end())
        for (const auto& [k, v] : s->second) out.push_back(k);
    return out;
}

void Config::allow_sections(std::initializer_list<std::string_view> sections) const {
    for (const auto& [name, lineno] : section_lines_)
        if (std::find(sections.begin(), sections.end(), name) == sections.end())
            throw ConfigError(source_ + ":" + std::to_string(lineno) + ": unknown section [" + name + "]");
}

void Config::allow_keys(std::string_view section, std::initializer_list<std::string_view> keys) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return;
    for (const auto& [k, e] : s->second) {
        const bool ok = std::any_of(keys.begin(), keys.end(), [&](std::string_view a) {
            return a == k || (a.size() > 1 && a.back() == '.' && k.size() > a.size() && k.rfind(a, 0) == 0);
        });
        if (!ok) fail(section, k, "unknown key");
    }
}

void Config::fail(std::string_view section, std::string_view key, const std::string& message) const {
    const auto* e = find(section, key);
    std::string where = source_;
    if (e) where += ":" + std::to_string(e->line);
    const std::string sec = section.empty() ? "" : "[" + std::string(section) + "] ";
    throw ConfigError(where + ": " + sec + std::string(key) + ": " + message);
}

const Config::Entry& Config::require(std::string_view section, std::string_view key) const {
    if (const auto* e = find(section, key)) return *e;
    fail(section, key, "missing required key");
}

std::string Config::get_string(std::string_view section, std::string_view key, std::optional<std::string> fallback) const {
    if (!has(section, key) && fallback) return *fallback;
    return require(section, key).value;
}

double Config::get_double(std::string_view section, std::string_view key, std::optional<double> fallback) const {
    if (!has(section, key) && fallback) return *fallback;
    const auto& e = require(section, key);
    try {
        return parse_double(e.value);
    } catch (const ParseError&) {
        fail(section, key, "'" + e.value + "' is not a number");
    }
}

std::uint64_t Config::get_u64(std::string_view section, std::string_view key, std::optional<std::uint64_t> fallback) const {
    if (!has(section, key) && fallback) return *fallback;
    const auto& e = require(section, key);
    std::uint64_t v = 0;
    const auto* end = e.value.data() + e.value.size();
    const auto r = std::from_chars(e.value.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) fail(section, key, "'" + e.value + "' is not a nonnegative integer");
    return v;
}

std::size_t Config::get_size(std::string_view section, std::string_view key, std::optional<std::size_t> fallback) const {
    return static_cast<std::size_t>(get_u64(section, key, fallback));
}

bool Config::get_bool(std::string_view section, std::string_view key, std::optional<bool> fallback) const {
    if (!has(section, key) && fallback) return *fallback;
    const auto& v = require(section, key).value;
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(section, key, "'" + v + "' is not a boolean");
}

std::vector<std::string> Config::get_list(std::string_view section, std::string_view key,
                                          std::optional<std::vector<std::string>> fallback) const {
    if (!has(section, key) && fallback) return *fallback;
    const auto& e = require(section, key);
    try {
        return split_list(e.value);
    } catch (const ValidationError& ex) {
        fail(section, key, ex.what());
    }
}

std::filesystem::path Config::get_path(std::string_view section, std::string_view key,
                                       std::optional<std::filesystem::path> fallback) const {
    std::filesystem::path p;
    if (!has(section, key) && fallback) p = *fallback;
    else p = require(section, key).value;
    return p.is_absolute() ? p : base_dir_ / p;
}

} // namespace aggr::cli
