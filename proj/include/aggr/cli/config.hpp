#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aggr/core/error.hpp"

namespace aggr::cli {

/// A config problem; the message carries file, line and key where known.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// key = value lines grouped under [section] headers; keys before the first header live in section "".
/// Keys may appear once per section. '#' and ';' start comments.
class Config {
public:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };

    static Config parse(std::istream& is, std::string source = "<config>",
                        std::filesystem::path base_dir = std::filesystem::current_path());
    static Config load(const std::filesystem::path& path);

    bool has_section(std::string_view section) const;
    bool has(std::string_view section, std::string_view key) const;
    const Entry* find(std::string_view section, std::string_view key) const;
    /// Every key of a section, e.g. for prefix families like target.LV.
    std::vector<std::string> keys(std::string_view section) const;

    /// Throws ConfigError for any section not in `sections`.
    void allow_sections(std::initializer_list<std::string_view> sections) const;
    /// Throws ConfigError for keys of `section` that are neither in `keys` nor start with a listed prefix
    /// ending in '.'.
    void allow_keys(std::string_view section, std::initializer_list<std::string_view> keys) const;

    std::string get_string(std::string_view section, std::string_view key, std::optional<std::string> fallback = {}) const;
    double get_double(std::string_view section, std::string_view key, std::optional<double> fallback = {}) const;
    std::size_t get_size(std::string_view section, std::string_view key, std::optional<std::size_t> fallback = {}) const;
    std::uint64_t get_u64(std::string_view section, std::string_view key, std::optional<std::uint64_t> fallback = {}) const;
    bool get_bool(std::string_view section, std::string_view key, std::optional<bool> fallback = {}) const;
    /// Comma-separated items; commas inside parentheses do not split.
    std::vector<std::string> get_list(std::string_view section, std::string_view key,
                                      std::optional<std::vector<std::string>> fallback = {}) const;
    /// Relative paths resolve against the config file's directory.
    std::filesystem::path get_path(std::string_view section, std::string_view key,
                                   std::optional<std::filesystem::path> fallback = {}) const;

    /// "source:line: [section] key: message"
    [[noreturn]] void fail(std::string_view section, std::string_view key, const std::string& message) const;

    const std::string& source() const noexcept { return source_; }

private:
    const Entry& require(std::string_view section, std::string_view key) const;

    std::string source_;
    std::filesystem::path base_dir_;
    std::map<std::string, std::map<std::string, Entry, std::less<>>, std::less<>> sections_;
    std::map<std::string, std::size_t, std::less<>> section_lines_;
};

/// Splits on top-level commas and trims each item; empty items are errors.
std::vector<std::string> split_list(std::string_view text);

} // namespace aggr::cli
