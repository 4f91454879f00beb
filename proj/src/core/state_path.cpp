#include "aggr/core/state_path.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "aggr/core/error.hpp"

namespace aggr {

StatePath::StatePath(Partition partition, std::vector<ContractState> states)
    : partition_(std::move(partition)), states_(std::move(states)) {
    if (states_.size() != partition_.size())
        throw ValidationError("path has " + std::to_string(states_.size()) + " states for " +
                              std::to_string(partition_.size()) + " monitoring times");
    const ComponentSet cs = states_.front().components();
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (states_[i].time() != partition_[i])
            throw ValidationError("state " + std::to_string(i) + " is not aligned with the partition");
        if (!(states_[i].components() == cs))
            throw ValidationError("state " + std::to_string(i) + " carries a different component set");
    }
}

void validate_path(const StatePath& path, double rel_tol) {
    for (const auto& s : path.states()) validate_state(s, rel_tol);
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::size_t line) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ParseError("invalid number '" + std::string(text) + "'", line);
    return v;
}

namespace {

void write_header(std::ostream& os, ComponentSet cs, bool with_path) {
    if (with_path) os << "path,";
    os << "time";
    for (auto c : cs.members()) os << ',' << component_name(c);
    os << '\n';
}

void write_rows(std::ostream& os, const StatePath& path, const std::string& prefix) {
    const auto members = path.components().members();
    for (const auto& s : path.states()) {
        os << prefix << format_double(s.time());
        for (auto c : members) os << ',' << format_double(s[c]);
        os << '\n';
    }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

void write_path_csv(std::ostream& os, const StatePath& path) {
    write_header(os, path.components(), false);
    write_rows(os, path, "");
}

void write_paths_csv(std::ostream& os, const std::vector<StatePath>& paths) {
    if (paths.empty()) return;
    if (paths.size() == 1) return write_path_csv(os, paths.front());
    write_header(os, paths.front().components(), true);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (!(paths[i].components() == paths.front().components()))
            throw ValidationError("paths written to one file must share a component set");
        write_rows(os, paths[i], std::to_string(i) + ",");
    }
}

std::vector<StatePath> read_paths_csv(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<Component> cols;
    bool with_path = false;
    bool have_header = false;

    std::vector<StatePath> out;
    std::vector<ContractState> states;
    std::vector<double> times;
    std::string current_id;

    auto flush = [&] {
        if (states.empty()) return;
        try {
            out.emplace_back(Partition(std::move(times)), std::move(states));
        } catch (const ValidationError& e) {
            throw ParseError(std::string("invalid path: ") + e.what(), lineno);
        }
        states.clear();
        times.clear();
    };

    while (std::getline(is, line)) {
        ++lineno;
        std::string_view v = trim(line);
        if (v.empty() || v.front() == '#') continue;
        auto fields = split(v, ',');
        if (!have_header) {
            std::size_t first = 0;
            if (trim(fields[0]) == "path") {
                with_path = true;
                first = 1;
            }
            if (fields.size() <= first || trim(fields[first]) != "time")
                throw ParseError("path CSV header must start with 'time' (or 'path,time')", lineno);
            for (std::size_t i = first + 1; i < fields.size(); ++i) {
                auto c = parse_component(trim(fields[i]));
                if (!c) throw ParseError("unknown component '" + std::string(trim(fields[i])) + "'", lineno);
                cols.push_back(*c);
            }
            have_header = true;
            continue;
        }
        const std::size_t expect = cols.size() + 1 + (with_path ? 1 : 0);
        if (fields.size() != expect)
            throw ParseError("expected " + std::to_string(expect) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        std::size_t k = 0;
        if (with_path) {
            std::string id(trim(fields[k++]));
            if (id != current_id) {
                flush();
                current_id = id;
            }
        }
        ContractState s(parse_double(fields[k++], lineno));
        for (auto c : cols) s.set(c, parse_double(fields[k++], lineno));
        times.push_back(s.time());
        states.push_back(s);
    }
    if (!have_header) throw ParseError("empty path CSV");
    flush();
    return out;
}

} // namespace aggr
