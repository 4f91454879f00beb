#include "aggr/characteristics/spec_io.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "aggr/core/error.hpp"

namespace aggr {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

std::string format_characteristic(const Characteristic& c) {
    if (!c.aggregating())
        throw ValidationError("characteristic '" + c.label() + "' has a kernel term and no text form");
    std::string out = "label = " + c.label() + "\ncomponents = ";
    for (std::size_t j = 0; j < c.components().size(); ++j) {
        if (j) out += ", ";
        out += component_name(c.components()[j]);
    }
    out += "\na = " + c.a_polynomial().to_string() + "\n";
    for (std::size_t j = 0; j < c.components().size(); ++j)
        out += "b." + std::string(component_name(c.components()[j])) + " = " + c.b_polynomials()[j].to_string() +
               "\n";
    return out;
}

Characteristic parse_characteristic(std::string_view text) {
    std::optional<std::string> label;
    std::optional<std::vector<Component>> comps;
    std::optional<Polynomial> a;
    std::map<Component, std::pair<Polynomial, std::size_t>> b;

    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", lineno);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        try {
            if (key == "label") {
                if (label) throw ParseError("duplicate 'label'", lineno);
                if (value.empty()) throw ParseError("empty label", lineno);
                label = std::string(value);
            } else if (key == "components") {
                if (comps) throw ParseError("duplicate 'components'", lineno);
                comps.emplace();
                std::size_t p = 0;
                while (p <= value.size()) {
                    const auto comma = value.find(',', p);
                    const auto name =
                        trim(value.substr(p, comma == std::string_view::npos ? std::string_view::npos : comma - p));
                    p = comma == std::string_view::npos ? value.size() + 1 : comma + 1;
                    auto c = parse_component(name);
                    if (!c) throw ParseError("unknown component '" + std::string(name) + "'", lineno);
                    comps->push_back(*c);
                }
            } else if (key == "a") {
                if (a) throw ParseError("duplicate 'a'", lineno);
                a = Polynomial::parse(value);
            } else if (key.substr(0, 2) == "b.") {
                auto c = parse_component(key.substr(2));
                if (!c) throw ParseError("unknown component in '" + std::string(key) + "'", lineno);
                if (b.count(*c)) throw ParseError("duplicate '" + std::string(key) + "'", lineno);
                b.emplace(*c, std::make_pair(Polynomial::parse(value), lineno));
            } else {
                throw ParseError("unknown key '" + std::string(key) + "'", lineno);
            }
        } catch (const UnsupportedFormError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    if (!label) throw ParseError("missing 'label'");
    if (!comps) throw ParseError("missing 'components'");
    if (!a) throw ParseError("missing 'a'");

    std::vector<Polynomial> bv(comps->size());
    for (auto& [c, entry] : b) {
        std::size_t j = 0;
        while (j < comps->size() && (*comps)[j] != c) ++j;
        if (j == comps->size())
            throw ParseError("b." + std::string(component_name(c)) + " names a component outside u", entry.second);
        bv[j] = entry.first;
    }
    return Characteristic(*label, *comps, *a, std::move(bv));
}

Characteristic load_characteristic(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_characteristic(ss.str());
}

void save_characteristic(const Characteristic& c, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw ValidationError("cannot write " + file.string());
    out << format_characteristic(c);
}

} // namespace aggr
