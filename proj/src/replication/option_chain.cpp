#include "aggr/replication/option_chain.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>

#include "aggr/core/error.hpp"
#include "aggr/core/state_path.hpp"

namespace aggr {

OptionChain::OptionChain(double forward, double maturity, std::vector<double> strikes, std::vector<double> prices)
    : forward_(forward), maturity_(maturity), strikes_(std::move(strikes)), prices_(std::move(prices)) {
    if (!(forward_ > 0.0) || !std::isfinite(forward_)) throw ValidationError("forward must be positive");
    if (!(maturity_ > 0.0) || !std::isfinite(maturity_)) throw ValidationError("maturity must be positive");
    if (strikes_.size() != prices_.size())
        throw ValidationError("chain has " + std::to_string(strikes_.size()) + " strikes and " +
                              std::to_string(prices_.size()) + " prices");
    if (strikes_.size() < 2) throw ValidationError("chain needs at least two strikes");
    for (std::size_t i = 0; i < strikes_.size(); ++i) {
        if (!(strikes_[i] > 0.0) || !std::isfinite(strikes_[i]))
            throw ValidationError("strike " + std::to_string(i) + " must be positive");
        if (i && !(strikes_[i] > strikes_[i - 1]))
            throw ValidationError("strikes must be strictly increasing (index " + std::to_string(i) + ")");
        if (!(prices_[i] >= 0.0) || !std::isfinite(prices_[i]))
            throw ValidationError("price at strike " + format_double(strikes_[i]) + " must be nonnegative");
    }
    const double top = *std::max_element(prices_.begin(), prices_.end());
    if (top > 0.0) {
        if (prices_.front() >= 1e-3 * top)
            warnings_.push_back("price at lowest strike " + format_double(strikes_.front()) +
                                " is not negligible; the grid may truncate the left tail");
        if (prices_.back() >= 1e-3 * top)
            warnings_.push_back("price at highest strike " + format_double(strikes_.back()) +
                                " is not negligible; the grid may truncate the right tail");
    }
    if (forward_ < strikes_.front() || forward_ > strikes_.back())
        warnings_.push_back("forward lies outside the strike range");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

OptionChain read_chain_csv(std::istream& is) {
    std::optional<double> forward, maturity;
    bool header = false;
    std::vector<double> k, q;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            line.remove_prefix(1);
            std::size_t pos = 0;
            while (pos < line.size()) {
                while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
                auto end = pos;
                while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
                const auto tok = line.substr(pos, end - pos);
                pos = end;
                const auto eq = tok.find('=');
                if (eq == std::string_view::npos) continue;
                const auto key = tok.substr(0, eq);
                if (key == "forward") forward = parse_double(tok.substr(eq + 1), lineno);
                else if (key == "maturity") maturity = parse_double(tok.substr(eq + 1), lineno);
            }
            continue;
        }
        if (!header) {
            std::string h(line);
            h.erase(std::remove_if(h.begin(), h.end(), [](unsigned char c) { return std::isspace(c); }), h.end());
            if (h != "strike,price") throw ParseError("expected header 'strike,price'", lineno);
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            throw ParseError("expected two fields 'strike,price'", lineno);
        const double kk = parse_double(line.substr(0, comma), lineno);
        const double qq = parse_double(line.substr(comma + 1), lineno);
        if (!k.empty() && kk == k.back()) throw ParseError("duplicate strike " + format_double(kk), lineno);
        if (!k.empty() && kk < k.back()) throw ParseError("strikes are not sorted ascending", lineno);
        if (!(kk > 0.0)) throw ParseError("strike must be positive", lineno);
        if (!(qq >= 0.0)) throw ParseError("price must be nonnegative", lineno);
        k.push_back(kk);
        q.push_back(qq);
    }
    if (!forward || !maturity) throw ParseError("missing '# forward=<f> maturity=<T>' metadata line");
    if (!header) throw ParseError("missing 'strike,price' header");
    try {
        return OptionChain(*forward, *maturity, std::move(k), std::move(q));
    } catch (const ValidationError& e) {
        throw ParseError(e.what());
    }
}

void write_chain_csv(std::ostream& os, const OptionChain& chain) {
    os << "# forward=" << format_double(chain.forward()) << " maturity=" << format_double(chain.maturity()) << '\n';
    os << "strike,price\n";
    for (std::size_t i = 0; i < chain.size(); ++i)
        os << format_double(chain.strikes()[i]) << ',' << format_double(chain.prices()[i]) << '\n';
}

} // namespace aggr
