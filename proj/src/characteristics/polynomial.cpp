#include "aggr/characteristics/polynomial.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "aggr/core/error.hpp"
#include "aggr/core/state_path.hpp"

namespace aggr {

namespace {

constexpr int kMaxPower = 100;

double ipow(double x, int p) noexcept {
    const bool neg = p < 0;
    unsigned n = static_cast<unsigned>(neg ? -p : p);
    double r = 1.0;
    while (n) {
        if (n & 1u) r *= x;
        x *= x;
        n >>= 1u;
    }
    return neg ? 1.0 / r : r;
}

std::string variable_name(std::size_t var) {
    return var == kLogForward ? std::string("ln(F)") : std::string(component_name(kAllComponents[var]));
}

Polynomial::Exponents zero_exponents() { return Polynomial::Exponents{}; }

} // namespace

Polynomial Polynomial::constant(double c) {
    Polynomial p;
    return p.add_term(c, zero_exponents());
}

Polynomial Polynomial::variable(Component c, int power) {
    auto e = zero_exponents();
    e[index_of(c)] = static_cast<std::int8_t>(power);
    Polynomial p;
    return p.add_term(1.0, e);
}

Polynomial Polynomial::log_forward(int power) {
    auto e = zero_exponents();
    e[kLogForward] = static_cast<std::int8_t>(power);
    Polynomial p;
    return p.add_term(1.0, e);
}

Polynomial& Polynomial::add_term(double coeff, const Exponents& e) {
    if (e[kLogForward] < 0) throw UnsupportedFormError("negative powers of ln(F) are not supported");
    if (!std::isfinite(coeff)) throw ValidationError("polynomial coefficients must be finite");
    if (coeff == 0.0) return *this;
    auto [it, inserted] = terms_.try_emplace(e, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) terms_.erase(it);
    }
    return *this;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(c, e);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(-c, e);
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            Polynomial::Exponents e{};
            for (std::size_t v = 0; v < kVariableCount; ++v) {
                const int p = ea[v] + eb[v];
                if (std::abs(p) > kMaxPower) throw ValidationError("polynomial exponent out of range");
                e[v] = static_cast<std::int8_t>(p);
            }
            r.add_term(ca * cb, e);
        }
    return r;
}

double Polynomial::evaluate(const ContractState& s) const {
    std::array<double, kVariableCount> vars{};
    load_variables(s, variables(), uses_log_forward(), vars.data());
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (std::size_t v = 0; v < kVariableCount; ++v)
            if (e[v]) t *= ipow(vars[v], e[v]);
        acc += t;
    }
    return acc;
}

Polynomial Polynomial::derivative(Component c) const {
    const std::size_t ci = index_of(c);
    Polynomial r;
    for (const auto& [e, coeff] : terms_) {
        if (e[ci] != 0) {
            auto d = e;
            d[ci] = static_cast<std::int8_t>(e[ci] - 1);
            r.add_term(coeff * e[ci], d);
        }
        if (c == Component::F && e[kLogForward] > 0) {
            // d/dF ln(F)^k = k ln(F)^(k-1) / F
            auto d = e;
            d[kLogForward] = static_cast<std::int8_t>(e[kLogForward] - 1);
            d[ci] = static_cast<std::int8_t>(e[ci] - 1);
            r.add_term(coeff * e[kLogForward], d);
        }
    }
    return r;
}

ComponentSet Polynomial::variables() const {
    ComponentSet s;
    for (const auto& [e, c] : terms_) {
        for (std::size_t v = 0; v < kComponentCount; ++v)
            if (e[v]) s.insert(kAllComponents[v]);
        if (e[kLogForward]) s.insert(Component::F);
    }
    return s;
}

bool Polynomial::uses_log_forward() const {
    for (const auto& [e, c] : terms_)
        if (e[kLogForward]) return true;
    return false;
}

double Polynomial::constant_term() const {
    auto it = terms_.find(zero_exponents());
    return it == terms_.end() ? 0.0 : it->second;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        double mag = c;
        if (first) {
            first = false;
        } else {
            out += c < 0 ? " - " : " + ";
            mag = std::abs(c);
        }
        out += format_double(mag);
        for (std::size_t v = 0; v < kVariableCount; ++v) {
            if (!e[v]) continue;
            out += " * " + variable_name(v);
            if (e[v] != 1) out += "^" + std::to_string(e[v]);
        }
    }
    return out;
}

namespace {

class PolyParser {
public:
    explicit PolyParser(std::string_view s) : s_(s) {}

    Polynomial parse() {
        Polynomial p;
        skip();
        double sign = 1.0;
        if (peek('-')) {
            ++pos_;
            sign = -1.0;
        } else if (peek('+')) {
            ++pos_;
        }
        term(p, sign);
        for (;;) {
            skip();
            if (pos_ >= s_.size()) break;
            if (peek('+')) sign = 1.0;
            else if (peek('-')) sign = -1.0;
            else fail("expected '+' or '-'");
            ++pos_;
            term(p, sign);
        }
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw UnsupportedFormError("polynomial '" + std::string(s_) + "': " + what + " at offset " +
                                   std::to_string(pos_));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

    void term(Polynomial& p, double sign) {
        double coeff = sign;
        Polynomial::Exponents e{};
        for (;;) {
            skip();
            factor(coeff, e);
            skip();
            if (!peek('*')) break;
            ++pos_;
        }
        p.add_term(coeff, e);
    }

    void factor(double& coeff, Polynomial::Exponents& e) {
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (res.ec != std::errc{}) fail("bad number");
            pos_ = static_cast<std::size_t>(res.ptr - s_.data());
            coeff *= v;
            return;
        }
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string_view name = s_.substr(start, pos_ - start);
        std::size_t var;
        if (name == "ln") {
            skip();
            if (!peek('(')) fail("expected '(' after ln");
            ++pos_;
            skip();
            if (!(peek('F'))) fail("only ln(F) is supported");
            ++pos_;
            skip();
            if (!peek(')')) fail("expected ')'");
            ++pos_;
            var = kLogForward;
        } else {
            auto comp = parse_component(name);
            if (!comp) fail("unknown symbol '" + std::string(name) + "'");
            var = index_of(*comp);
        }
        int power = 1;
        skip();
        if (peek('^')) {
            ++pos_;
            skip();
            int v = 0;
            auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (res.ec != std::errc{}) fail("bad exponent");
            pos_ = static_cast<std::size_t>(res.ptr - s_.data());
            power = v;
        }
        const int total = e[var] + power;
        if (std::abs(total) > kMaxPower) fail("exponent out of range");
        e[var] = static_cast<std::int8_t>(total);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

Polynomial Polynomial::parse(std::string_view text) {
    return PolyParser(text).parse();
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) {
    for (const auto& [e, c] : p.terms()) {
        Term t{c, static_cast<std::uint32_t>(factors_.size()), 0};
        for (std::size_t v = 0; v < kVariableCount; ++v)
            if (e[v]) {
                factors_.push_back({static_cast<std::uint8_t>(v), e[v]});
                ++t.count;
            }
        terms_.push_back(t);
    }
}

double CompiledPolynomial::evaluate(const double* vars) const noexcept {
    double acc = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (std::uint32_t k = 0; k < t.count; ++k) {
            const auto& f = factors_[t.first + k];
            v *= f.power == 1 ? vars[f.var] : ipow(vars[f.var], f.power);
        }
        acc += v;
    }
    return acc;
}

void load_variables(const ContractState& s, ComponentSet needed, bool with_log_forward, double* vars) {
    for (auto c : needed.members()) vars[index_of(c)] = s[c];
    if (with_log_forward) vars[kLogForward] = std::log(s[Component::F]);
}

std::vector<Polynomial> jacobian(const Polynomial& a, std::span<const Component> components) {
    std::vector<Polynomial> out;
    out.reserve(components.size());
    for (auto c : components) out.push_back(a.derivative(c));
    return out;
}

std::vector<Polynomial> b_star(const Polynomial& a, std::span<const Component> components) {
    auto j = jacobian(a, components);
    for (auto& p : j) p = -p;
    return j;
}

} // namespace aggr
