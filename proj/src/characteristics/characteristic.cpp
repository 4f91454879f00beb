#include "aggr/characteristics/characteristic.hpp"

#include <array>
#include <cmath>

#include "aggr/core/error.hpp"

namespace aggr {

Characteristic::Characteristic(std::string label, std::vector<Component> components, Polynomial a,
                               std::vector<Polynomial> b)
    : label_(std::move(label)), components_(std::move(components)), a_(std::move(a)), b_(std::move(b)) {
    if (b_.size() != components_.size())
        throw ValidationError("characteristic '" + label_ + "': b has " + std::to_string(b_.size()) +
                              " entries for " + std::to_string(components_.size()) + " components");
    if (a_.constant_term() != 0.0)
        throw ValidationError("characteristic '" + label_ + "': a must satisfy a(0) = 0");
    ComponentSet declared;
    for (auto c : components_) {
        if (declared.contains(c))
            throw ValidationError("characteristic '" + label_ + "': duplicate component " +
                                  std::string(component_name(c)));
        declared.insert(c);
    }
    ComponentSet reads = a_.variables();
    for (const auto& p : b_) reads = reads | p.variables();
    if (!declared.contains_all(reads))
        throw ValidationError("characteristic '" + label_ + "': a or b reads components " +
                              (reads - declared).to_string() + " outside u");
    required_ = declared;
    compile();
}

Characteristic Characteristic::increment(std::string label, ComponentSet required, IncrementTerm g) {
    Characteristic c(std::move(label), {}, Polynomial{}, {});
    c.increment_ = std::move(g);
    c.required_ = required;
    return c;
}

void Characteristic::compile() {
    ComponentSet reads = a_.variables();
    needs_log_forward_ = a_.uses_log_forward();
    for (const auto& p : b_) {
        reads = reads | p.variables();
        needs_log_forward_ = needs_log_forward_ || p.uses_log_forward();
    }
    poly_reads_ = reads.members();
    a_compiled_ = CompiledPolynomial(a_);
    b_compiled_.clear();
    for (const auto& p : b_) b_compiled_.emplace_back(p);
}

void Characteristic::require(const ContractState& u) const {
    if (!u.components().contains_all(required_))
        throw ComponentError("characteristic '" + label_ + "' requires " + required_.to_string() +
                             ", state carries " + u.components().to_string());
}

void Characteristic::load(const ContractState& u, double* vars) const noexcept {
    for (auto c : poly_reads_) vars[index_of(c)] = u.get_or(c, 0.0);
    if (needs_log_forward_) vars[kLogForward] = std::log(u.get_or(Component::F, 0.0));
}

double Characteristic::a(const ContractState& u) const {
    require(u);
    std::array<double, kVariableCount> v{};
    load(u, v.data());
    return a_compiled_.evaluate(v.data());
}

std::vector<double> Characteristic::b(const ContractState& u) const {
    require(u);
    std::array<double, kVariableCount> v{};
    load(u, v.data());
    std::vector<double> out;
    out.reserve(b_compiled_.size());
    for (const auto& p : b_compiled_) out.push_back(p.evaluate(v.data()));
    return out;
}

double Characteristic::operator()(const ContractState& ur, const ContractState& us) const {
    require(ur);
    require(us);
    std::array<double, kVariableCount> vr{}, vs{};
    load(ur, vr.data());
    load(us, vs.data());
    double f = a_compiled_.evaluate(vs.data()) - a_compiled_.evaluate(vr.data());
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const Component c = components_[j];
        f += b_compiled_[j].evaluate(vr.data()) * (us.get_or(c, 0.0) - ur.get_or(c, 0.0));
    }
    if (increment_) f += increment_(ur, us);
    return f;
}

Characteristic Characteristic::with_b(std::vector<Polynomial> b, std::string label) const {
    if (!aggregating()) throw ValidationError("cannot replace b of an increment characteristic");
    return Characteristic(std::move(label), components_, a_, std::move(b));
}

double eval_characteristic(const Characteristic& c, const ContractState& ur, const ContractState& us) {
    return c(ur, us);
}

double realise(const Characteristic& c, const StatePath& path) {
    if (path.size() < 2) throw ValidationError("realise needs a path with at least two states");
    const auto& st = path.states();
    c.require(st.front());
    std::array<double, kVariableCount> v{};
    c.load(st.front(), v.data());
    const double a0 = c.a_compiled_.evaluate(v.data());
    double bsum = 0.0;
    double gsum = 0.0;
    for (std::size_t i = 1; i < st.size(); ++i) {
        if (!c.b_compiled_.empty()) {
            c.load(st[i - 1], v.data());
            for (std::size_t j = 0; j < c.components_.size(); ++j) {
                const Component comp = c.components_[j];
                bsum += c.b_compiled_[j].evaluate(v.data()) * (st[i].get_or(comp, 0.0) - st[i - 1].get_or(comp, 0.0));
            }
        }
        if (c.increment_) gsum += c.increment_(st[i - 1], st[i]);
    }
    c.load(st.back(), v.data());
    return c.a_compiled_.evaluate(v.data()) - a0 + bsum + gsum;
}

double realise_fixed_b(const Characteristic& c, const StatePath& path) {
    if (path.size() < 2) throw ValidationError("realise needs a path with at least two states");
    const auto& st = path.states();
    c.require(st.front());
    std::array<double, kVariableCount> v{};
    c.load(st.front(), v.data());
    const double a0 = c.a_compiled_.evaluate(v.data());
    double bsum = 0.0;
    for (std::size_t j = 0; j < c.components_.size(); ++j) {
        const Component comp = c.components_[j];
        bsum += c.b_compiled_[j].evaluate(v.data()) * (st.back().get_or(comp, 0.0) - st.front().get_or(comp, 0.0));
    }
    double gsum = 0.0;
    if (c.increment_)
        for (std::size_t i = 1; i < st.size(); ++i) gsum += c.increment_(st[i - 1], st[i]);
    c.load(st.back(), v.data());
    return c.a_compiled_.evaluate(v.data()) - a0 + bsum + gsum;
}

} // namespace aggr
