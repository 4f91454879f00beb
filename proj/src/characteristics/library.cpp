#include "aggr/characteristics/library.hpp"

#include <cmath>

#include "aggr/core/error.hpp"
#include "aggr/kernels/kernels.hpp"

namespace aggr {

double lambda_kernel(double dy) noexcept { return kernels::lambda(dy); }
double eta_kernel(double dy) noexcept { return kernels::eta(dy); }
double tau_kernel(double dy) noexcept { return kernels::tau(dy); }
double rho_term(double dv_eta, double dy) noexcept { return 3.0 * dv_eta * std::expm1(dy); }

double power_return(double dy, int p) {
    switch (p) {
    case 2: return dy * dy;
    case 3: return dy * dy * dy;
    case 4: return (dy * dy) * (dy * dy);
    default: throw ValidationError("power return order must be 2, 3 or 4, got " + std::to_string(p));
    }
}

MomentSpec::MomentSpec(int n) : n_(n) {
    if (n < 1 || n > 3) throw ValidationError("moment order n must be in {1, 2, 3}, got " + std::to_string(n));
}

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// (-Y)^k as a polynomial term.
Polynomial neg_y_pow(int k) { return Polynomial::variable(Component::Y, k) * ((k % 2) ? -1.0 : 1.0); }

Polynomial pk(int i) { return Polynomial::variable(power_component(i)); }

} // namespace

std::vector<Component> moment_components(const MomentSpec& spec) {
    std::vector<Component> u{Component::Y};
    for (int i = 2; i <= spec.n(); ++i) u.push_back(power_component(i));
    return u;
}

Polynomial moment_a(const MomentSpec& spec) {
    const int n = spec.n();
    Polynomial a = neg_y_pow(n + 1) * static_cast<double>(n);
    for (int i = 2; i <= n; ++i) a -= binomial(n + 1, i) * (pk(i) * neg_y_pow(n + 1 - i));
    return a;
}

std::vector<Polynomial> moment_b_closed_form(const MomentSpec& spec) {
    const int n = spec.n();
    std::vector<Polynomial> b;
    // Y entry: n(n+1)(-Y)^n - sum_i C(n+1,i)(n+1-i) P^(i) (-Y)^(n-i)
    Polynomial by = neg_y_pow(n) * static_cast<double>(n * (n + 1));
    for (int i = 2; i <= n; ++i) by -= binomial(n + 1, i) * (n + 1 - i) * (pk(i) * neg_y_pow(n - i));
    b.push_back(by);
    // P^(i) entry: C(n+1, i) (-Y)^(n+1-i)
    for (int i = 2; i <= n; ++i) b.push_back(binomial(n + 1, i) * neg_y_pow(n + 1 - i));
    return b;
}

Characteristic moment_characteristic(const MomentSpec& spec) {
    static constexpr const char* kLabels[] = {"", "RV", "RTM", "RFM"};
    const auto u = moment_components(spec);
    const Polynomial a = moment_a(spec);
    return Characteristic(kLabels[spec.n()], u, a, b_star(a, u));
}

double central_v2(const ContractState& u) {
    const double y = u[Component::Y];
    return u[Component::P2] - y * y;
}

double central_v3(const ContractState& u) {
    const double y = u[Component::Y];
    return u[Component::P3] - 3.0 * u[Component::P2] * y + 2.0 * y * y * y;
}

double implied_characteristic(const MomentSpec& spec, const ContractState& u0) {
    const int m = spec.n() + 1;
    const double y = u0[Component::Y];
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double p = i == 0 ? 1.0 : u0[power_component(i)];
        acc += binomial(m, i) * p * std::pow(-y, m - i);
    }
    return acc;
}

GeometricCoeffs::GeometricCoeffs(double c5, double c6_lambda, double c6_eta, double c7, double c8, double c9)
    : c5_(c5), c6l_(c6_lambda), c6e_(c6_eta), c7_(c7), c8_(c8), c9_(c9) {
    for (double c : {c5, c6_lambda, c6_eta, c7, c8, c9})
        if (!std::isfinite(c)) throw ValidationError("geometric coefficients must be finite");
    if (c8 != 0.0 && c9 != 0.0) throw ValidationError("at least one of c8 and c9 must be zero");
}

GeometricIncrement geometric_increment(const ContractState& ur, const ContractState& us) {
    using C = Component;
    const double yr = std::log(ur[C::F]), ys = std::log(us[C::F]);
    const double vl_r = 2.0 * (yr - ur[C::Y]), vl_s = 2.0 * (ys - us[C::Y]);
    const double ve_r = 2.0 * (ur[C::Z] / ur[C::F] - yr), ve_s = 2.0 * (us[C::Z] / us[C::F] - ys);
    return {ys - yr, vl_s - vl_r, ve_s - ve_r};
}

double geometric_g(const GeometricCoeffs& k, const GeometricIncrement& dx) noexcept {
    const double e = std::exp(dx.dy);
    const double q = dx.dv_lambda - 2.0 * dx.dy;
    return k.c5() * dx.dy + k.c6_lambda() * dx.dv_lambda + k.c6_eta() * dx.dv_eta + k.c7() * std::expm1(dx.dy) +
           k.c8() * q * q + k.c9() * (dx.dv_eta + 2.0 * dx.dy) * e;
}

namespace {
const std::vector<Component> kFYZ{Component::F, Component::Y, Component::Z};

Polynomial lnF() { return Polynomial::log_forward(); }
Polynomial var(Component c, int p = 1) { return Polynomial::variable(c, p); }
} // namespace

Characteristic corollary4_characteristic(const GeometricCoeffs& k, std::string label) {
    using C = Component;
    const Polynomial z_over_f = var(C::Z) * var(C::F, -1);
    Polynomial a = (k.c5() + 2.0 * k.c6_lambda() - 2.0 * k.c6_eta()) * lnF() + 4.0 * k.c8() * var(C::Y, 2) +
                   2.0 * k.c6_eta() * z_over_f;
    std::vector<Polynomial> b{
        k.c7() * var(C::F, -1) - 2.0 * k.c9() * (var(C::Z) * var(C::F, -2)),
        Polynomial::constant(-2.0 * k.c6_lambda()) - 8.0 * k.c8() * var(C::Y),
        2.0 * k.c9() * var(C::F, -1),
    };
    return Characteristic(std::move(label), kFYZ, std::move(a), std::move(b));
}

Characteristic lv_characteristic() {
    using C = Component;
    return Characteristic("LV", {C::F}, -2.0 * lnF(), {2.0 * var(C::F, -1)});
}

Characteristic ntm_characteristic() {
    using C = Component;
    Polynomial a = 12.0 * lnF() - 6.0 * (var(C::Z) * var(C::F, -1));
    std::vector<Polynomial> b{
        -12.0 * var(C::F, -1) - 6.0 * (var(C::Z) * var(C::F, -2)),
        Polynomial{},
        6.0 * var(C::F, -1),
    };
    return Characteristic("NTM", kFYZ, std::move(a), std::move(b));
}

Characteristic power_return_characteristic(int p) {
    static constexpr const char* kLabels[] = {"", "", "SLR", "CLR", "QLR"};
    if (p < 2 || p > 4) throw ValidationError("power return order must be 2, 3 or 4");
    return Characteristic::increment(kLabels[p], {Component::y}, [p](const ContractState& ur, const ContractState& us) {
        return power_return(us[Component::y] - ur[Component::y], p);
    });
}

Characteristic characteristic_by_name(std::string_view name) {
    if (name == "LV") return lv_characteristic();
    if (name == "NTM") return ntm_characteristic();
    if (name == "RV") return moment_characteristic(MomentSpec(1));
    if (name == "RTM") return moment_characteristic(MomentSpec(2));
    if (name == "RFM") return moment_characteristic(MomentSpec(3));
    if (name == "SLR") return power_return_characteristic(2);
    if (name == "CLR") return power_return_characteristic(3);
    if (name == "QLR") return power_return_characteristic(4);
    throw ValidationError("unknown characteristic '" + std::string(name) +
                          "' (expected LV, NTM, RV, RTM, RFM, SLR, CLR or QLR)");
}

} // namespace aggr
