#include "aggr/replication/replication.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aggr/core/error.hpp"
#include "aggr/kernels/kernels.hpp"

namespace aggr {

QuadratureSpec::QuadratureSpec(LogUniform grid) : grid_(grid) {
    if (grid.n_points < kMinPoints)
        throw InsufficientGridError("log-uniform grid needs at least " + std::to_string(kMinPoints) + " points");
    if (!(grid.width_in_stdevs > 0.0) || !std::isfinite(grid.width_in_stdevs))
        throw ValidationError("grid width must be positive");
}

double gamma_weight(int i, double k) {
    if (!(k > 0.0)) throw DomainError("gamma weight needs a positive strike");
    if (i < 1) throw ValidationError("power order must be at least 1");
    const double k2 = 1.0 / (k * k);
    if (i == 1) return -k2;
    const double lk = std::log(k);
    return i * std::pow(lk, i - 2) * k2 * (i - 1 - lk);
}

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 * 0.5); }

void check_bs(double F, double k, double sigma, double T) {
    if (!(F > 0.0) || !(k > 0.0) || !(sigma > 0.0) || !(T > 0.0))
        throw DomainError("Black prices need positive forward, strike, volatility and maturity");
}

struct Grid {
    std::vector<double> k, q;
};

// Implied total stdev from the at-the-money straddle half, F (2 Phi(s/2) - 1) = q.
double atm_stdev(const OptionChain& chain) {
    const auto& k = chain.strikes();
    const auto& q = chain.prices();
    const double F = chain.forward();
    const auto it = std::lower_bound(k.begin(), k.end(), F);
    double qa;
    if (it == k.end() || it == k.begin()) qa = it == k.end() ? q.back() : q.front();
    else {
        const auto j = static_cast<std::size_t>(it - k.begin());
        const double w = (std::log(F) - std::log(k[j - 1])) / (std::log(k[j]) - std::log(k[j - 1]));
        qa = (1.0 - w) * q[j - 1] + w * q[j];
    }
    const double target = std::clamp(qa / F, 0.0, 1.0 - 1e-16);
    // bisection on s in (0, 40)
    double lo = 0.0, hi = 40.0;
    for (int it2 = 0; it2 < 200; ++it2) {
        const double mid = 0.5 * (lo + hi);
        (2.0 * norm_cdf(0.5 * mid) - 1.0 < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Grid resample(const OptionChain& chain, const LogUniform& spec) {
    const double s = atm_stdev(chain);
    if (!(s > 0.0)) throw ValidationError("cannot resample a chain with zero at-the-money price");
    const double y = std::log(chain.forward());
    const double lo = std::max(y - spec.width_in_stdevs * s, std::log(chain.strikes().front()));
    const double hi = std::min(y + spec.width_in_stdevs * s, std::log(chain.strikes().back()));
    if (!(hi > lo)) throw ValidationError("resampling window does not overlap the strike range");
    Grid g;
    const auto& k = chain.strikes();
    const auto& q = chain.prices();
    std::size_t j = 1;
    for (std::size_t i = 0; i < spec.n_points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(spec.n_points - 1);
        const double kk = std::exp(x);
        while (j + 1 < k.size() && k[j] < kk) ++j;
        const double w = std::clamp((x - std::log(k[j - 1])) / (std::log(k[j]) - std::log(k[j - 1])), 0.0, 1.0);
        g.k.push_back(kk);
        g.q.push_back((1.0 - w) * q[j - 1] + w * q[j]);
    }
    return g;
}

Grid quadrature_grid(const OptionChain& chain, const QuadratureSpec& quad) {
    if (const auto* lu = std::get_if<LogUniform>(&quad.grid())) return resample(chain, *lu);
    if (chain.size() < QuadratureSpec::kMinPoints)
        throw InsufficientGridError("chain has " + std::to_string(chain.size()) + " strikes; replication needs at least " +
                                    std::to_string(QuadratureSpec::kMinPoints) +
                                    " (supply a denser strike grid or a log-uniform resampling)");
    return {chain.strikes(), chain.prices()};
}

// Trapezoid weights for int w(k) q(k) dk.
double trapezoid(const Grid& g, double (*weight)(int, double), int i) {
    const auto n = g.k.size();
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double left = j ? g.k[j] - g.k[j - 1] : 0.0;
        const double right = j + 1 < n ? g.k[j + 1] - g.k[j] : 0.0;
        w[j] = 0.5 * (left + right) * weight(i, g.k[j]);
    }
    return kernels::dot(w, g.q);
}

double inverse_strike(int, double k) { return 1.0 / k; }

} // namespace

double replicate_power_contract(const OptionChain& chain, int i, const QuadratureSpec& quad) {
    if (i < 1) throw ValidationError("power order must be at least 1");
    const auto g = quadrature_grid(chain, quad);
    return std::pow(std::log(chain.forward()), i) + trapezoid(g, gamma_weight, i);
}

double entropy_contract(const OptionChain& chain, const QuadratureSpec& quad) {
    const auto g = quadrature_grid(chain, quad);
    const double F = chain.forward();
    return F * std::log(F) + trapezoid(g, inverse_strike, 0);
}

ContractState replicate_state(const OptionChain& chain, const QuadratureSpec& quad) {
    const auto g = quadrature_grid(chain, quad);
    const double F = chain.forward(), y = std::log(F);
    ContractState u(0.0);
    u.set(Component::F, F).set(Component::y, y);
    u.set(Component::Y, y + trapezoid(g, gamma_weight, 1));
    u.set(Component::P2, y * y + trapezoid(g, gamma_weight, 2));
    u.set(Component::P3, y * y * y + trapezoid(g, gamma_weight, 3));
    u.set(Component::P4, y * y * y * y + trapezoid(g, gamma_weight, 4));
    u.set(Component::Z, F * y + trapezoid(g, inverse_strike, 0));
    return u.derive_variances();
}

double bs_call_price(double F, double k, double sigma, double T) {
    check_bs(F, k, sigma, T);
    const double s = sigma * std::sqrt(T);
    const double d1 = (std::log(F / k) + 0.5 * s * s) / s;
    return F * norm_cdf(d1) - k * norm_cdf(d1 - s);
}

double bs_put_price(double F, double k, double sigma, double T) {
    check_bs(F, k, sigma, T);
    const double s = sigma * std::sqrt(T);
    const double d1 = (std::log(F / k) + 0.5 * s * s) / s;
    return k * norm_cdf(s - d1) - F * norm_cdf(-d1);
}

double bs_otm_price(double F, double k, double sigma, double T) {
    return k <= F ? bs_put_price(F, k, sigma, T) : bs_call_price(F, k, sigma, T);
}

OptionChain synth_chain(double F, double sigma, double T, std::size_t n_points, double width_in_stdevs) {
    if (n_points < QuadratureSpec::kMinPoints)
        throw InsufficientGridError("synthetic chain needs at least " + std::to_string(QuadratureSpec::kMinPoints) +
                                    " strikes");
    check_bs(F, F, sigma, T);
    if (!(width_in_stdevs > 0.0)) throw ValidationError("grid width must be positive");
    const double half = width_in_stdevs * sigma * std::sqrt(T);
    const double y = std::log(F);
    std::vector<double> k(n_points), q(n_points);
    const double mid = 0.5 * static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double x = (static_cast<double>(i) - mid) / mid * half;
        k[i] = x == 0.0 ? F : std::exp(y + x);
        q[i] = bs_otm_price(F, k[i], sigma, T);
    }
    return OptionChain(F, T, std::move(k), std::move(q));
}

} // namespace aggr
