#include "aggr/models/closed_form.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "aggr/core/error.hpp"

namespace aggr {

double merton_drift(const Merton& m) noexcept {
    return -0.5 * m.sigma * m.sigma - m.jump_intensity * std::expm1(m.jump_mean + 0.5 * m.jump_stdev * m.jump_stdev);
}

namespace {

// Cumulants of y_{t+h} - y_t.
struct Cumulants {
    double k1, k2, k3, k4;
    double dk1; // K'(1), the cumulant generating function slope at 1
};

Cumulants merton_cumulants(const Merton& m, double h) {
    const double mu = m.jump_mean, s2 = m.jump_stdev * m.jump_stdev, lh = m.jump_intensity * h;
    const double ej2 = mu * mu + s2;
    const double ej3 = mu * mu * mu + 3.0 * mu * s2;
    const double ej4 = mu * mu * mu * mu + 6.0 * mu * mu * s2 + 3.0 * s2 * s2;
    const double drift = merton_drift(m);
    Cumulants c;
    c.k1 = drift * h + lh * mu;
    c.k2 = m.sigma * m.sigma * h + lh * ej2;
    c.k3 = lh * ej3;
    c.k4 = lh * ej4;
    c.dk1 = drift * h + m.sigma * m.sigma * h + lh * (mu + s2) * std::exp(mu + 0.5 * s2);
    return c;
}

void fill_from_moments(ContractState& u, ComponentSet comps, double F, double y, double k1, double c2, double c3,
                       double c4, double zslope) {
    const double Y = y + k1;
    for (auto c : comps.members()) {
        switch (c) {
        case Component::F: u.set(c, F); break;
        case Component::y: u.set(c, y); break;
        case Component::Y: u.set(c, Y); break;
        case Component::P2: u.set(c, Y * Y + c2); break;
        case Component::P3: u.set(c, Y * Y * Y + 3.0 * Y * c2 + c3); break;
        case Component::P4: u.set(c, Y * Y * Y * Y + 6.0 * Y * Y * c2 + 4.0 * Y * c3 + c4); break;
        case Component::Z: u.set(c, F * (y + zslope)); break;
        case Component::v_lambda: u.set(c, -2.0 * k1); break;
        case Component::v_eta: u.set(c, 2.0 * zslope); break;
        }
    }
}

} // namespace

CentralMoments merton_central_moments(const ModelSpec& spec, double horizon) {
    const auto* m = std::get_if<Merton>(&spec.kind());
    if (!m) throw CapabilityError("merton_central_moments needs a merton model, got " + std::string(spec.name()));
    if (!(horizon >= 0.0)) throw ValidationError("horizon must be nonnegative");
    const auto c = merton_cumulants(*m, horizon);
    return {c.k2, c.k3, c.k4 + 3.0 * c.k2 * c.k2};
}

ContractState closed_form_state(const ModelSpec& spec, double t, double F, double v, ComponentSet components) {
    require_support(spec, ClosedForm{}, components);
    const double h = spec.T() - t;
    if (h < -1e-12) throw ValidationError("state time lies beyond the horizon");
    const double y = std::log(F);
    ContractState u(t);
    if (h <= 0.0) {
        fill_from_moments(u, components, F, y, 0.0, 0.0, 0.0, 0.0, 0.0);
        return u;
    }
    if (const auto* g = std::get_if<Gbm>(&spec.kind())) {
        const double var = g->sigma * g->sigma * h;
        fill_from_moments(u, components, F, y, -0.5 * var, var, 0.0, 3.0 * var * var, 0.5 * var);
    } else if (const auto* m = std::get_if<Merton>(&spec.kind())) {
        const auto c = merton_cumulants(*m, h);
        fill_from_moments(u, components, F, y, c.k1, c.k2, c.k3, c.k4 + 3.0 * c.k2 * c.k2, c.dk1);
    } else {
        const auto& hs = std::get<Heston>(spec.kind());
        const double kh = hs.kappa * h;
        const double decay = hs.kappa > 0.0 ? -std::expm1(-kh) / hs.kappa : h;
        const double integrated = hs.theta * h + (v - hs.theta) * decay;
        fill_from_moments(u, components, F, y, -0.5 * integrated, 0.0, 0.0, 0.0, 0.0);
    }
    return u;
}

ContractState boundary_state(double t, double y_T, ComponentSet components) {
    ContractState u(t);
    const double F = std::exp(y_T);
    fill_from_moments(u, components, F, y_T, 0.0, 0.0, 0.0, 0.0, 0.0);
    return u;
}

void gauss_hermite_normal(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw ValidationError("Gauss-Hermite needs at least one node");
    // Golub-Welsch on the probabilists' Hermite recurrence.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
    x.resize(static_cast<std::size_t>(n));
    w.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        x[static_cast<std::size_t>(k)] = eig.eigenvalues()[k];
        const double v0 = eig.eigenvectors()(0, k);
        w[static_cast<std::size_t>(k)] = v0 * v0;
    }
}

double terminal_expectation(const ModelSpec& spec, const std::function<double(double)>& g, int nodes) {
    std::vector<double> x, w;
    gauss_hermite_normal(nodes, x, w);
    const double y0 = std::log(spec.F0()), T = spec.T();
    auto normal_mean = [&](double mean, double sd) {
        double acc = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * g(mean + sd * x[k]);
        return acc;
    };
    if (const auto* gb = std::get_if<Gbm>(&spec.kind())) {
        const double var = gb->sigma * gb->sigma * T;
        return normal_mean(y0 - 0.5 * var, std::sqrt(var));
    }
    if (const auto* m = std::get_if<Merton>(&spec.kind())) {
        const double lt = m->jump_intensity * T, drift = merton_drift(*m);
        double acc = 0.0, mass = 0.0, pn = std::exp(-lt);
        for (int n = 0; n < 10000; ++n) {
            if (n) pn *= lt / n;
            const double mean = y0 + drift * T + n * m->jump_mean;
            const double sd = std::sqrt(m->sigma * m->sigma * T + n * m->jump_stdev * m->jump_stdev);
            acc += pn * normal_mean(mean, sd);
            mass += pn;
            if (n > lt && 1.0 - mass < 1e-17) break;
        }
        return acc;
    }
    throw CapabilityError("terminal expectation by quadrature is not available for heston");
}

} // namespace aggr
