#pragma once

#include <functional>

#include "aggr/core/contract_state.hpp"
#include "aggr/models/model_spec.hpp"

namespace aggr {

/// Central moments of y_{t+h} - Y_t under a Merton model.
struct CentralMoments {
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
};

/// kappa_2 = sigma^2 h + l h E[J^2], kappa_3 = l h E[J^3], kappa_4 = l h E[J^4];
/// m2 = kappa_2, m3 = kappa_3, m4 = kappa_4 + 3 kappa_2^2. CapabilityError for other models.
CentralMoments merton_central_moments(const ModelSpec& spec, double horizon);

/// Compensated drift of y per year.
double merton_drift(const Merton& m) noexcept;

/// Closed-form contract values at time t given y_t = ln F_t (and the variance v_t for Heston).
/// Fills the requested components; CapabilityError for unsupported ones.
ContractState closed_form_state(const ModelSpec& spec, double t, double F, double v, ComponentSet components);

/// Terminal state with boundary values Y = y, P^(i) = y^i, Z = F y.
ContractState boundary_state(double t, double y_T, ComponentSet components);

/// E_0[g(y_T)] by Gauss-Hermite quadrature (a Poisson mixture for Merton).
/// CapabilityError for Heston.
double terminal_expectation(const ModelSpec& spec, const std::function<double(double)>& g, int nodes = 64);

/// Gauss-Hermite nodes and weights for the standard normal (weights sum to 1).
void gauss_hermite_normal(int n, std::vector<double>& x, std::vector<double>& w);

} // namespace aggr
