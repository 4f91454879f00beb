#pragma once

#include <string_view>

#include "aggr/characteristics/characteristic.hpp"

namespace aggr {

// Kernels on a log return dy (scalar reference forms).
double lambda_kernel(double dy) noexcept;
double eta_kernel(double dy) noexcept;
double tau_kernel(double dy) noexcept;
/// 3 dv_eta (e^dy - 1)
double rho_term(double dv_eta, double dy) noexcept;
/// dy^p, p in {2, 3, 4}; ValidationError otherwise.
double power_return(double dy, int p);

/// Order of a moment characteristic: the characteristic captures the (n+1)-st central moment.
class MomentSpec {
public:
    explicit MomentSpec(int n);
    int n() const noexcept { return n_; }

private:
    int n_;
};

/// u = (Y, P2, ..., P^n).
std::vector<Component> moment_components(const MomentSpec& spec);
/// a(u) = n(-Y)^(n+1) - sum_{i=2}^n C(n+1, i) P^(i) (-Y)^(n+1-i)
Polynomial moment_a(const MomentSpec& spec);
/// The closed-form efficient weights for moment_a, written out term by term.
std::vector<Polynomial> moment_b_closed_form(const MomentSpec& spec);
/// (a, b*) pair for n in {1, 2, 3}: "RV", "RTM", "RFM".
Characteristic moment_characteristic(const MomentSpec& spec);

/// v2 = P2 - Y^2
double central_v2(const ContractState& u);
/// v3 = P3 - 3 P2 Y + 2 Y^3
double central_v3(const ContractState& u);

/// sum_{i=0}^{n+1} C(n+1, i) P_0^(i) (-Y_0)^(n+1-i), with P^(0) = 1 and P^(1) = Y.
double implied_characteristic(const MomentSpec& spec, const ContractState& u0);

/// Coefficients (c5, c6_lambda, c6_eta, c7, c8, c9) of the geometric family on x = (y, v_lambda, v_eta).
/// At least one of c8 and c9 must be zero; checked on construction.
class GeometricCoeffs {
public:
    GeometricCoeffs(double c5, double c6_lambda, double c6_eta, double c7, double c8, double c9);

    double c5() const noexcept { return c5_; }
    double c6_lambda() const noexcept { return c6l_; }
    double c6_eta() const noexcept { return c6e_; }
    double c7() const noexcept { return c7_; }
    double c8() const noexcept { return c8_; }
    double c9() const noexcept { return c9_; }

    static GeometricCoeffs log_variance() { return {-2, 0, 0, 2, 0, 0}; }
    static GeometricCoeffs ntm() { return {6, 0, -3, -12, 0, 3}; }

private:
    double c5_, c6l_, c6e_, c7_, c8_, c9_;
};

/// Increments (dy, dv_lambda, dv_eta) of x = (y, v_lambda, v_eta).
struct GeometricIncrement {
    double dy = 0.0;
    double dv_lambda = 0.0;
    double dv_eta = 0.0;
};

/// x_s - x_r computed from u = (F, Y, Z): y = ln F, v_lambda = 2(y - Y), v_eta = 2(Z/F - y).
GeometricIncrement geometric_increment(const ContractState& ur, const ContractState& us);

/// g(dx) = (c5, c6l, c6e)^T dx + c7(e^dy - 1) + c8(dv_lambda - 2dy)^2 + c9(dv_eta + 2dy)e^dy
double geometric_g(const GeometricCoeffs& k, const GeometricIncrement& dx) noexcept;

/// (a, b) on u = (F, Y, Z) whose two-point form equals geometric_g on the induced increments.
Characteristic corollary4_characteristic(const GeometricCoeffs& k, std::string label = "geometric");

/// a = -2 ln F, b = 2/F on u = (F); realises lambda(dy).
Characteristic lv_characteristic();
/// a = 12 ln F - 6Z/F, b = (-12/F - 6Z/F^2, 0, 6/F); realises rho + tau.
Characteristic ntm_characteristic();
/// Non-aggregating control (y_s - y_r)^p: "SLR", "CLR", "QLR" for p = 2, 3, 4.
Characteristic power_return_characteristic(int p);

/// LV, NTM, RV, RTM, RFM, SLR, CLR, QLR. ValidationError for anything else.
Characteristic characteristic_by_name(std::string_view name);

} // namespace aggr
