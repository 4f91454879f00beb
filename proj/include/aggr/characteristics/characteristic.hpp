#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "aggr/characteristics/polynomial.hpp"
#include "aggr/core/state_path.hpp"

namespace aggr {

/// Two-point characteristic f(u_r, u_s) = a(u_s) - a(u_r) + b(u_r)^T (u_s - u_r), where u is the
/// vector of `components()`. A non-aggregating increment term g(u_r, u_s) may be attached for
/// control characteristics such as the squared log return; it is empty for every (a, b) pair.
class Characteristic {
public:
    using IncrementTerm = std::function<double(const ContractState& ur, const ContractState& us)>;

    /// `b` has one polynomial per component. `a` must have no constant term (a(0) = 0) and both
    /// `a` and `b` may only read the listed components.
    Characteristic(std::string label, std::vector<Component> components, Polynomial a,
                   std::vector<Polynomial> b);

    /// Pure increment characteristic (a = 0, b = 0) reading `required` components.
    static Characteristic increment(std::string label, ComponentSet required, IncrementTerm g);

    const std::string& label() const noexcept { return label_; }
    const std::vector<Component>& components() const noexcept { return components_; }
    ComponentSet required_components() const noexcept { return required_; }
    const Polynomial& a_polynomial() const noexcept { return a_; }
    const std::vector<Polynomial>& b_polynomials() const noexcept { return b_; }
    bool aggregating() const noexcept { return !increment_; }

    double a(const ContractState& u) const;
    std::vector<double> b(const ContractState& u) const;

    double operator()(const ContractState& ur, const ContractState& us) const;

    /// Same `a`, different weights.
    Characteristic with_b(std::vector<Polynomial> b, std::string label) const;

private:
    void compile();
    void require(const ContractState& u) const;
    void load(const ContractState& u, double* vars) const noexcept;

    friend double realise(const Characteristic& c, const StatePath& path);
    friend double realise_fixed_b(const Characteristic& c, const StatePath& path);

    std::string label_;
    std::vector<Component> components_;
    Polynomial a_;
    std::vector<Polynomial> b_;
    IncrementTerm increment_;

    ComponentSet required_;
    std::vector<Component> poly_reads_;
    bool needs_log_forward_ = false;
    CompiledPolynomial a_compiled_;
    std::vector<CompiledPolynomial> b_compiled_;
};

double eval_characteristic(const Characteristic& c, const ContractState& ur, const ContractState& us);

/// Realised characteristic along a path, evaluated in telescoped form
/// a(u_N) - a(u_0) + sum_i b(u_{i-1})^T (u_i - u_{i-1}) (+ increment terms).
/// Throws ValidationError for paths with fewer than two states.
double realise(const Characteristic& c, const StatePath& path);

/// As realise, but with b frozen at its time-0 value for the whole path.
double realise_fixed_b(const Characteristic& c, const StatePath& path);

} // namespace aggr
