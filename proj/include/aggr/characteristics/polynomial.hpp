#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aggr/core/contract_state.hpp"

namespace aggr {

/// Variables a polynomial may use: every Component plus ln(F) as a named basis function.
inline constexpr std::size_t kVariableCount = kComponentCount + 1;
inline constexpr std::size_t kLogForward = kComponentCount;

/// Sparse Laurent polynomial over named components and ln(F), e.g. `12 * ln(F) - 6 * Z * F^-1`.
/// Differentiation is exact and symbolic.
class Polynomial {
public:
    using Exponents = std::array<std::int8_t, kVariableCount>;

    Polynomial() = default;
    static Polynomial constant(double c);
    static Polynomial variable(Component c, int power = 1);
    static Polynomial log_forward(int power = 1);

    Polynomial& add_term(double coeff, const Exponents& e);

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(double s);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    bool operator==(const Polynomial&) const = default;

    double evaluate(const ContractState& s) const;
    Polynomial derivative(Component c) const;

    /// Components the polynomial reads (ln(F) counts as F).
    ComponentSet variables() const;
    bool uses_log_forward() const;
    bool is_zero() const noexcept { return terms_.empty(); }
    double constant_term() const;
    const std::map<Exponents, double>& terms() const noexcept { return terms_; }

    /// Text form `coeff * Y^2 * P2 - ...`; coefficients in shortest round-trip decimal.
    std::string to_string() const;
    /// Parses the to_string form. Throws UnsupportedFormError for anything else.
    static Polynomial parse(std::string_view text);

private:
    std::map<Exponents, double> terms_;
};

/// Flattened polynomial for repeated evaluation on a variable vector.
class CompiledPolynomial {
public:
    CompiledPolynomial() = default;
    explicit CompiledPolynomial(const Polynomial& p);

    /// `vars` holds kVariableCount values indexed like Polynomial::Exponents.
    double evaluate(const double* vars) const noexcept;

private:
    struct Factor {
        std::uint8_t var;
        std::int8_t power;
    };
    struct Term {
        double coeff;
        std::uint32_t first;
        std::uint32_t count;
    };
    std::vector<Term> terms_;
    std::vector<Factor> factors_;
};

/// Fills `vars[kVariableCount]` from a state; ln(F) only when `with_log_forward`.
void load_variables(const ContractState& s, ComponentSet needed, bool with_log_forward, double* vars);

/// Jacobian of `a` with respect to `components`, symbolic.
std::vector<Polynomial> jacobian(const Polynomial& a, std::span<const Component> components);
/// Conditionally efficient weights b* = -J^a.
std::vector<Polynomial> b_star(const Polynomial& a, std::span<const Component> components);

} // namespace aggr
