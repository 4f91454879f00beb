#pragma once

#include <array>

#include "aggr/core/component.hpp"

namespace aggr {

/// Values of a subset of contract components at one time.
class ContractState {
public:
    ContractState() = default;
    explicit ContractState(double time) : time_(time) {}

    double time() const noexcept { return time_; }
    ComponentSet components() const noexcept { return present_; }
    bool has(Component c) const noexcept { return present_.contains(c); }

    /// Throws ComponentError when `c` is absent.
    double operator[](Component c) const;
    double get_or(Component c, double fallback) const noexcept {
        return has(c) ? values_[index_of(c)] : fallback;
    }

    ContractState& set(Component c, double value) noexcept {
        values_[index_of(c)] = value;
        present_.insert(c);
        return *this;
    }

    /// Fills v_lambda and v_eta from their constituents where those are present.
    ContractState& derive_variances() noexcept;

private:
    double time_ = 0.0;
    std::array<double, kComponentCount> values_{};
    ComponentSet present_;
};

/// Checks F > 0, y = ln F, v_lambda = 2(y - Y), v_eta = 2(Z/F - y) for the components present.
/// Throws ValidationError describing the first violated relation.
void validate_state(const ContractState& s, double rel_tol = 1e-12);

} // namespace aggr
