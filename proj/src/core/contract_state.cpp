#include "aggr/core/contract_state.hpp"

#include <cmath>
#include <string>

#include "aggr/core/error.hpp"

namespace aggr {

double ContractState::operator[](Component c) const {
    if (!has(c))
        throw ComponentError("state at t=" + std::to_string(time_) + " lacks component " +
                             std::string(component_name(c)));
    return values_[index_of(c)];
}

ContractState& ContractState::derive_variances() noexcept {
    using C = Component;
    if (has(C::y) && has(C::Y)) set(C::v_lambda, 2.0 * (values_[index_of(C::y)] - values_[index_of(C::Y)]));
    if (has(C::y) && has(C::Z) && has(C::F))
        set(C::v_eta, 2.0 * (values_[index_of(C::Z)] / values_[index_of(C::F)] - values_[index_of(C::y)]));
    return *this;
}

namespace {
void check_close(double got, double want, double scale, double rel_tol, const char* what, double t) {
    if (!(std::abs(got - want) <= rel_tol * std::max(1.0, scale)))
        throw ValidationError(std::string("state at t=") + std::to_string(t) + " violates " + what);
}
} // namespace

void validate_state(const ContractState& s, double rel_tol) {
    using C = Component;
    if (s.has(C::F) && !(s[C::F] > 0.0))
        throw ValidationError("state at t=" + std::to_string(s.time()) + " has non-positive F");
    if (s.has(C::F) && s.has(C::y))
        check_close(s[C::y], std::log(s[C::F]), std::abs(s[C::y]), rel_tol, "y = ln F", s.time());
    if (s.has(C::v_lambda) && s.has(C::y) && s.has(C::Y)) {
        const double want = 2.0 * (s[C::y] - s[C::Y]);
        check_close(s[C::v_lambda], want, std::abs(s[C::y]) + std::abs(s[C::Y]), rel_tol,
                    "v_lambda = 2(y - Y)", s.time());
    }
    if (s.has(C::v_eta) && s.has(C::y) && s.has(C::Z) && s.has(C::F)) {
        const double zf = s[C::Z] / s[C::F];
        check_close(s[C::v_eta], 2.0 * (zf - s[C::y]), std::abs(zf) + std::abs(s[C::y]), rel_tol,
                    "v_eta = 2(Z/F - y)", s.time());
    }
}

} // namespace aggr
