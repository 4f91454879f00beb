#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "aggr/core/component.hpp"

namespace aggr {

struct Gbm {
    double sigma = 0.2;
};

/// Lognormal jumps J ~ N(jump_mean, jump_stdev^2) at Poisson rate jump_intensity per year.
struct Merton {
    double sigma = 0.2;
    double jump_intensity = 0.0;
    double jump_mean = 0.0;
    double jump_stdev = 0.0;
};

/// dv = kappa (theta - v) dt + xi sqrt(v) dW_v, corr(dW_v, dW_F) = rho.
struct Heston {
    double v0 = 0.04;
    double kappa = 1.0;
    double theta = 0.04;
    double xi = 0.3;
    double rho = -0.7;
};

using ModelKind = std::variant<Gbm, Merton, Heston>;

/// A martingale model for the forward F on [0, T].
class ModelSpec {
public:
    /// Throws ValidationError for negative volatility parameters, F0 <= 0, T <= 0 or |rho| > 1.
    ModelSpec(ModelKind kind, double F0, double T);

    static ModelSpec gbm(double sigma, double F0 = 100.0, double T = 1.0) { return {Gbm{sigma}, F0, T}; }
    static ModelSpec merton(double sigma, double intensity, double mean, double stdev, double F0 = 100.0,
                            double T = 1.0) {
        return {Merton{sigma, intensity, mean, stdev}, F0, T};
    }
    static ModelSpec heston(const Heston& h, double F0 = 100.0, double T = 1.0) { return {h, F0, T}; }

    const ModelKind& kind() const noexcept { return kind_; }
    double F0() const noexcept { return F0_; }
    double T() const noexcept { return T_; }
    std::string_view name() const noexcept;
    /// 2 kappa theta >= xi^2; recorded, not enforced. True for non-Heston models.
    bool feller() const noexcept { return feller_; }

    bool is_gbm() const noexcept { return std::holds_alternative<Gbm>(kind_); }
    bool is_merton() const noexcept { return std::holds_alternative<Merton>(kind_); }
    bool is_heston() const noexcept { return std::holds_alternative<Heston>(kind_); }

private:
    ModelKind kind_;
    double F0_;
    double T_;
    bool feller_ = true;
};

struct ClosedForm {};
struct NestedMc {
    std::size_t m_inner = 10000;
};
using StateMode = std::variant<ClosedForm, NestedMc>;

/// Whether `mode` can produce component `c` for the model. F and y are always available;
/// v_lambda / v_eta follow Y and Z.
bool supports(const ModelSpec& spec, const StateMode& mode, Component c) noexcept;
/// Throws CapabilityError naming the first unsupported component.
void require_support(const ModelSpec& spec, const StateMode& mode, ComponentSet components);
/// Human-readable capability table.
std::string capability_matrix();

} // namespace aggr
