#pragma once

#include <cstddef>
#include <variant>

#include "aggr/core/contract_state.hpp"
#include "aggr/replication/option_chain.hpp"

namespace aggr {

struct AsGiven {};
/// Resample onto n log-uniform strikes spanning +-width implied stdevs around ln F.
struct LogUniform {
    std::size_t n_points = 2001;
    double width_in_stdevs = 8.0;
};

/// Trapezoid rule on the chain's strikes or on a log-uniform resampling of them.
class QuadratureSpec {
public:
    QuadratureSpec() = default;
    explicit QuadratureSpec(LogUniform grid);

    static constexpr std::size_t kMinPoints = 16;

    const std::variant<AsGiven, LogUniform>& grid() const noexcept { return grid_; }

private:
    std::variant<AsGiven, LogUniform> grid_;
};

/// gamma_i(k) = i (ln k)^(i-2) k^-2 (i - 1 - ln k); gamma_1 = -k^-2.
double gamma_weight(int i, double k);

/// P^(i) = y^i + int gamma_i(k) q(k) dk with y = ln F.
double replicate_power_contract(const OptionChain& chain, int i, const QuadratureSpec& quad = {});
/// Z = F y + int q(k) / k dk.
double entropy_contract(const OptionChain& chain, const QuadratureSpec& quad = {});

/// F, y, Y, P2, P3, P4, Z at time 0 of the chain's horizon.
ContractState replicate_state(const OptionChain& chain, const QuadratureSpec& quad = {});

/// Undiscounted Black prices. DomainError for nonpositive inputs.
double bs_call_price(double F, double k, double sigma, double T);
double bs_put_price(double F, double k, double sigma, double T);
/// Put for k <= F, call otherwise.
double bs_otm_price(double F, double k, double sigma, double T);

/// Log-uniform strikes over ln F +- width sigma sqrt(T), priced by bs_otm_price.
/// With an odd point count the middle strike is exactly F.
OptionChain synth_chain(double F, double sigma, double T, std::size_t n_points = 2001, double width_in_stdevs = 8.0);

} // namespace aggr
