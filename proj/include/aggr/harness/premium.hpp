#pragma once

#include <vector>

#include "aggr/characteristics/library.hpp"
#include "aggr/core/state_path.hpp"
#include "aggr/replication/replication.hpp"

namespace aggr {

struct PremiumResult {
    std::size_t n_paths = 0;
    double realised_mean = 0.0;
    double realised_stderr = 0.0;
    double implied = 0.0;
    /// realised_mean - implied
    double premium = 0.0;
};

/// Moment order n of a library characteristic: 1 for RV/LV/SLR, 2 for RTM/NTM/CLR, 3 for RFM/QLR.
/// ValidationError when `c` is none of these.
int characteristic_order(const Characteristic& c);

/// Implied central moment of order n + 1 from the chain rescaled to unit forward (central moments are
/// shift invariant and y_0 = 0 avoids cancellation).
double implied_central_moment(const OptionChain& chain, const MomentSpec& spec, const QuadratureSpec& quad = {});

/// Mean realised characteristic minus the implied central moment replicated from the chain. ValidationError when the chain maturity differs from the
/// path horizon or the orders of `c` and `spec` disagree.
PremiumResult risk_premium(const std::vector<StatePath>& paths, const Characteristic& c, const OptionChain& chain,
                           const MomentSpec& spec, const QuadratureSpec& quad = {}, std::size_t threads = 1);

} // namespace aggr
