#include "aggr/harness/premium.hpp"

#include <cmath>

#include "aggr/core/error.hpp"
#include "aggr/harness/report.hpp"
#include "aggr/models/simulate.hpp"

namespace aggr {

int characteristic_order(const Characteristic& c) {
    auto same = [&](const Characteristic& o) {
        return c.components() == o.components() && c.a_polynomial() == o.a_polynomial() && c.aggregating();
    };
    for (int n = 1; n <= 3; ++n)
        if (same(moment_characteristic(MomentSpec(n)))) return n;
    if (same(lv_characteristic())) return 1;
    if (same(ntm_characteristic())) return 2;
    if (!c.aggregating())
        for (int p = 2; p <= 4; ++p)
            if (c.label() == power_return_characteristic(p).label()) return p - 1;
    throw ValidationError("cannot tell the moment order of characteristic '" + c.label() + "'");
}

double implied_central_moment(const OptionChain& chain, const MomentSpec& spec, const QuadratureSpec& quad) {
    std::vector<double> k, q;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        k.push_back(chain.strikes()[i] / chain.forward());
        q.push_back(chain.prices()[i] / chain.forward());
    }
    const OptionChain unit(1.0, chain.maturity(), std::move(k), std::move(q));
    return implied_characteristic(spec, replicate_state(unit, quad));
}

PremiumResult risk_premium(const std::vector<StatePath>& paths, const Characteristic& c, const OptionChain& chain,
                           const MomentSpec& spec, const QuadratureSpec& quad, std::size_t threads) {
    if (paths.size() < 2) throw ValidationError("risk premium needs at least two paths");
    const int order = characteristic_order(c);
    if (order != spec.n())
        throw ValidationError("characteristic '" + c.label() + "' has order " + std::to_string(order) +
                              " but the moment spec has order " + std::to_string(spec.n()));
    for (const auto& p : paths)
        if (std::abs(p.partition().horizon() - chain.maturity()) > 1e-12 * chain.maturity())
            throw ValidationError("path horizon " + format_double(p.partition().horizon()) +
                                  " does not match chain maturity " + format_double(chain.maturity()));

    std::vector<double> values(paths.size());
    parallel_for(paths.size(), threads, [&](std::size_t i) { values[i] = realise(c, paths[i]); });
    const auto s = summarize(values);

    const double implied = implied_central_moment(chain, spec, quad);

    return {paths.size(), s.mean, s.stderr_, implied, s.mean - implied};
}

} // namespace aggr
