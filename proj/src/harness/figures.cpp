#include "aggr/harness/figures.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "aggr/characteristics/library.hpp"
#include "aggr/core/error.hpp"
#include "aggr/core/state_path.hpp"

namespace aggr {

std::string_view figure_name(FigureId id) noexcept {
    switch (id) {
    case FigureId::fig1: return "fig1";
    case FigureId::fig2: return "fig2";
    case FigureId::fig3: return "fig3";
    }
    return "?";
}

FigureId parse_figure_id(std::string_view name) {
    for (auto id : {FigureId::fig1, FigureId::fig2, FigureId::fig3})
        if (figure_name(id) == name) return id;
    throw ValidationError("unknown figure '" + std::string(name) + "' (expected fig1, fig2 or fig3)");
}

std::vector<double> figure_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ValidationError("figure grid needs finite lo < hi and at least two points");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    // keep the midpoint exact for symmetric grids
    if (n % 2 == 1 && lo == -hi) x[n / 2] = 0.0;
    return x;
}

std::size_t FigureTable::column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ValidationError("figure has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

namespace {

std::vector<std::string> curves(FigureId id) {
    switch (id) {
    case FigureId::fig1: return {"RV", "LV", "SLR"};
    case FigureId::fig2: return {"RTM", "NTM", "CLR"};
    case FigureId::fig3: return {"RFM", "QLR"};
    }
    return {};
}

ContractState flat_state(double t, double y, double Y, double v) {
    using C = Component;
    ContractState u(t);
    const double F = std::exp(y);
    u.set(C::F, F).set(C::y, y).set(C::Y, Y).set(C::P2, Y * Y + v).set(C::P3, Y * Y * Y + 3.0 * Y * v);
    u.set(C::Z, F * (y + 0.5 * v));
    return u;
}

} // namespace

FigureTable figure_data(FigureId id, const FigureParams& params) {
    const double s2 = params.sigma * params.sigma;
    if (!std::isfinite(params.sigma) || params.sigma < 0.0) throw ValidationError("figure sigma must be finite and >= 0");
    if (!std::isfinite(params.dt) || !(params.dt > 0.0)) throw ValidationError("figure dt must be finite and > 0");
    if (!std::isfinite(params.residual_maturity) || params.residual_maturity < 0.0)
        throw ValidationError("figure residual maturity must be finite and >= 0");
    if (params.grid.empty()) throw ValidationError("figure grid is empty");
    for (double x : params.grid)
        if (!std::isfinite(x)) throw ValidationError("figure grid values must be finite");

    FigureTable t{id, params, {"x"}, {}};
    std::vector<Characteristic> cs;
    for (const auto& name : curves(id)) {
        t.columns.push_back(name);
        cs.push_back(characteristic_by_name(name));
    }
    const double vs = s2 * params.residual_maturity, vr = vs + s2 * params.dt;
    const auto ur = flat_state(0.0, 0.0, -0.5 * vr, vr);
    for (double x : params.grid) {
        const auto us = flat_state(params.dt, x + 0.5 * s2 * params.dt, ur[Component::Y] + x, vs);
        std::vector<double> row{x};
        for (const auto& c : cs) row.push_back(c(ur, us));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_figure_csv(std::ostream& os, const FigureTable& table) {
    for (std::size_t k = 0; k < table.columns.size(); ++k) os << (k ? "," : "") << table.columns[k];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_double(row[k]);
        os << '\n';
    }
}

namespace {

std::string at(double x) { return "first violation at x = " + format_double(x); }

} // namespace

std::vector<OrderingCheck> figure_orderings(const FigureTable& t) {
    std::vector<OrderingCheck> out;
    const double shift = 0.5 * t.params.sigma * t.params.sigma * t.params.dt;
    auto fail_at = [](OrderingCheck& c, double x) {
        if (c.pass) c.detail = at(x);
        c.pass = false;
    };
    auto point = [&](double x) {
        FigureParams p = t.params;
        p.grid = {x};
        return figure_data(t.id, p);
    };

    if (t.id == FigureId::fig1) {
        const auto z = point(0.0);
        OrderingCheck rv{"RV = 0 at x = 0", true, {}}, slr{"SLR = (sigma^2 dt/2)^2 at x = 0", true, {}}, meet{"LV = SLR where y_s = y_r", true, {}};
        if (z.rows[0][z.column("RV")] != 0.0) fail_at(rv, 0.0);
        const double want = shift * shift;
        if (std::abs(z.rows[0][z.column("SLR")] - want) > 1e-12 * want) fail_at(slr, 0.0);
        const auto m = point(-shift);
        if (std::abs(m.rows[0][m.column("LV")] - m.rows[0][m.column("SLR")]) > 1e-15) fail_at(meet, -shift);
        out = {rv, slr, meet};
    } else if (t.id == FigureId::fig2) {
        const std::size_t ir = t.column("RTM"), in = t.column("NTM"), ic = t.column("CLR");
        OrderingCheck below{"RTM < CLR for x > 0", true, {}}, above{"RTM > CLR for x < 0", true, {}},
            closer{"|NTM - CLR| > |RTM - CLR| for |x| >= 0.05", true, {}};
        for (const auto& r : t.rows) {
            const double x = r[0];
            if (x > 0.0 && !(r[ir] < r[ic])) fail_at(below, x);
            if (x < 0.0 && !(r[ir] > r[ic])) fail_at(above, x);
            if (std::abs(x) >= 0.05 - 1e-12 && !(std::abs(r[in] - r[ic]) > std::abs(r[ir] - r[ic]))) fail_at(closer, x);
        }
        out = {below, above, closer};
    } else {
        const std::size_t ir = t.column("RFM"), iq = t.column("QLR");
        OrderingCheck mono{"RFM - QLR increases with |x|", true, {}};
        for (int side : {1, -1}) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : t.rows)
                if (side * r[0] >= 0.0) pts.emplace_back(std::abs(r[0]), r[ir] - r[iq]);
            std::sort(pts.begin(), pts.end());
            for (std::size_t k = 1; k < pts.size(); ++k)
                if (!(pts[k].second > pts[k - 1].second)) fail_at(mono, side * pts[k].first);
        }
        out = {mono};
    }
    return out;
}

} // namespace aggr
