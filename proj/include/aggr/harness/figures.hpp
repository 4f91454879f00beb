#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace aggr {

enum class FigureId { fig1, fig2, fig3 };

std::string_view figure_name(FigureId id) noexcept;
/// ValidationError for anything but fig1, fig2, fig3.
FigureId parse_figure_id(std::string_view name);

/// n evenly spaced points on [lo, hi]; n >= 2.
std::vector<double> figure_grid(double lo = -0.15, double hi = 0.15, std::size_t n = 601);

struct FigureParams {
    double sigma = 0.2;
    double dt = 1.0 / 250.0;
    /// Time from s to the contracts' maturity; sets v2_s = sigma^2 T_s, which only the RFM curve reads.
    double residual_maturity = 1.0 / 12.0;
    std::vector<double> grid = figure_grid();
};

/// One row per grid point x = Y_s - Y_r, one column per curve (x first).
/// fig1: RV, LV, SLR; fig2: RTM, NTM, CLR; fig3: RFM, QLR.
struct FigureTable {
    FigureId id = FigureId::fig1;
    FigureParams params;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Column index by name; ValidationError when absent.
    std::size_t column(std::string_view name) const;
};

/// Curves from the library characteristics on a flat-volatility step r -> s with
/// y_s - y_r = x + sigma^2 dt / 2, v2 and v_eta both falling by sigma^2 dt, and v3 = 0.
FigureTable figure_data(FigureId id, const FigureParams& params = {});

void write_figure_csv(std::ostream& os, const FigureTable& table);

struct OrderingCheck {
    std::string name;
    bool pass = true;
    /// First violating point when the check fails.
    std::string detail;
};

/// fig1: RV(0) = 0 and SLR(0) = (sigma^2 dt / 2)^2.
/// fig2: RTM < CLR for x > 0 and RTM > CLR for x < 0; |NTM - CLR| > |RTM - CLR| for |x| >= 0.05.
/// fig3: RFM - QLR non-decreasing in |x| on each side of 0.
std::vector<OrderingCheck> figure_orderings(const FigureTable& table);

} // namespace aggr
