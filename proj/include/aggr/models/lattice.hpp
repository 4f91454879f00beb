#pragma once

#include <cmath>
#include <iosfwd>
#include <span>
#include <vector>

#include "aggr/characteristics/characteristic.hpp"

namespace aggr {

/// Recombining binomial tree for F with u = e^{sigma sqrt(dt)}, d = 1/u, p = (1-d)/(u-d).
/// Every node carries F, y, Y, P2, P3, P4, Z, v_lambda, v_eta by backward induction.
class LatticeModel {
public:
    static LatticeModel build(double F0, double sigma, double T, std::size_t steps);

    std::size_t steps() const noexcept { return steps_; }
    double dt() const noexcept { return dt_; }
    double up() const noexcept { return up_; }
    double down() const noexcept { return down_; }
    double p() const noexcept { return p_; }
    /// Node j (number of up moves) at step i, 0 <= j <= i.
    const ContractState& node(std::size_t step, std::size_t j) const noexcept { return nodes_[step][j]; }
    ComponentSet components() const noexcept { return nodes_[0][0].components(); }

    /// Probabilities of j up moves in n steps, j = 0..n.
    const std::vector<double>& transition(std::size_t n) const;

private:
    LatticeModel() = default;

    std::size_t steps_ = 0;
    double dt_ = 0.0, up_ = 0.0, down_ = 0.0, p_ = 0.0;
    std::vector<std::vector<ContractState>> nodes_;
    std::vector<std::vector<double>> transition_;
};

/// One row per (step, node).
void write_lattice_csv(std::ostream& os, const LatticeModel& tree);

struct ApResidual {
    double max_abs = 0.0;
    /// max |LHS - RHS| / max(1, |LHS|)
    double max_scaled = 0.0;
    std::size_t worst_node = 0;
};

/// E_r[f(u_r,u_T)] against E_r[f(u_r,u_s)] + E_r[f(u_s,u_T)] at every node of step r.
ApResidual lattice_ap_check(const LatticeModel& tree, const Characteristic& c, std::size_t r_step, std::size_t s_step);

/// Worst residual over all 0 <= r <= s <= N.
ApResidual lattice_ap_check_all(const LatticeModel& tree, const Characteristic& c);

/// Per-node b = -Omega^-1 omega at `step` over the one-step increments of `u`, where
/// omega = E[a(u_T) du] and Omega = E[du du^T]. Omega gets a 1e-14 trace ridge when near-singular;
/// SingularityError names the node when that does not help.
std::vector<std::vector<double>> lattice_discrete_optimal_b(const LatticeModel& tree, const Polynomial& a,
                                                            std::span<const Component> u, std::size_t step);

/// lattice_discrete_optimal_b for every step 0..N-1, indexed [step][node][component].
std::vector<std::vector<std::vector<double>>> lattice_discrete_optimal_b_all(const LatticeModel& tree,
                                                                            const Polynomial& a,
                                                                            std::span<const Component> u);

/// Weight rule b(step, node) for lattice variance computations.
using LatticeWeights = std::function<std::vector<double>(std::size_t step, std::size_t node)>;

/// Exact variance of a(u_N) - a(u_0) + sum_i b_{i-1}^T du_i over the tree, monitored every step.
double lattice_estimator_variance(const LatticeModel& tree, const Polynomial& a, std::span<const Component> u,
                                  const LatticeWeights& b);

struct GapOptions {
    /// Measure only the part of b_opt - b* along the one-step increment. With several components
    /// Omega has rank one on a binomial tree and nothing else about b is identified.
    bool projected = false;
    /// Only nodes with |y - y_0| <= window sqrt(t) sigma + one step; the tree's extremes grow with N.
    double window_stdevs = INFINITY;
};

/// max over the selected nodes of every step of |b_opt - b*|.
double lattice_optimal_gap(const LatticeModel& tree, const Polynomial& a, std::span<const Component> u,
                           const GapOptions& opt = {});

} // namespace aggr
