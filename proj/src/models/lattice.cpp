#include "aggr/models/lattice.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "aggr/core/error.hpp"
#include "aggr/core/state_path.hpp"

namespace aggr {

namespace {

constexpr Component kContracts[] = {Component::Y, Component::P2, Component::P3, Component::P4, Component::Z};

} // namespace

LatticeModel LatticeModel::build(double F0, double sigma, double T, std::size_t steps) {
    if (steps < 1) throw ValidationError("lattice needs at least one step");
    if (!(F0 > 0.0) || !(T > 0.0) || !(sigma >= 0.0) || !std::isfinite(sigma))
        throw ValidationError("lattice needs F0 > 0, T > 0 and finite sigma >= 0");
    LatticeModel m;
    m.steps_ = steps;
    m.dt_ = T / static_cast<double>(steps);
    const double a = sigma * std::sqrt(m.dt_);
    m.up_ = std::exp(a);
    m.down_ = std::exp(-a);
    // (1 - d) / (u - d) without cancellation
    m.p_ = -std::expm1(-a) / (std::expm1(a) - std::expm1(-a));
    if (!(m.p_ > 0.0 && m.p_ < 1.0))
        throw NumericError("lattice probability " + std::to_string(m.p_) + " is outside (0, 1)");

    const double y0 = std::log(F0);
    m.nodes_.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        m.nodes_[i].reserve(i + 1);
        for (std::size_t j = 0; j <= i; ++j) {
            const double y = y0 + a * (2.0 * static_cast<double>(j) - static_cast<double>(i));
            ContractState s(m.dt_ * static_cast<double>(i));
            if (i == steps) s = ContractState(T);
            s.set(Component::F, std::exp(y)).set(Component::y, y);
            m.nodes_[i].push_back(s);
        }
    }
    for (auto& s : m.nodes_[steps]) {
        const double y = s[Component::y];
        s.set(Component::Y, y).set(Component::P2, y * y).set(Component::P3, y * y * y);
        s.set(Component::P4, y * y * y * y).set(Component::Z, s[Component::F] * y);
    }
    const double p = m.p_, q = 1.0 - m.p_;
    for (std::size_t i = steps; i-- > 0;) {
        for (std::size_t j = 0; j <= i; ++j) {
            const auto& up = m.nodes_[i + 1][j + 1];
            const auto& dn = m.nodes_[i + 1][j];
            auto& s = m.nodes_[i][j];
            const double fm = p * up[Component::F] + q * dn[Component::F];
            if (std::abs(fm - s[Component::F]) > 1e-14 * s[Component::F])
                throw NumericError("lattice martingale check failed at step " + std::to_string(i) + " node " +
                                   std::to_string(j));
            for (auto c : kContracts) s.set(c, p * up[c] + q * dn[c]);
        }
    }
    for (auto& row : m.nodes_)
        for (auto& s : row) s.derive_variances();

    m.transition_.resize(steps + 1);
    m.transition_[0] = {1.0};
    for (std::size_t n = 1; n <= steps; ++n) {
        const auto& prev = m.transition_[n - 1];
        auto& cur = m.transition_[n];
        cur.assign(n + 1, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            cur[j] += q * prev[j];
            cur[j + 1] += p * prev[j];
        }
    }
    return m;
}

const std::vector<double>& LatticeModel::transition(std::size_t n) const {
    if (n > steps_) throw ValidationError("transition beyond the lattice horizon");
    return transition_[n];
}

void write_lattice_csv(std::ostream& os, const LatticeModel& tree) {
    const auto comps = tree.components().members();
    os << "step,node,time";
    for (auto c : comps) os << ',' << component_name(c);
    os << '\n';
    for (std::size_t i = 0; i <= tree.steps(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const auto& s = tree.node(i, j);
            os << i << ',' << j << ',' << format_double(s.time());
            for (auto c : comps) os << ',' << format_double(s[c]);
            os << '\n';
        }
}

namespace {

// E_r[f(u_r, u_s)] for node j at step r.
double expect_pair(const LatticeModel& tree, const Characteristic& c, std::size_t r, std::size_t j, std::size_t s) {
    const auto& tr = tree.transition(s - r);
    const auto& ur = tree.node(r, j);
    double acc = 0.0;
    for (std::size_t m = 0; m < tr.size(); ++m) acc += tr[m] * c(ur, tree.node(s, j + m));
    return acc;
}

} // namespace

ApResidual lattice_ap_check(const LatticeModel& tree, const Characteristic& c, std::size_t r_step, std::size_t s_step) {
    const std::size_t N = tree.steps();
    if (!(r_step <= s_step && s_step <= N)) throw ValidationError("need 0 <= r <= s <= N");
    if (!tree.components().contains_all(c.required_components()))
        throw ComponentError("lattice lacks components " + (c.required_components() - tree.components()).to_string() +
                             " required by '" + c.label() + "'");
    std::vector<double> tail(s_step + 1);
    for (std::size_t k = 0; k <= s_step; ++k) tail[k] = expect_pair(tree, c, s_step, k, N);
    ApResidual out;
    const auto& tr = tree.transition(s_step - r_step);
    for (std::size_t j = 0; j <= r_step; ++j) {
        const double lhs = expect_pair(tree, c, r_step, j, N);
        double rhs = expect_pair(tree, c, r_step, j, s_step);
        for (std::size_t m = 0; m < tr.size(); ++m) rhs += tr[m] * tail[j + m];
        const double d = std::abs(lhs - rhs);
        const double scaled = d / std::max(1.0, std::abs(lhs));
        if (scaled > out.max_scaled) {
            out.max_scaled = scaled;
            out.worst_node = j;
        }
        out.max_abs = std::max(out.max_abs, d);
    }
    return out;
}

ApResidual lattice_ap_check_all(const LatticeModel& tree, const Characteristic& c) {
    ApResidual worst;
    for (std::size_t r = 0; r <= tree.steps(); ++r)
        for (std::size_t s = r; s <= tree.steps(); ++s) {
            const auto res = lattice_ap_check(tree, c, r, s);
            worst.max_abs = std::max(worst.max_abs, res.max_abs);
            if (res.max_scaled >= worst.max_scaled) {
                worst.max_scaled = res.max_scaled;
                worst.worst_node = res.worst_node;
            }
        }
    return worst;
}

namespace {

struct LatticePoly {
    const LatticeModel& tree;
    std::vector<Component> u;
    CompiledPolynomial a;
    ComponentSet reads;
    bool log_forward;
    // A_{i,j} = E_i[a(u_N)] at every node
    std::vector<std::vector<double>> A;

    LatticePoly(const LatticeModel& t, const Polynomial& poly, std::span<const Component> comps)
        : tree(t), u(comps.begin(), comps.end()), a(poly), reads(poly.variables()), log_forward(poly.uses_log_forward()) {
        ComponentSet need = reads;
        for (auto c : u) need.insert(c);
        if (!tree.components().contains_all(need))
            throw ComponentError("lattice lacks components " + (need - tree.components()).to_string());
        const std::size_t N = tree.steps();
        A.resize(N + 1);
        A[N].resize(N + 1);
        double vars[kVariableCount] = {};
        for (std::size_t j = 0; j <= N; ++j) {
            load_variables(tree.node(N, j), reads, log_forward, vars);
            A[N][j] = a.evaluate(vars);
        }
        for (std::size_t i = N; i-- > 0;) {
            A[i].resize(i + 1);
            for (std::size_t j = 0; j <= i; ++j) A[i][j] = tree.p() * A[i + 1][j + 1] + (1.0 - tree.p()) * A[i + 1][j];
        }
    }

    Eigen::VectorXd du(std::size_t i, std::size_t j, bool up) const {
        const auto& from = tree.node(i, j);
        const auto& to = tree.node(i + 1, up ? j + 1 : j);
        Eigen::VectorXd d(static_cast<Eigen::Index>(u.size()));
        for (std::size_t k = 0; k < u.size(); ++k) d[static_cast<Eigen::Index>(k)] = to[u[k]] - from[u[k]];
        return d;
    }

    std::vector<double> optimal_b(std::size_t i, std::size_t j) const {
        const double p = tree.p(), q = 1.0 - p;
        const Eigen::VectorXd up = du(i, j, true), dn = du(i, j, false);
        const Eigen::VectorXd omega = p * A[i + 1][j + 1] * up + q * A[i + 1][j] * dn;
        Eigen::MatrixXd Omega = p * up * up.transpose() + q * dn * dn.transpose();
        const double tr = Omega.trace();
        if (!(tr > 0.0) || !std::isfinite(tr))
            throw SingularityError("Omega is singular at step " + std::to_string(i) + " node " + std::to_string(j));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Omega, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() <= 1e-12 * eig.eigenvalues().maxCoeff())
            Omega += 1e-14 * tr * Eigen::MatrixXd::Identity(Omega.rows(), Omega.cols());
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Omega);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw SingularityError("Omega is singular at step " + std::to_string(i) + " node " + std::to_string(j));
        const Eigen::VectorXd b = -ldlt.solve(omega);
        if (!b.allFinite())
            throw SingularityError("Omega is singular at step " + std::to_string(i) + " node " + std::to_string(j));
        return {b.data(), b.data() + b.size()};
    }
};

} // namespace

std::vector<std::vector<double>> lattice_discrete_optimal_b(const LatticeModel& tree, const Polynomial& a,
                                                            std::span<const Component> u, std::size_t step) {
    if (step >= tree.steps()) throw ValidationError("optimal b is defined for steps 0..N-1");
    const LatticePoly lp(tree, a, u);
    std::vector<std::vector<double>> out;
    for (std::size_t j = 0; j <= step; ++j) out.push_back(lp.optimal_b(step, j));
    return out;
}

std::vector<std::vector<std::vector<double>>> lattice_discrete_optimal_b_all(const LatticeModel& tree,
                                                                            const Polynomial& a,
                                                                            std::span<const Component> u) {
    const LatticePoly lp(tree, a, u);
    std::vector<std::vector<std::vector<double>>> out(tree.steps());
    for (std::size_t i = 0; i < tree.steps(); ++i)
        for (std::size_t j = 0; j <= i; ++j) out[i].push_back(lp.optimal_b(i, j));
    return out;
}

double lattice_estimator_variance(const LatticeModel& tree, const Polynomial& a, std::span<const Component> u,
                                  const LatticeWeights& b) {
    const LatticePoly lp(tree, a, u);
    const double p = tree.p(), q = 1.0 - p;
    double var = 0.0;
    for (std::size_t i = 0; i < tree.steps(); ++i) {
        const auto& pi = tree.transition(i);
        for (std::size_t j = 0; j <= i; ++j) {
            const auto bj = b(i, j);
            if (bj.size() != u.size()) throw ValidationError("weight vector has the wrong length");
            const Eigen::Map<const Eigen::VectorXd> bv(bj.data(), static_cast<Eigen::Index>(bj.size()));
            const double eu = lp.A[i + 1][j + 1] - lp.A[i][j] + bv.dot(lp.du(i, j, true));
            const double ed = lp.A[i + 1][j] - lp.A[i][j] + bv.dot(lp.du(i, j, false));
            var += pi[j] * (p * eu * eu + q * ed * ed);
        }
    }
    return var;
}

double lattice_optimal_gap(const LatticeModel& tree, const Polynomial& a, std::span<const Component> u,
                           const GapOptions& opt) {
    const LatticePoly lp(tree, a, u);
    const auto bstar = b_star(a, u);
    std::vector<CompiledPolynomial> bc(bstar.begin(), bstar.end());
    ComponentSet reads = lp.reads;
    bool lf = lp.log_forward;
    for (const auto& p : bstar) {
        reads = reads | p.variables();
        lf = lf || p.uses_log_forward();
    }
    double gap = 0.0;
    double vars[kVariableCount] = {};
    const double step = std::log(tree.up()), sigma = step / std::sqrt(tree.dt());
    const double y0 = tree.node(0, 0)[Component::y];
    for (std::size_t i = 0; i < tree.steps(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const auto& nd = tree.node(i, j);
            if (std::abs(nd[Component::y] - y0) > opt.window_stdevs * sigma * std::sqrt(nd.time()) + step) continue;
            const auto bo = lp.optimal_b(i, j);
            load_variables(tree.node(i, j), reads, lf, vars);
            Eigen::VectorXd d(static_cast<Eigen::Index>(u.size()));
            for (std::size_t k = 0; k < u.size(); ++k) d[static_cast<Eigen::Index>(k)] = bo[k] - bc[k].evaluate(vars);
            if (opt.projected) {
                const Eigen::VectorXd up = lp.du(i, j, true);
                gap = std::max(gap, std::abs(d.dot(up)) / up.norm());
            } else {
                gap = std::max(gap, d.norm());
            }
        }
    return gap;
}

} // namespace aggr
