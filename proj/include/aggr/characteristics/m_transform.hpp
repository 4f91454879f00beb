#pragma once

#include <vector>

#include <Eigen/Core>

namespace aggr {

/// Constant coefficient matrices C_1..C_n of a log-martingale family: symmetric, n x n, pairwise commuting.
class LogMartingaleSpec {
public:
    explicit LogMartingaleSpec(std::vector<Eigen::MatrixXd> c);
    /// Univariate case, C = c.
    static LogMartingaleSpec scalar(double c);

    std::size_t dimension() const noexcept { return c_.size(); }
    const std::vector<Eigen::MatrixXd>& matrices() const noexcept { return c_; }
    Eigen::MatrixXd sum() const;

private:
    std::vector<Eigen::MatrixXd> c_;
};

/// m(u) = (sum C_i)^-1 (exp(sum C_i u_i) - I) 1.
/// Uses the shared eigenbasis, with a general matrix exponential as fallback.
/// Throws SingularityError when sum C_i is singular.
Eigen::VectorXd m_transform(const LogMartingaleSpec& spec, const Eigen::VectorXd& u);
double m_transform(const LogMartingaleSpec& spec, double u);

} // namespace aggr
