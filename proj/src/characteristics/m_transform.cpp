#include "aggr/characteristics/m_transform.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "aggr/core/error.hpp"

namespace aggr {

namespace {
constexpr double kCommuteTol = 1e-10;
constexpr double kDiagonalTol = 1e-10;
constexpr double kSingularTol = 1e-13;

double scale_of(const Eigen::MatrixXd& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }
} // namespace

LogMartingaleSpec::LogMartingaleSpec(std::vector<Eigen::MatrixXd> c) : c_(std::move(c)) {
    const auto n = static_cast<Eigen::Index>(c_.size());
    if (n == 0) throw ValidationError("log-martingale spec needs at least one matrix");
    for (std::size_t i = 0; i < c_.size(); ++i) {
        const auto& m = c_[i];
        if (m.rows() != n || m.cols() != n)
            throw ValidationError("C_" + std::to_string(i + 1) + " must be " + std::to_string(n) + "x" +
                                  std::to_string(n));
        if (!m.allFinite()) throw ValidationError("C_" + std::to_string(i + 1) + " has non-finite entries");
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > kCommuteTol * scale_of(m))
            throw ValidationError("C_" + std::to_string(i + 1) + " is not symmetric");
    }
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = i + 1; j < c_.size(); ++j) {
            const Eigen::MatrixXd comm = c_[i] * c_[j] - c_[j] * c_[i];
            if (comm.cwiseAbs().maxCoeff() > kCommuteTol * scale_of(c_[i]) * scale_of(c_[j]))
                throw ValidationError("C_" + std::to_string(i + 1) + " and C_" + std::to_string(j + 1) +
                                      " do not commute");
        }
}

LogMartingaleSpec LogMartingaleSpec::scalar(double c) {
    return LogMartingaleSpec({Eigen::MatrixXd::Constant(1, 1, c)});
}

Eigen::MatrixXd LogMartingaleSpec::sum() const {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(c_[0].rows(), c_[0].cols());
    for (const auto& m : c_) s += m;
    return s;
}

Eigen::VectorXd m_transform(const LogMartingaleSpec& spec, const Eigen::VectorXd& u) {
    const auto n = static_cast<Eigen::Index>(spec.dimension());
    if (u.size() != n) throw ValidationError("u has " + std::to_string(u.size()) + " entries, expected " +
                                             std::to_string(n));
    const auto& cs = spec.matrices();
    const Eigen::MatrixXd s = spec.sum();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m += cs[static_cast<std::size_t>(i)] * u[i];

    // A generic combination of commuting symmetric matrices separates their joint eigenspaces.
    Eigen::MatrixXd probe = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) probe += cs[static_cast<std::size_t>(i)] * (1.0 + 0.6180339887 * (i + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(probe);
    const Eigen::MatrixXd& q = eig.eigenvectors();
    const Eigen::MatrixXd ds = q.transpose() * s * q;
    const Eigen::MatrixXd dm = q.transpose() * m * q;
    const double off_s = (ds - Eigen::MatrixXd(ds.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
    const double off_m = (dm - Eigen::MatrixXd(dm.diagonal().asDiagonal())).cwiseAbs().maxCoeff();

    const double smax = s.cwiseAbs().maxCoeff();
    if (smax == 0.0) throw SingularityError("sum of C_i is zero");

    if (eig.info() == Eigen::Success && off_s <= kDiagonalTol * scale_of(s) && off_m <= kDiagonalTol * scale_of(m)) {
        const Eigen::VectorXd sd = ds.diagonal();
        const double top = sd.cwiseAbs().maxCoeff();
        Eigen::VectorXd w(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            if (std::abs(sd[k]) <= kSingularTol * top)
                throw SingularityError("sum of C_i is singular (eigenvalue " + std::to_string(sd[k]) + ")");
            w[k] = std::expm1(dm(k, k)) / sd[k];
        }
        return q * w.asDiagonal() * (q.transpose() * Eigen::VectorXd::Ones(n));
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
    lu.setThreshold(kSingularTol);
    if (!lu.isInvertible()) throw SingularityError("sum of C_i is singular");
    const Eigen::MatrixXd e = m.exp() - Eigen::MatrixXd::Identity(n, n);
    return lu.solve(e * Eigen::VectorXd::Ones(n));
}

double m_transform(const LogMartingaleSpec& spec, double u) {
    if (spec.dimension() != 1) throw ValidationError("scalar m_transform needs a univariate spec");
    const double c = spec.matrices()[0](0, 0);
    if (c == 0.0) throw SingularityError("C is zero");
    return std::expm1(c * u) / c;
}

} // namespace aggr
