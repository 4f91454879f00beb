#include <cmath>

#include "aggr/kernels/kernels.hpp"
#include "series.hpp"

namespace aggr::kernels {

namespace {
inline double mul_add(double a, double b, double c) { return a * b + c; }
} // namespace

double lambda(double dy) noexcept {
    if (std::abs(dy) < kSeriesCutoff)
        return 2.0 * dy * dy * detail::horner(detail::kSeries.lambda, dy, mul_add);
    if (dy == HUGE_VAL) return HUGE_VAL;
    return 2.0 * (std::exp(dy) - 1.0 - dy);
}

double eta(double dy) noexcept {
    if (std::abs(dy) < kSeriesCutoff)
        return 2.0 * dy * dy * detail::horner(detail::kSeries.eta, dy, mul_add);
    if (dy == -HUGE_VAL) return 2.0;
    return 2.0 * ((dy - 1.0) * std::exp(dy) + 1.0);
}

double tau(double dy) noexcept {
    if (std::abs(dy) < kSeriesCutoff)
        return 6.0 * dy * dy * detail::horner(detail::kSeries.tau, dy, mul_add);
    if (dy == -HUGE_VAL) return -HUGE_VAL;
    return 6.0 * ((dy - 2.0) * std::exp(dy) + dy + 2.0);
}

namespace {

void lambda_n(const double* dy, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = lambda(dy[i]);
}
void eta_n(const double* dy, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = eta(dy[i]);
}
void tau_n(const double* dy, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = tau(dy[i]);
}
double lambda_sum_n(const double* dy, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += lambda(dy[i]);
    return s;
}
double dot_n(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}
void power_n(const double* dy, int p, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double x = dy[i], x2 = x * x;
        out[i] = p == 2 ? x2 : p == 3 ? x2 * x : x2 * x2;
    }
}

constexpr KernelTable kScalar{lambda_n, eta_n, tau_n, lambda_sum_n, dot_n, power_n};

} // namespace

const KernelTable& detail::scalar_table() noexcept { return kScalar; }

} // namespace aggr::kernels
