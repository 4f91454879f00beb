#pragma once

#include <array>
#include <cstddef>

#include "aggr/kernels/kernels.hpp"

namespace aggr::kernels::detail {

// Power-series coefficients c_j for x^2 * sum_j c_j x^j, j = 0..kTerms-1 (k = j + 2):
//   lambda/2 : 1/k!      eta/2 : (k-1)/k!      tau/6 : (k-2)/k!
inline constexpr std::size_t kTerms = 19;

struct SeriesCoefficients {
    std::array<double, kTerms> lambda{};
    std::array<double, kTerms> eta{};
    std::array<double, kTerms> tau{};
};

constexpr SeriesCoefficients make_series() {
    SeriesCoefficients s;
    double fact = 1.0;  // k!
    for (std::size_t k = 1; k <= kTerms + 1; ++k) {
        fact *= static_cast<double>(k);
        if (k < 2) continue;
        const std::size_t j = k - 2;
        const double kk = static_cast<double>(k);
        s.lambda[j] = 1.0 / fact;
        s.eta[j] = (kk - 1.0) / fact;
        s.tau[j] = (kk - 2.0) / fact;
    }
    return s;
}

inline constexpr SeriesCoefficients kSeries = make_series();

template <class T, class MulAdd>
inline T horner(const std::array<double, kTerms>& c, T x, MulAdd fma) {
    T acc = T(c[kTerms - 1]);
    for (std::size_t j = kTerms - 1; j-- > 0;) acc = fma(acc, x, T(c[j]));
    return acc;
}

const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not built

} // namespace aggr::kernels::detail
