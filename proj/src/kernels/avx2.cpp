// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "aggr/kernels/kernels.hpp"
#include "series.hpp"

namespace aggr::kernels {
namespace {

inline __m256d fmadd(__m256d a, __m256d b, __m256d c) { return _mm256_fmadd_pd(a, b, c); }

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

// e^x for |x| <= 708: x = n ln2 + r, |r| <= ln2/2, degree-13 Taylor for e^r, 2^n by exponent bits.
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    static constexpr double inv_fact[] = {
        1.0,
        1.0,
        1.0 / 2,
        1.0 / 6,
        1.0 / 24,
        1.0 / 120,
        1.0 / 720,
        1.0 / 5040,
        1.0 / 40320,
        1.0 / 362880,
        1.0 / 3628800,
        1.0 / 39916800,
        1.0 / 479001600,
        1.0 / 6227020800.0,
    };
    __m256d p = _mm256_set1_pd(inv_fact[13]);
    for (int k = 12; k >= 0; --k) p = fmadd(p, r, _mm256_set1_pd(inv_fact[k]));

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i bits = _mm256_cvtepi32_epi64(n32);
    bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
    bits = _mm256_slli_epi64(bits, 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

inline __m256d series(const std::array<double, detail::kTerms>& c, __m256d x) {
    __m256d acc = _mm256_set1_pd(c[detail::kTerms - 1]);
    for (std::size_t j = detail::kTerms - 1; j-- > 0;) acc = fmadd(acc, x, _mm256_set1_pd(c[j]));
    return acc;
}

enum class Kind { lambda, eta, tau };

template <Kind K>
inline __m256d closed_form(__m256d x, __m256d ex) {
    const __m256d one = _mm256_set1_pd(1.0), two = _mm256_set1_pd(2.0);
    if constexpr (K == Kind::lambda) {
        return _mm256_mul_pd(two, _mm256_sub_pd(_mm256_sub_pd(ex, one), x));
    } else if constexpr (K == Kind::eta) {
        return _mm256_mul_pd(two, fmadd(_mm256_sub_pd(x, one), ex, one));
    } else {
        return _mm256_mul_pd(_mm256_set1_pd(6.0), fmadd(_mm256_sub_pd(x, two), ex, _mm256_add_pd(x, two)));
    }
}

template <Kind K>
inline __m256d kernel4(__m256d x, bool& scalar_fallback) {
    const __m256d ax = abs_pd(x);
    const __m256d small = _mm256_cmp_pd(ax, _mm256_set1_pd(kSeriesCutoff), _CMP_LT_OQ);
    const auto& c = K == Kind::lambda ? detail::kSeries.lambda
                    : K == Kind::eta  ? detail::kSeries.eta
                                      : detail::kSeries.tau;
    const double scale = K == Kind::tau ? 6.0 : 2.0;
    const __m256d x2 = _mm256_mul_pd(x, x);
    __m256d s = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(scale), x2), series(c, x));
    if (_mm256_movemask_pd(small) == 0xF) return s;
    // exp is only valid for |x| <= 708; NaN lanes also trip this.
    const __m256d in_range = _mm256_cmp_pd(ax, _mm256_set1_pd(708.0), _CMP_LE_OQ);
    if (_mm256_movemask_pd(in_range) != 0xF) {
        scalar_fallback = true;
        return s;
    }
    const __m256d big = closed_form<K>(x, exp_pd(x));
    return _mm256_blendv_pd(big, s, small);
}

template <Kind K>
inline double scalar_kernel(double x) {
    if constexpr (K == Kind::lambda) return lambda(x);
    else if constexpr (K == Kind::eta) return eta(x);
    else return tau(x);
}

template <Kind K>
void kernel_n(const double* dy, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        bool fallback = false;
        const __m256d v = kernel4<K>(_mm256_loadu_pd(dy + i), fallback);
        if (fallback) {
            for (std::size_t j = 0; j < 4; ++j) out[i + j] = scalar_kernel<K>(dy[i + j]);
        } else {
            _mm256_storeu_pd(out + i, v);
        }
    }
    for (; i < n; ++i) out[i] = scalar_kernel<K>(dy[i]);
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v), hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double lambda_sum_n(const double* dy, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        bool fallback = false;
        const __m256d v = kernel4<Kind::lambda>(_mm256_loadu_pd(dy + i), fallback);
        if (fallback) {
            alignas(32) double tmp[4];
            for (std::size_t j = 0; j < 4; ++j) tmp[j] = lambda(dy[i + j]);
            acc = _mm256_add_pd(acc, _mm256_load_pd(tmp));
        } else {
            acc = _mm256_add_pd(acc, v);
        }
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += lambda(dy[i]);
    return s;
}

double dot_n(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = fmadd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = fmadd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) acc0 = fmadd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void power_n(const double* dy, int p, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(dy + i);
        const __m256d x2 = _mm256_mul_pd(x, x);
        const __m256d r = p == 2 ? x2 : p == 3 ? _mm256_mul_pd(x2, x) : _mm256_mul_pd(x2, x2);
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) {
        const double x = dy[i], x2 = x * x;
        out[i] = p == 2 ? x2 : p == 3 ? x2 * x : x2 * x2;
    }
}

constexpr KernelTable kAvx2{kernel_n<Kind::lambda>, kernel_n<Kind::eta>, kernel_n<Kind::tau>,
                            lambda_sum_n, dot_n, power_n};

} // namespace

const KernelTable* detail::avx2_table() noexcept { return &kAvx2; }

} // namespace aggr::kernels
