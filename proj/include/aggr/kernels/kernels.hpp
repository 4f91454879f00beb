#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Elementwise two-point kernels on log returns and the reductions built on them.
// Each batch routine has a scalar reference implementation and, where the CPU
// supports it, an AVX2/FMA implementation chosen once at startup.
namespace aggr::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;

/// Best available ISA, unless the AGGR_ISA environment variable names another.
Isa active_isa() noexcept;
/// Throws ValidationError if `isa` is not available on this CPU/build.
void set_active_isa(Isa isa);

// Scalar reference forms. Series branch for |dy| < kSeriesCutoff.
inline constexpr double kSeriesCutoff = 1.0;

/// 2(e^dy - 1 - dy)
double lambda(double dy) noexcept;
/// 2(dy e^dy - e^dy + 1)
double eta(double dy) noexcept;
/// 6(dy e^dy - 2e^dy + dy + 2)
double tau(double dy) noexcept;

struct KernelTable {
    void (*lambda)(const double* dy, double* out, std::size_t n);
    void (*eta)(const double* dy, double* out, std::size_t n);
    void (*tau)(const double* dy, double* out, std::size_t n);
    double (*lambda_sum)(const double* dy, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*power)(const double* dy, int p, double* out, std::size_t n);
};

/// Table of one ISA's routines; throws ValidationError if unavailable.
const KernelTable& table(Isa isa);

// Dispatched batch API. Spans must have equal length (ValidationError otherwise).
void lambda(std::span<const double> dy, std::span<double> out);
void eta(std::span<const double> dy, std::span<double> out);
void tau(std::span<const double> dy, std::span<double> out);
/// dy^p for p in {2, 3, 4}.
void power(std::span<const double> dy, int p, std::span<double> out);
double lambda_sum(std::span<const double> dy);
double dot(std::span<const double> a, std::span<const double> b);

} // namespace aggr::kernels
