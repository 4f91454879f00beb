#include <atomic>
#include <cstdlib>
#include <string>

#include "aggr/core/error.hpp"
#include "aggr/kernels/kernels.hpp"
#include "series.hpp"

namespace aggr::kernels {

#ifndef AGGR_HAVE_AVX2
const KernelTable* detail::avx2_table() noexcept { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa initial_isa() noexcept {
    const bool avx2 = isa_available(Isa::avx2);
    if (const char* env = std::getenv("AGGR_ISA")) {
        const std::string v(env);
        if (v == "scalar") return Isa::scalar;
        if (v == "avx2" && avx2) return Isa::avx2;
    }
    return avx2 ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() noexcept {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw ValidationError("kernel input and output spans differ in length");
}

} // namespace

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) noexcept {
    if (isa == Isa::scalar) return true;
    return detail::avx2_table() != nullptr && cpu_has_avx2();
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_available(isa))
        throw ValidationError("kernel ISA '" + std::string(isa_name(isa)) + "' is not available");
    active().store(isa, std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
    if (!isa_available(isa))
        throw ValidationError("kernel ISA '" + std::string(isa_name(isa)) + "' is not available");
    return isa == Isa::avx2 ? *detail::avx2_table() : detail::scalar_table();
}

void lambda(std::span<const double> dy, std::span<double> out) {
    check_sizes(dy.size(), out.size());
    table(active_isa()).lambda(dy.data(), out.data(), dy.size());
}

void eta(std::span<const double> dy, std::span<double> out) {
    check_sizes(dy.size(), out.size());
    table(active_isa()).eta(dy.data(), out.data(), dy.size());
}

void tau(std::span<const double> dy, std::span<double> out) {
    check_sizes(dy.size(), out.size());
    table(active_isa()).tau(dy.data(), out.data(), dy.size());
}

void power(std::span<const double> dy, int p, std::span<double> out) {
    if (p < 2 || p > 4) throw ValidationError("power return order must be 2, 3 or 4");
    check_sizes(dy.size(), out.size());
    table(active_isa()).power(dy.data(), p, out.data(), dy.size());
}

double lambda_sum(std::span<const double> dy) {
    return table(active_isa()).lambda_sum(dy.data(), dy.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    return table(active_isa()).dot(a.data(), b.data(), a.size());
}

} // namespace aggr::kernels
