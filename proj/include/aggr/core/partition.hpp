#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aggr {

struct SeedSpec;

/// Monitoring times 0 = t_0 < t_1 < ... < t_N = T (years). Not necessarily regular.
class Partition {
public:
    /// Validates the invariants; throws ValidationError.
    explicit Partition(std::vector<double> times);

    static Partition regular(double T, std::size_t n);
    static Partition from_times(std::vector<double> times) { return Partition(std::move(times)); }
    /// N-1 interior points drawn uniformly on (0, T), sorted; redrawn until every
    /// interval is at least kMinInterval long.
    static Partition random(double T, std::size_t n, const SeedSpec& seed);

    static constexpr double kMinInterval = 1e-9;

    std::span<const double> times() const noexcept { return times_; }
    double operator[](std::size_t i) const noexcept { return times_[i]; }
    /// Number of intervals N.
    std::size_t intervals() const noexcept { return times_.size() - 1; }
    std::size_t size() const noexcept { return times_.size(); }
    double horizon() const noexcept { return times_.back(); }

    bool operator==(const Partition&) const = default;

private:
    std::vector<double> times_;
};

/// Splits every interval into `factor` equal subintervals.
Partition refine(const Partition& p, std::size_t factor);

} // namespace aggr
