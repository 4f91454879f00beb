#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "aggr/characteristics/characteristic.hpp"
#include "aggr/harness/report.hpp"
#include "aggr/models/simulate.hpp"

namespace aggr {

struct BiasOptions {
    StateMode mode = ClosedForm{};
    std::size_t threads = 1;
    double z_threshold = 3.0;
    /// Explicit targets by characteristic label; needed where the model has no terminal oracle (Heston).
    std::map<std::string, double> targets;
};

/// E_0[f(u_0, u_T)] from the closed-form time-0 state and the terminal law of y_T.
/// CapabilityError when the model has neither.
double implied_target(const ModelSpec& spec, const Characteristic& c);

/// Path components a study simulates for `cs`: everything they read plus F and y.
ComponentSet study_components(std::span<const Characteristic> cs);

/// Generator used for the k-th partition of a study; its stream is seed.stream_id + k.
PathGenerator study_generator(const ModelSpec& spec, const Partition& p, std::size_t k, const SeedSpec& seed,
                              const StateMode& mode, ComponentSet components);

/// Mean realised characteristic per partition against its implied value, two-sided at z_threshold.
/// All characteristics share the paths of a partition.
StudyReport bias_study(const ModelSpec& spec, std::span<const Characteristic> cs, std::span<const Partition> parts,
                       std::size_t n_paths, const SeedSpec& seed, const BiasOptions& opt = {});
StudyReport bias_study(const ModelSpec& spec, const Characteristic& c, std::span<const Partition> parts,
                       std::size_t n_paths, const SeedSpec& seed, const BiasOptions& opt = {});

enum class BVariant { b_star, fixed_at_start, lattice_optimal };
std::string_view variant_name(BVariant v) noexcept;
/// ValidationError for unknown names.
BVariant parse_variant(std::string_view name);

struct EfficiencyOptions {
    /// Same paths for every Monte Carlo variant; otherwise variant k uses stream seed.stream_id + k.
    bool common_random_numbers = true;
    StateMode mode = ClosedForm{};
    std::size_t threads = 1;
    double z_threshold = 2.0;
};

/// Sample variances of a(u_T) - a(u_0) + sum b^T du under each weight rule, with jackknife errors,
/// followed by ordering rows lattice_optimal <= b_star <= fixed_at_start for the variants given.
/// lattice_optimal is evaluated exactly on a binomial tree with one step per interval; it needs a gbm
/// model and a regular partition.
StudyReport efficiency_study(const ModelSpec& spec, const Polynomial& a, std::span<const Component> u,
                             std::span<const BVariant> variants, const Partition& p, std::size_t n_paths,
                             const SeedSpec& seed, const EfficiencyOptions& opt = {});

/// u_t = c^-1 ln E_t[e^{c y_T}] = y_t + (c - 1) sigma^2 (T - t) / 2 under gbm.
double log_martingale_u(double c, double sigma, double T, double t, double y) noexcept;

struct MartingaleOptions {
    std::size_t threads = 1;
    double z_threshold = 4.0;
};

/// Per-path mean increment of m(u_t) = (e^{c u_t} - 1)/c along the partition, one row per c.
StudyReport log_martingale_study(const ModelSpec& spec, std::span<const double> cs, const Partition& p,
                                 std::size_t n_paths, const SeedSpec& seed, const MartingaleOptions& opt = {});

} // namespace aggr
