#pragma once

#include <functional>
#include <vector>

#include "aggr/core/partition.hpp"
#include "aggr/core/seed.hpp"
#include "aggr/core/state_path.hpp"
#include "aggr/models/model_spec.hpp"

namespace aggr {

inline const ComponentSet kDefaultPathComponents{Component::F, Component::y, Component::Y,
                                                 Component::P2, Component::P3, Component::Z};

/// Nested Monte Carlo estimate of contract values with per-component standard errors.
struct NestedEstimate {
    ContractState mean;
    ContractState stderr_;
};

/// Inner simulation from (t, F_t, v_t) to T with m_inner antithetic draws (rounded up to even).
NestedEstimate nested_mc_state(const ModelSpec& spec, double t, double F, double v, ComponentSet components,
                               std::size_t m_inner, Engine& rng);

/// Deterministic per-index path source: path(i) depends only on (spec, partition, seed, mode, i).
class PathGenerator {
public:
    /// Validates capabilities up front; throws CapabilityError.
    PathGenerator(ModelSpec spec, Partition partition, SeedSpec seed, StateMode mode,
                  ComponentSet components = kDefaultPathComponents);

    StatePath path(std::uint64_t index) const;
    const ModelSpec& spec() const noexcept { return spec_; }
    const Partition& partition() const noexcept { return partition_; }
    ComponentSet components() const noexcept { return components_; }

private:
    void simulate_forward(Engine& rng, std::vector<double>& F, std::vector<double>& v) const;

    ModelSpec spec_;
    Partition partition_;
    SeedSpec seed_;
    StateMode mode_;
    ComponentSet components_;
};

/// Maximum internal Euler step for Heston.
inline constexpr double kHestonMaxStep = 1.0 / 1000.0;

/// Number of worker threads; 0 means hardware concurrency.
std::size_t resolve_threads(std::size_t threads) noexcept;

/// Runs body(i) for i in [0, n) across threads in contiguous blocks.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

/// n_paths paths, identical for any thread count.
std::vector<StatePath> simulate_paths(const ModelSpec& spec, const Partition& p, std::size_t n_paths,
                                      const SeedSpec& seed, const StateMode& mode,
                                      ComponentSet components = kDefaultPathComponents, std::size_t threads = 1);

} // namespace aggr
