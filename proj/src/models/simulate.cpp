#include "aggr/models/simulate.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <thread>

#include "aggr/core/error.hpp"
#include "aggr/models/closed_form.hpp"

namespace aggr {

namespace {

std::size_t heston_substeps(double dt) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt / kHestonMaxStep - 1e-9)));
}

// One full-truncation Euler step of (y, v); z1 drives y, z2 is independent.
inline void heston_step(const Heston& h, double dt, double z1, double z2, double& y, double& v) {
    const double vp = std::max(v, 0.0), sv = std::sqrt(vp), sdt = std::sqrt(dt);
    const double zv = h.rho * z1 + std::sqrt(std::max(0.0, 1.0 - h.rho * h.rho)) * z2;
    y += -0.5 * vp * dt + sv * sdt * z1;
    v += h.kappa * (h.theta - vp) * dt + h.xi * sv * sdt * zv;
}

struct Accumulator {
    // pair averages of y, y^2, y^3, y^4, F y
    double sum[5] = {0, 0, 0, 0, 0};
    double sq[5] = {0, 0, 0, 0, 0};
    std::size_t n = 0;

    void add_pair(double ya, double yb) {
        const double fa = std::exp(ya), fb = std::exp(yb);
        const double g[5] = {0.5 * (ya + yb), 0.5 * (ya * ya + yb * yb), 0.5 * (ya * ya * ya + yb * yb * yb),
                             0.5 * (ya * ya * ya * ya + yb * yb * yb * yb), 0.5 * (fa * ya + fb * yb)};
        for (int k = 0; k < 5; ++k) {
            sum[k] += g[k];
            sq[k] += g[k] * g[k];
        }
        ++n;
    }
    double mean(int k) const { return sum[k] / static_cast<double>(n); }
    double se(int k) const {
        if (n < 2) return 0.0;
        const double m = mean(k);
        const double var = std::max(0.0, (sq[k] - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

} // namespace

NestedEstimate nested_mc_state(const ModelSpec& spec, double t, double F, double v, ComponentSet components,
                               std::size_t m_inner, Engine& rng) {
    if (m_inner < 2) throw ValidationError("nested Monte Carlo needs at least two inner draws");
    const double h = spec.T() - t;
    const double y = std::log(F);
    if (h <= 0.0) {
        ContractState zero(t);
        for (auto c : components.members()) zero.set(c, 0.0);
        return {boundary_state(t, y, components), zero};
    }

    std::normal_distribution<double> n01;
    Accumulator acc;
    const std::size_t pairs = (m_inner + 1) / 2;
    if (const auto* g = std::get_if<Gbm>(&spec.kind())) {
        const double sd = g->sigma * std::sqrt(h), mu = -0.5 * sd * sd;
        for (std::size_t k = 0; k < pairs; ++k) {
            const double z = n01(rng);
            acc.add_pair(y + mu + sd * z, y + mu - sd * z);
        }
    } else if (const auto* m = std::get_if<Merton>(&spec.kind())) {
        const double sd = m->sigma * std::sqrt(h), mu = merton_drift(*m) * h;
        std::poisson_distribution<long> jumps(m->jump_intensity * h);
        for (std::size_t k = 0; k < pairs; ++k) {
            const double z = n01(rng);
            double ja = 0.0, jb = 0.0;
            const long nj = m->jump_intensity > 0.0 ? jumps(rng) : 0;
            for (long j = 0; j < nj; ++j) {
                const double zj = n01(rng);
                ja += m->jump_mean + m->jump_stdev * zj;
                jb += m->jump_mean - m->jump_stdev * zj;
            }
            acc.add_pair(y + mu + sd * z + ja, y + mu - sd * z + jb);
        }
    } else {
        const auto& hs = std::get<Heston>(spec.kind());
        const std::size_t ns = heston_substeps(h);
        const double dt = h / static_cast<double>(ns);
        for (std::size_t k = 0; k < pairs; ++k) {
            double ya = y, va = v, yb = y, vb = v;
            for (std::size_t s = 0; s < ns; ++s) {
                const double z1 = n01(rng), z2 = n01(rng);
                heston_step(hs, dt, z1, z2, ya, va);
                heston_step(hs, dt, -z1, -z2, yb, vb);
            }
            acc.add_pair(ya, yb);
        }
    }

    NestedEstimate est{ContractState(t), ContractState(t)};
    const double Y = acc.mean(0), Z = acc.mean(4);
    for (auto c : components.members()) {
        switch (c) {
        case Component::F: est.mean.set(c, F); est.stderr_.set(c, 0.0); break;
        case Component::y: est.mean.set(c, y); est.stderr_.set(c, 0.0); break;
        case Component::Y: est.mean.set(c, Y); est.stderr_.set(c, acc.se(0)); break;
        case Component::P2: est.mean.set(c, acc.mean(1)); est.stderr_.set(c, acc.se(1)); break;
        case Component::P3: est.mean.set(c, acc.mean(2)); est.stderr_.set(c, acc.se(2)); break;
        case Component::P4: est.mean.set(c, acc.mean(3)); est.stderr_.set(c, acc.se(3)); break;
        case Component::Z: est.mean.set(c, Z); est.stderr_.set(c, acc.se(4)); break;
        case Component::v_lambda: est.mean.set(c, 2.0 * (y - Y)); est.stderr_.set(c, 2.0 * acc.se(0)); break;
        case Component::v_eta: est.mean.set(c, 2.0 * (Z / F - y)); est.stderr_.set(c, 2.0 * acc.se(4) / F); break;
        }
    }
    return est;
}

PathGenerator::PathGenerator(ModelSpec spec, Partition partition, SeedSpec seed, StateMode mode,
                             ComponentSet components)
    : spec_(std::move(spec)), partition_(std::move(partition)), seed_(seed), mode_(mode), components_(components) {
    if (std::abs(partition_.horizon() - spec_.T()) > 1e-12 * spec_.T())
        throw ValidationError("partition horizon " + std::to_string(partition_.horizon()) +
                              " does not match model maturity " + std::to_string(spec_.T()));
    if (const auto* nm = std::get_if<NestedMc>(&mode_); nm && nm->m_inner < 2)
        throw ValidationError("nested Monte Carlo needs at least two inner draws");
    require_support(spec_, mode_, components_);
}

void PathGenerator::simulate_forward(Engine& rng, std::vector<double>& y, std::vector<double>& v) const {
    const auto t = partition_.times();
    y.assign(t.size(), std::log(spec_.F0()));
    v.assign(t.size(), 0.0);
    std::normal_distribution<double> n01;
    if (const auto* g = std::get_if<Gbm>(&spec_.kind())) {
        for (std::size_t i = 1; i < t.size(); ++i) {
            const double dt = t[i] - t[i - 1];
            y[i] = y[i - 1] - 0.5 * g->sigma * g->sigma * dt + g->sigma * std::sqrt(dt) * n01(rng);
        }
    } else if (const auto* m = std::get_if<Merton>(&spec_.kind())) {
        const double drift = merton_drift(*m);
        for (std::size_t i = 1; i < t.size(); ++i) {
            const double dt = t[i] - t[i - 1];
            double step = drift * dt + m->sigma * std::sqrt(dt) * n01(rng);
            if (m->jump_intensity > 0.0) {
                std::poisson_distribution<long> jumps(m->jump_intensity * dt);
                const long nj = jumps(rng);
                for (long j = 0; j < nj; ++j) step += m->jump_mean + m->jump_stdev * n01(rng);
            }
            y[i] = y[i - 1] + step;
        }
    } else {
        const auto& hs = std::get<Heston>(spec_.kind());
        double yy = y[0], vv = hs.v0;
        v[0] = vv;
        for (std::size_t i = 1; i < t.size(); ++i) {
            const double dt = t[i] - t[i - 1];
            const std::size_t ns = heston_substeps(dt);
            const double h = dt / static_cast<double>(ns);
            for (std::size_t s = 0; s < ns; ++s) {
                const double z1 = n01(rng), z2 = n01(rng);
                heston_step(hs, h, z1, z2, yy, vv);
            }
            y[i] = yy;
            v[i] = std::max(vv, 0.0);
        }
    }
}

StatePath PathGenerator::path(std::uint64_t index) const {
    Engine rng = make_engine(seed_, index, 0);
    std::vector<double> y, v;
    simulate_forward(rng, y, v);
    const auto t = partition_.times();
    std::vector<ContractState> states;
    states.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double F = std::exp(y[i]);
        if (std::holds_alternative<ClosedForm>(mode_)) {
            auto u = closed_form_state(spec_, t[i], F, v[i], components_);
            if (components_.contains(Component::y)) u.set(Component::y, y[i]);
            states.push_back(u);
        } else {
            Engine inner = make_engine(seed_, index, 1 + i);
            states.push_back(nested_mc_state(spec_, t[i], F, v[i], components_,
                                             std::get<NestedMc>(mode_).m_inner, inner).mean);
        }
    }
    return StatePath(partition_, std::move(states));
}

std::size_t resolve_threads(std::size_t threads) noexcept {
    if (threads) return threads;
    const auto hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
    threads = std::min(resolve_threads(threads), std::max<std::size_t>(n, 1));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = n * t / threads; i < n * (t + 1) / threads; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<StatePath> simulate_paths(const ModelSpec& spec, const Partition& p, std::size_t n_paths,
                                      const SeedSpec& seed, const StateMode& mode, ComponentSet components,
                                      std::size_t threads) {
    if (n_paths < 1) throw ValidationError("n_paths must be at least 1");
    const PathGenerator gen(spec, p, seed, mode, components);
    std::vector<std::optional<StatePath>> slots(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) { slots[i].emplace(gen.path(i)); });
    std::vector<StatePath> out;
    out.reserve(n_paths);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace aggr
