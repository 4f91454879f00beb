#include "aggr/harness/studies.hpp"

#include <algorithm>
#include <cmath>

#include "aggr/characteristics/m_transform.hpp"
#include "aggr/core/error.hpp"
#include "aggr/models/closed_form.hpp"
#include "aggr/models/lattice.hpp"

namespace aggr {

namespace {

double initial_variance(const ModelSpec& spec) {
    if (const auto* h = std::get_if<Heston>(&spec.kind())) return h->v0;
    return 0.0;
}

} // namespace

double implied_target(const ModelSpec& spec, const Characteristic& c) {
    if (spec.is_heston())
        throw CapabilityError("no terminal oracle for heston; supply an explicit target for '" + c.label() + "'");
    const Characteristic one[] = {c};
    const auto comps = study_components(one);
    const auto u0 = closed_form_state(spec, 0.0, spec.F0(), initial_variance(spec), comps);
    return terminal_expectation(spec, [&](double y) { return c(u0, boundary_state(spec.T(), y, comps)); });
}

ComponentSet study_components(std::span<const Characteristic> cs) {
    ComponentSet comps{Component::F, Component::y};
    for (const auto& c : cs) comps = comps | c.required_components();
    return comps;
}

PathGenerator study_generator(const ModelSpec& spec, const Partition& p, std::size_t k, const SeedSpec& seed,
                              const StateMode& mode, ComponentSet components) {
    return PathGenerator(spec, p, {seed.master_seed, seed.stream_id + k}, mode, components);
}

StudyReport bias_study(const ModelSpec& spec, std::span<const Characteristic> cs, std::span<const Partition> parts,
                       std::size_t n_paths, const SeedSpec& seed, const BiasOptions& opt) {
    if (cs.empty()) throw ValidationError("bias study needs at least one characteristic");
    if (parts.empty()) throw ValidationError("bias study needs at least one partition");
    if (n_paths < 2) throw ValidationError("bias study needs at least two paths");
    const auto comps = study_components(cs);
    std::vector<double> targets;
    for (const auto& c : cs) {
        const auto it = opt.targets.find(c.label());
        targets.push_back(it != opt.targets.end() ? it->second : implied_target(spec, c));
    }
    // every generator is built (and validated) before any path is drawn
    std::vector<PathGenerator> gens;
    for (std::size_t k = 0; k < parts.size(); ++k)
        gens.push_back(study_generator(spec, parts[k], k, seed, opt.mode, comps));

    StudyReport report("bias " + std::string(spec.name()));
    std::vector<std::vector<double>> values(cs.size(), std::vector<double>(n_paths));
    for (std::size_t k = 0; k < parts.size(); ++k) {
        parallel_for(n_paths, opt.threads, [&](std::size_t i) {
            const auto path = gens[k].path(i);
            for (std::size_t j = 0; j < cs.size(); ++j) values[j][i] = realise(cs[j], path);
        });
        for (std::size_t j = 0; j < cs.size(); ++j) {
            const auto s = summarize(values[j]);
            report.add(cs[j].label() + " " + describe_partition(parts[k]), n_paths, s.mean, s.stderr_, targets[j],
                       RowTest::two_sided, opt.z_threshold);
        }
    }
    return report;
}

StudyReport bias_study(const ModelSpec& spec, const Characteristic& c, std::span<const Partition> parts,
                       std::size_t n_paths, const SeedSpec& seed, const BiasOptions& opt) {
    const Characteristic one[] = {c};
    return bias_study(spec, one, parts, n_paths, seed, opt);
}

std::string_view variant_name(BVariant v) noexcept {
    switch (v) {
    case BVariant::b_star: return "b_star";
    case BVariant::fixed_at_start: return "fixed_at_start";
    case BVariant::lattice_optimal: return "lattice_optimal";
    }
    return "?";
}

BVariant parse_variant(std::string_view name) {
    for (auto v : {BVariant::b_star, BVariant::fixed_at_start, BVariant::lattice_optimal})
        if (variant_name(v) == name) return v;
    throw ValidationError("unknown weight variant '" + std::string(name) +
                          "' (expected b_star, fixed_at_start or lattice_optimal)");
}

StudyReport efficiency_study(const ModelSpec& spec, const Polynomial& a, std::span<const Component> u,
                             std::span<const BVariant> variants, const Partition& p, std::size_t n_paths,
                             const SeedSpec& seed, const EfficiencyOptions& opt) {
    if (variants.empty()) throw ValidationError("efficiency study needs at least one weight variant");
    if (n_paths < 3) throw ValidationError("efficiency study needs at least three paths");
    auto has = [&](BVariant v) { return std::find(variants.begin(), variants.end(), v) != variants.end(); };
    std::vector<BVariant> mc;
    for (auto v : {BVariant::b_star, BVariant::fixed_at_start})
        if (has(v)) mc.push_back(v);
    const std::string part = describe_partition(p);
    const bool lattice = has(BVariant::lattice_optimal);
    if (lattice && (!spec.is_gbm() || part.rfind("regular(", 0) != 0))
        throw ValidationError("lattice_optimal needs a gbm model and a regular partition");

    const Characteristic ch("a", {u.begin(), u.end()}, a, b_star(a, u));
    const Characteristic one[] = {ch};
    const auto comps = study_components(one);
    StudyReport report("efficiency " + std::string(spec.name()));

    std::vector<std::vector<double>> values(mc.size(), std::vector<double>(n_paths));
    if (!mc.empty()) {
        const std::size_t gens = opt.common_random_numbers ? 1 : mc.size();
        std::vector<PathGenerator> g;
        for (std::size_t k = 0; k < gens; ++k) g.push_back(study_generator(spec, p, k, seed, opt.mode, comps));
        auto eval = [&](BVariant v, const StatePath& path) {
            return v == BVariant::b_star ? realise(ch, path) : realise_fixed_b(ch, path);
        };
        if (opt.common_random_numbers) {
            parallel_for(n_paths, opt.threads, [&](std::size_t i) {
                const auto path = g[0].path(i);
                for (std::size_t k = 0; k < mc.size(); ++k) values[k][i] = eval(mc[k], path);
            });
        } else {
            for (std::size_t k = 0; k < mc.size(); ++k)
                parallel_for(n_paths, opt.threads, [&](std::size_t i) { values[k][i] = eval(mc[k], g[k].path(i)); });
        }
    }
    std::vector<VarianceEstimate> var;
    for (std::size_t k = 0; k < mc.size(); ++k) {
        var.push_back(jackknife_variance(values[k]));
        report.add("Var[" + std::string(variant_name(mc[k])) + "] " + part, n_paths, var[k].variance, var[k].stderr_,
                   0.0, RowTest::info, opt.z_threshold);
    }
    if (mc.size() == 2) {
        VarianceEstimate d;
        if (opt.common_random_numbers) {
            d = jackknife_variance_difference(values[0], values[1]);
        } else {
            d.variance = var[0].variance - var[1].variance;
            d.stderr_ = std::hypot(var[0].stderr_, var[1].stderr_);
        }
        report.add("Var[b_star] - Var[fixed_at_start] " + part, n_paths, d.variance, d.stderr_, 0.0, RowTest::below,
                   opt.z_threshold);
    }

    if (lattice) {
        const double sigma = std::get<Gbm>(spec.kind()).sigma;
        const auto tree = LatticeModel::build(spec.F0(), sigma, spec.T(), p.intervals());
        const auto bopt = lattice_discrete_optimal_b_all(tree, a, u);
        const auto bs = b_star(a, u);
        const double v_opt = lattice_estimator_variance(tree, a, u, [&](std::size_t i, std::size_t j) { return bopt[i][j]; });
        const double v_star = lattice_estimator_variance(tree, a, u, [&](std::size_t i, std::size_t j) {
            std::vector<double> b;
            for (const auto& q : bs) b.push_back(q.evaluate(tree.node(i, j)));
            return b;
        });
        const std::string tag = " lattice(" + std::to_string(tree.steps()) + ")";
        report.add("Var[lattice_optimal]" + tag, 0, v_opt, 0.0, 0.0, RowTest::info, opt.z_threshold);
        report.add("Var[b_star]" + tag, 0, v_star, 0.0, 0.0, RowTest::info, opt.z_threshold);
        report.add("Var[lattice_optimal] - Var[b_star]" + tag, 0, v_opt - v_star, 0.0, 0.0, RowTest::below,
                   opt.z_threshold);
    }
    return report;
}

double log_martingale_u(double c, double sigma, double T, double t, double y) noexcept {
    return y + 0.5 * (c - 1.0) * sigma * sigma * (T - t);
}

StudyReport log_martingale_study(const ModelSpec& spec, std::span<const double> cs, const Partition& p,
                                 std::size_t n_paths, const SeedSpec& seed, const MartingaleOptions& opt) {
    if (!spec.is_gbm()) throw CapabilityError("the log-martingale study runs on a gbm host");
    if (cs.empty()) throw ValidationError("log-martingale study needs at least one c");
    if (n_paths < 2) throw ValidationError("log-martingale study needs at least two paths");
    std::vector<LogMartingaleSpec> specs;
    for (double c : cs) specs.push_back(LogMartingaleSpec::scalar(c));
    const double sigma = std::get<Gbm>(spec.kind()).sigma, T = spec.T();
    const auto gen = study_generator(spec, p, 0, seed, ClosedForm{}, {Component::F, Component::y});
    const double N = static_cast<double>(p.intervals());
    std::vector<std::vector<double>> values(cs.size(), std::vector<double>(n_paths));
    parallel_for(n_paths, opt.threads, [&](std::size_t i) {
        const auto path = gen.path(i);
        const auto& first = path[0];
        const auto& last = path[path.size() - 1];
        for (std::size_t k = 0; k < cs.size(); ++k) {
            const double m0 = m_transform(specs[k], log_martingale_u(cs[k], sigma, T, first.time(), first[Component::y]));
            const double m1 = m_transform(specs[k], log_martingale_u(cs[k], sigma, T, last.time(), last[Component::y]));
            values[k][i] = (m1 - m0) / N;
        }
    });
    StudyReport report("log-martingale " + std::string(spec.name()));
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const auto s = summarize(values[k]);
        report.add("m(u) c=" + format_double(cs[k]) + " " + describe_partition(p), n_paths, s.mean, s.stderr_, 0.0,
                   RowTest::two_sided, opt.z_threshold);
    }
    return report;
}

} // namespace aggr
