#include "aggr/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "aggr/characteristics/library.hpp"
#include "aggr/characteristics/spec_io.hpp"
#include "aggr/harness/figures.hpp"
#include "aggr/harness/premium.hpp"
#include "aggr/harness/studies.hpp"
#include "aggr/models/lattice.hpp"
#include "aggr/replication/replication.hpp"

namespace aggr::cli {

namespace {

constexpr std::string_view kModelKeys[] = {"kind", "F0", "T", "sigma", "jump_intensity", "jump_mean",
                                           "jump_stdev", "v0", "kappa", "theta", "xi", "rho", "mode", "m_inner"};

void allow_model(const Config& cfg) {
    if (!cfg.has_section("model")) return;
    for (const auto& k : cfg.keys("model"))
        if (std::find(std::begin(kModelKeys), std::end(kModelKeys), k) == std::end(kModelKeys))
            cfg.fail("model", k, "unknown key");
}

SeedSpec seed_from(const Config& cfg) { return {cfg.get_u64("", "seed", 0), 0}; }

std::size_t positive_size(const Config& cfg, std::string_view sec, std::string_view key, std::size_t fallback,
                          std::size_t min = 1) {
    const auto v = cfg.get_size(sec, key, fallback);
    if (v < min) cfg.fail(sec, key, "must be at least " + std::to_string(min));
    return v;
}

double positive_double(const Config& cfg, std::string_view sec, std::string_view key, double fallback) {
    const double v = cfg.get_double(sec, key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) cfg.fail(sec, key, "must be a finite positive number");
    return v;
}

template <class F>
auto config_guard(const Config& cfg, std::string_view sec, std::string_view key, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        cfg.fail(sec, key, e.what());
    }
}

std::vector<Characteristic> characteristics_from(const Config& cfg, std::string_view sec, std::string_view key,
                                                 std::vector<std::string> fallback) {
    std::vector<Characteristic> out;
    for (const auto& name : cfg.get_list(sec, key, fallback))
        out.push_back(config_guard(cfg, sec, key, [&] { return characteristic_by_name(name); }));
    return out;
}

QuadratureSpec quadrature_from(const Config& cfg, std::string_view sec) {
    const auto grid = cfg.get_string(sec, "grid", "as_given");
    if (grid == "as_given") {
        if (cfg.has(sec, "n_points") || cfg.has(sec, "width")) cfg.fail(sec, "grid", "n_points and width need grid = log_uniform");
        return {};
    }
    if (grid != "log_uniform") cfg.fail(sec, "grid", "expected as_given or log_uniform");
    LogUniform lu;
    lu.n_points = cfg.get_size(sec, "n_points", lu.n_points);
    lu.width_in_stdevs = cfg.get_double(sec, "width", lu.width_in_stdevs);
    return config_guard(cfg, sec, "n_points", [&] { return QuadratureSpec(lu); });
}

OptionChain chain_from(const Config& cfg, std::string_view sec) {
    const auto path = cfg.get_path(sec, "chain");
    std::ifstream in(path);
    if (!in) cfg.fail(sec, "chain", "cannot open '" + path.string() + "'");
    try {
        return read_chain_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::vector<StatePath> paths_from(const Config& cfg, std::string_view sec) {
    const auto path = cfg.get_path(sec, "paths");
    std::ifstream in(path);
    if (!in) cfg.fail(sec, "paths", "cannot open '" + path.string() + "'");
    try {
        return read_paths_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::filesystem::path output(const RunContext& ctx, const std::string& name) {
    std::filesystem::create_directories(ctx.out_dir);
    return ctx.out_dir / name;
}

template <class F>
void write_output(const RunContext& ctx, const std::string& name, F&& body) {
    const auto path = output(ctx, name);
    std::ostringstream os;
    body(os);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + path.string() + "'");
    f << os.str();
    *ctx.out << "wrote " << path.string() << '\n';
}

std::string output_name(const Config& cfg, std::string_view sec, std::string_view key, const std::string& fallback) {
    const auto name = cfg.get_string(sec, key, fallback);
    if (std::filesystem::path(name).is_absolute()) return name;
    return name;
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(6) << v;
    return os.str();
}

} // namespace

ModelSpec model_from_config(const Config& cfg) {
    const std::string kind = cfg.get_string("model", "kind", "gbm");
    const double F0 = cfg.get_double("model", "F0", 100.0), T = cfg.get_double("model", "T", 1.0);
    auto only = [&](std::initializer_list<std::string_view> keys) {
        for (auto k : kModelKeys) {
            const bool shared = k == "kind" || k == "F0" || k == "T" || k == "mode" || k == "m_inner";
            if (!shared && cfg.has("model", k) && std::find(keys.begin(), keys.end(), k) == keys.end())
                cfg.fail("model", k, "does not apply to kind = " + kind);
        }
    };
    return config_guard(cfg, "model", "kind", [&]() -> ModelSpec {
        if (kind == "gbm") {
            only({"sigma"});
            return ModelSpec::gbm(cfg.get_double("model", "sigma", 0.2), F0, T);
        }
        if (kind == "merton") {
            only({"sigma", "jump_intensity", "jump_mean", "jump_stdev"});
            return ModelSpec::merton(cfg.get_double("model", "sigma", 0.2), cfg.get_double("model", "jump_intensity", 0.0),
                                     cfg.get_double("model", "jump_mean", 0.0), cfg.get_double("model", "jump_stdev", 0.0),
                                     F0, T);
        }
        if (kind == "heston") {
            only({"v0", "kappa", "theta", "xi", "rho"});
            Heston h;
            h.v0 = cfg.get_double("model", "v0", h.v0);
            h.kappa = cfg.get_double("model", "kappa", h.kappa);
            h.theta = cfg.get_double("model", "theta", h.theta);
            h.xi = cfg.get_double("model", "xi", h.xi);
            h.rho = cfg.get_double("model", "rho", h.rho);
            return ModelSpec::heston(h, F0, T);
        }
        cfg.fail("model", "kind", "expected gbm, merton or heston");
    });
}

StateMode state_mode_from_config(const Config& cfg) {
    const auto mode = cfg.get_string("model", "mode", "closed_form");
    if (mode == "closed_form") {
        if (cfg.has("model", "m_inner")) cfg.fail("model", "m_inner", "applies only to mode = nested_mc");
        return ClosedForm{};
    }
    if (mode == "nested_mc") return NestedMc{positive_size(cfg, "model", "m_inner", NestedMc{}.m_inner, 2)};
    cfg.fail("model", "mode", "expected closed_form or nested_mc");
}

Partition parse_partition(const std::string& text, double T, const SeedSpec& seed, std::size_t index) {
    const auto open = text.find('(');
    if (open == std::string::npos || text.back() != ')')
        throw ValidationError("partition '" + text + "' is not regular(N), random(N) or times(...)");
    const std::string kind = text.substr(0, open), body = text.substr(open + 1, text.size() - open - 2);
    if (kind == "regular" || kind == "random") {
        std::size_t n = 0;
        const auto r = std::from_chars(body.data(), body.data() + body.size(), n);
        if (r.ec != std::errc() || r.ptr != body.data() + body.size() || n < 1)
            throw ValidationError("partition '" + text + "' needs a positive interval count");
        return kind == "regular" ? Partition::regular(T, n)
                                 : Partition::random(T, n, {seed.master_seed, 1000 + index});
    }
    if (kind == "times") {
        std::vector<double> t;
        for (const auto& item : split_list(body)) t.push_back(parse_double(item));
        if (t.empty() || std::abs(t.back() - T) > 1e-12 * T)
            throw ValidationError("partition '" + text + "' must end at the model maturity");
        t.back() = T;
        if (t.front() != 0.0) t.insert(t.begin(), 0.0);
        return Partition(std::move(t));
    }
    throw ValidationError("unknown partition kind '" + kind + "'");
}

int cmd_ap_check(const Config& cfg, const RunContext& ctx) {
    cfg.allow_sections({"lattice", "ap_check"});
    cfg.allow_keys("", {"seed"});
    cfg.allow_keys("lattice", {"F0", "sigma", "T", "steps"});
    cfg.allow_keys("ap_check", {"characteristics", "controls", "tolerance", "lattice_dump", "report"});
    const double F0 = positive_double(cfg, "lattice", "F0", 100.0), T = positive_double(cfg, "lattice", "T", 1.0);
    const double sigma = positive_double(cfg, "lattice", "sigma", 0.2);
    const auto steps = positive_size(cfg, "lattice", "steps", 8);
    const auto cs = characteristics_from(cfg, "ap_check", "characteristics", {"LV", "NTM", "RV", "RTM", "RFM"});
    const auto controls = characteristics_from(cfg, "ap_check", "controls", {"SLR"});
    for (const auto& c : cs)
        if (!c.aggregating()) cfg.fail("ap_check", "characteristics", "'" + c.label() + "' is a control; list it under controls");
    for (const auto& c : controls)
        if (c.aggregating()) cfg.fail("ap_check", "controls", "'" + c.label() + "' is aggregating");
    const double tol = positive_double(cfg, "ap_check", "tolerance", 1e-10);
    const auto report = output_name(cfg, "ap_check", "report", "ap_check.csv");

    const auto tree = LatticeModel::build(F0, sigma, T, steps);
    if (cfg.has("ap_check", "lattice_dump"))
        write_output(ctx, cfg.get_string("ap_check", "lattice_dump"), [&](std::ostream& os) { write_lattice_csv(os, tree); });

    struct Line {
        std::string label, kind;
        ApResidual res;
        bool pass;
    };
    std::vector<Line> lines;
    for (const auto& c : cs) {
        const auto r = lattice_ap_check_all(tree, c);
        lines.push_back({c.label(), "aggregating", r, r.max_scaled <= tol});
    }
    for (const auto& c : controls) {
        const auto r = lattice_ap_check_all(tree, c);
        lines.push_back({c.label(), "control", r, r.max_scaled > tol});
    }
    auto& out = *ctx.out;
    out << "lattice steps=" << steps << " sigma=" << format_double(sigma) << " T=" << format_double(T)
        << "; residual scale max(1, |E_r[f(u_r,u_T)]|), tolerance " << sci(tol) << '\n';
    out << std::left << std::setw(6) << "" << std::setw(13) << "kind" << std::right << std::setw(15) << "max_abs"
        << std::setw(15) << "max_scaled" << "  result\n";
    bool ok = true;
    for (const auto& l : lines) {
        out << std::left << std::setw(6) << l.label << std::setw(13) << l.kind << std::right << std::setw(15)
            << sci(l.res.max_abs) << std::setw(15) << sci(l.res.max_scaled) << "  "
            << (l.pass ? "PASS" : "FAIL") << (l.kind == "control" ? " (must exceed)" : "") << '\n';
        ok = ok && l.pass;
    }
    write_output(ctx, report, [&](std::ostream& os) {
        os << "characteristic,kind,max_abs,max_scaled,tolerance,pass\n";
        for (const auto& l : lines)
            os << l.label << ',' << l.kind << ',' << format_double(l.res.max_abs) << ','
               << format_double(l.res.max_scaled) << ',' << format_double(tol) << ',' << (l.pass ? 1 : 0) << '\n';
    });
    return ok ? kSuccess : kCheckFailure;
}

int cmd_bias(const Config& cfg, const RunContext& ctx) {
    cfg.allow_sections({"model", "bias"});
    cfg.allow_keys("", {"seed"});
    allow_model(cfg);
    cfg.allow_keys("bias", {"characteristics", "partitions", "n_paths", "z_threshold", "target.", "export_paths",
                            "export_partition", "report"});
    const auto spec = model_from_config(cfg);
    const auto mode = state_mode_from_config(cfg);
    const auto seed = seed_from(cfg);
    const auto cs = characteristics_from(cfg, "bias", "characteristics", {"LV", "RTM", "RFM"});
    std::vector<Partition> parts;
    const auto names = cfg.get_list("bias", "partitions", std::vector<std::string>{"regular(1)", "regular(12)", "regular(250)"});
    for (std::size_t k = 0; k < names.size(); ++k)
        parts.push_back(config_guard(cfg, "bias", "partitions", [&] { return parse_partition(names[k], spec.T(), seed, k); }));
    const auto n_paths = positive_size(cfg, "bias", "n_paths", 100000, 2);
    BiasOptions opt;
    opt.mode = mode;
    opt.threads = ctx.threads;
    opt.z_threshold = positive_double(cfg, "bias", "z_threshold", 3.0);
    for (const auto& k : cfg.keys("bias"))
        if (k.rfind("target.", 0) == 0) {
            const auto label = k.substr(7);
            if (std::none_of(cs.begin(), cs.end(), [&](const Characteristic& c) { return c.label() == label; }))
                cfg.fail("bias", k, "no characteristic '" + label + "' in this study");
            opt.targets[label] = cfg.get_double("bias", k);
        }
    const auto comps = study_components(cs);
    config_guard(cfg, "model", "mode", [&] {
        require_support(spec, mode, comps);
        return 0;
    });
    for (const auto& c : cs)
        if (!opt.targets.count(c.label()) && spec.is_heston())
            cfg.fail("bias", "target." + c.label(), "heston has no terminal oracle; set an explicit target");
    const std::size_t export_k = cfg.get_size("bias", "export_partition", 0);
    if (export_k >= parts.size()) cfg.fail("bias", "export_partition", "index beyond the partition list");
    const auto report_name = output_name(cfg, "bias", "report", "bias.csv");

    const auto report = bias_study(spec, cs, parts, n_paths, seed, opt);
    write_report_text(*ctx.out, report);
    write_output(ctx, report_name, [&](std::ostream& os) { write_report_csv(os, report); });
    if (cfg.has("bias", "export_paths")) {
        const auto gen = study_generator(spec, parts[export_k], export_k, seed, mode, comps);
        std::vector<std::optional<StatePath>> slots(n_paths);
        parallel_for(n_paths, ctx.threads, [&](std::size_t i) { slots[i].emplace(gen.path(i)); });
        std::vector<StatePath> paths;
        for (auto& s : slots) paths.push_back(std::move(*s));
        write_output(ctx, cfg.get_string("bias", "export_paths"), [&](std::ostream& os) { write_paths_csv(os, paths); });
    }
    return report.passed() ? kSuccess : kCheckFailure;
}

int cmd_efficiency(const Config& cfg, const RunContext& ctx) {
    cfg.allow_sections({"model", "efficiency"});
    cfg.allow_keys("", {"seed"});
    allow_model(cfg);
    cfg.allow_keys("efficiency", {"characteristic", "a", "components", "variants", "partition", "n_paths",
                                  "common_random_numbers", "z_threshold", "report"});
    const auto spec = model_from_config(cfg);
    const auto seed = seed_from(cfg);
    Polynomial a;
    std::vector<Component> u;
    if (cfg.has("efficiency", "a")) {
        if (cfg.has("efficiency", "characteristic")) cfg.fail("efficiency", "a", "give either a or characteristic, not both");
        a = config_guard(cfg, "efficiency", "a", [&] { return Polynomial::parse(cfg.get_string("efficiency", "a")); });
        for (const auto& name : cfg.get_list("efficiency", "components")) {
            const auto c = parse_component(name);
            if (!c) cfg.fail("efficiency", "components", "unknown component '" + name + "'");
            u.push_back(*c);
        }
        ComponentSet listed;
        for (auto c : u) listed.insert(c);
        if (!listed.contains_all(a.variables()))
            cfg.fail("efficiency", "a", "reads components outside the listed ones");
    } else {
        const auto c = characteristics_from(cfg, "efficiency", "characteristic", {"RTM"});
        if (c.size() != 1 || !c[0].aggregating()) cfg.fail("efficiency", "characteristic", "need one aggregating characteristic");
        a = c[0].a_polynomial();
        u = c[0].components();
    }
    std::vector<BVariant> variants;
    for (const auto& v : cfg.get_list("efficiency", "variants", std::vector<std::string>{"b_star", "fixed_at_start", "lattice_optimal"}))
        variants.push_back(config_guard(cfg, "efficiency", "variants", [&] { return parse_variant(v); }));
    const auto part = config_guard(cfg, "efficiency", "partition", [&] {
        return parse_partition(cfg.get_string("efficiency", "partition", "regular(250)"), spec.T(), seed);
    });
    EfficiencyOptions opt;
    opt.mode = state_mode_from_config(cfg);
    opt.threads = ctx.threads;
    opt.common_random_numbers = cfg.get_bool("efficiency", "common_random_numbers", true);
    opt.z_threshold = positive_double(cfg, "efficiency", "z_threshold", 2.0);
    const auto n_paths = positive_size(cfg, "efficiency", "n_paths", 100000, 3);
    const auto report_name = output_name(cfg, "efficiency", "report", "efficiency.csv");

    const auto report = config_guard(cfg, "efficiency", "variants", [&] {
        return efficiency_study(spec, a, u, variants, part, n_paths, seed, opt);
    });
    write_report_text(*ctx.out, report);
    write_output(ctx, report_name, [&](std::ostream& os) { write_report_csv(os, report); });
    return report.passed() ? kSuccess : kCheckFailure;
}

int cmd_figures(const Config& cfg, const RunContext& ctx) {
    cfg.allow_sections({"figures"});
    cfg.allow_keys("", {"seed"});
    cfg.allow_keys("figures", {"figures", "sigma", "dt", "residual_maturity", "grid_min", "grid_max", "grid_points"});
    std::vector<FigureId> ids;
    for (const auto& f : cfg.get_list("figures", "figures", std::vector<std::string>{"fig1", "fig2", "fig3"}))
        ids.push_back(config_guard(cfg, "figures", "figures", [&] { return parse_figure_id(f); }));
    FigureParams p;
    p.sigma = cfg.get_double("figures", "sigma", p.sigma);
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) cfg.fail("figures", "sigma", "must be finite and >= 0");
    p.dt = positive_double(cfg, "figures", "dt", p.dt);
    p.residual_maturity = cfg.get_double("figures", "residual_maturity", p.residual_maturity);
    if (!(p.residual_maturity >= 0.0) || !std::isfinite(p.residual_maturity))
        cfg.fail("figures", "residual_maturity", "must be finite and >= 0");
    const double lo = cfg.get_double("figures", "grid_min", -0.15), hi = cfg.get_double("figures", "grid_max", 0.15);
    const auto n = cfg.get_size("figures", "grid_points", 601);
    p.grid = config_guard(cfg, "figures", "grid_points", [&] { return figure_grid(lo, hi, n); });

    bool ok = true;
    for (auto id : ids) {
        const auto table = figure_data(id, p);
        write_output(ctx, std::string(figure_name(id)) + ".csv", [&](std::ostream& os) { write_figure_csv(os, table); });
        for (const auto& c : figure_orderings(table)) {
            *ctx.out << "  " << figure_name(id) << ": " << c.name << ": " << (c.pass ? "PASS" : "FAIL");
            if (!c.pass) *ctx.out << " (" << c.detail << ")";
            *ctx.out << '\n';
            ok = ok && c.pass;
        }
    }
    return ok ? kSuccess : kCheckFailure;
}

int cmd_replicate(const Config& cfg, const RunContext& ctx) {
    cfg.allow_sections({"replicate"});
    cfg.allow_keys("", {"seed"});
    cfg.allow_keys("replicate", {"chain", "grid", "n_points", "width", "report"});
    const auto quad = quadrature_from(cfg, "replicate");
    const auto report_name = output_name(cfg, "replicate", "report", "replicate.csv");
    const auto chain = chain_from(cfg, "replicate");
    for (const auto& w : chain.warnings()) *ctx.err << "warning: " << w << '\n';

    const auto s = replicate_state(chain, quad);
    std::vector<std::pair<std::string, double>> rows = {
        {"forward", chain.forward()}, {"maturity", chain.maturity()}, {"Y", s[Component::Y]},
        {"P2", s[Component::P2]},     {"P3", s[Component::P3]},       {"P4", s[Component::P4]},
        {"Z", s[Component::Z]},
    };
    const char* moments[] = {"variance", "third_central_moment", "fourth_central_moment"};
    for (int n = 1; n <= 3; ++n) rows.emplace_back(moments[n - 1], implied_central_moment(chain, MomentSpec(n), quad));
    for (const auto& [k, v] : rows) *ctx.out << std::left << std::setw(24) << k << format_double(v) << '\n';
    write_output(ctx, report_name, [&](std::ostream& os) {
        os << "quantity,value\n";
        for (const auto& [k, v] : rows) os << k << ',' << format_double(v) << '\n';
    });
    return kSuccess;
}

int cmd_premium(const Config& cfg, const RunContext& ctx) {
    cfg.allow_sections({"premium"});
    cfg.allow_keys("", {"seed"});
    cfg.allow_keys("premium", {"paths", "chain", "characteristic", "order", "grid", "n_points", "width", "report"});
    const auto cs = characteristics_from(cfg, "premium", "characteristic", {"RTM"});
    if (cs.size() != 1) cfg.fail("premium", "characteristic", "need exactly one characteristic");
    const auto& c = cs[0];
    const int order = config_guard(cfg, "premium", "characteristic", [&] { return characteristic_order(c); });
    const auto n = static_cast<int>(cfg.get_size("premium", "order", static_cast<std::size_t>(order)));
    const auto spec = config_guard(cfg, "premium", "order", [&] { return MomentSpec(n); });
    const auto quad = quadrature_from(cfg, "premium");
    const auto report_name = output_name(cfg, "premium", "report", "premium.csv");
    const auto chain = chain_from(cfg, "premium");
    for (const auto& w : chain.warnings()) *ctx.err << "warning: " << w << '\n';
    const auto paths = paths_from(cfg, "premium");

    const auto r = risk_premium(paths, c, chain, spec, quad, ctx.threads);
    const double z = r.realised_stderr > 0.0 ? r.premium / r.realised_stderr : (r.premium == 0.0 ? 0.0 : NAN);
    auto& out = *ctx.out;
    out << "characteristic    " << c.label() << " (order " << n << ")\n"
        << "paths             " << r.n_paths << '\n'
        << "realised mean     " << format_double(r.realised_mean) << " +- " << format_double(r.realised_stderr) << '\n'
        << "implied           " << format_double(r.implied) << '\n'
        << "premium           " << format_double(r.premium) << " (z = " << format_double(z) << ")\n";
    write_output(ctx, report_name, [&](std::ostream& os) {
        os << "characteristic,n_paths,realised_mean,realised_stderr,implied,premium,z\n"
           << c.label() << ',' << r.n_paths << ',' << format_double(r.realised_mean) << ','
           << format_double(r.realised_stderr) << ',' << format_double(r.implied) << ',' << format_double(r.premium)
           << ',' << format_double(z) << '\n';
    });
    return kSuccess;
}

int cmd_simulate(const Config& cfg, const RunContext& ctx) {
    cfg.allow_sections({"model", "simulate"});
    cfg.allow_keys("", {"seed"});
    allow_model(cfg);
    cfg.allow_keys("simulate", {"partition", "n_paths", "components", "output"});
    const auto spec = model_from_config(cfg);
    const auto mode = state_mode_from_config(cfg);
    const auto seed = seed_from(cfg);
    const auto part = config_guard(cfg, "simulate", "partition", [&] {
        return parse_partition(cfg.get_string("simulate", "partition", "regular(12)"), spec.T(), seed);
    });
    const auto n_paths = positive_size(cfg, "simulate", "n_paths", 100);
    ComponentSet comps;
    for (const auto& name : cfg.get_list("simulate", "components", std::vector<std::string>{"F", "y", "Y", "P2", "P3", "Z"})) {
        const auto c = parse_component(name);
        if (!c) cfg.fail("simulate", "components", "unknown component '" + name + "'");
        comps.insert(*c);
    }
    config_guard(cfg, "simulate", "components", [&] {
        require_support(spec, mode, comps);
        return 0;
    });
    const auto name = output_name(cfg, "simulate", "output", "paths.csv");

    const auto paths = simulate_paths(spec, part, n_paths, seed, mode, comps, ctx.threads);
    write_output(ctx, name, [&](std::ostream& os) { write_paths_csv(os, paths); });
    *ctx.out << n_paths << " " << spec.name() << " paths on " << describe_partition(part) << '\n';
    return kSuccess;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Aggregating realised characteristics: lattice checks, studies, figures and replication"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_opt, config_pos, out_dir = ".";
    std::size_t threads = 1;
    app.add_option("--config", config_opt, "config file (key = value with [sections])");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads, 0 for all cores");

    using Cmd = int (*)(const Config&, const RunContext&);
    const std::pair<const char*, std::pair<const char*, Cmd>> table[] = {
        {"ap-check", {"aggregation residuals on a binomial lattice", cmd_ap_check}},
        {"bias", {"realised means across monitoring partitions", cmd_bias}},
        {"efficiency", {"estimator variance under different weight rules", cmd_efficiency}},
        {"figures", {"characteristic curves as CSV", cmd_figures}},
        {"replicate", {"contract values from an option chain", cmd_replicate}},
        {"premium", {"realised minus implied characteristic", cmd_premium}},
        {"simulate", {"export simulated contract paths", cmd_simulate}},
    };
    std::vector<std::pair<CLI::App*, Cmd>> subs;
    for (const auto& [name, d] : table) {
        auto* sc = app.add_subcommand(name, d.first);
        sc->add_option("config", config_pos, "config file");
        subs.emplace_back(sc, d.second);
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kValidationFailure;
    }

    try {
        if (!config_opt.empty() && !config_pos.empty() && config_opt != config_pos)
            throw ConfigError("config given twice: '" + config_pos + "' and '" + config_opt + "'");
        const std::string path = config_opt.empty() ? config_pos : config_opt;
        std::istringstream empty;
        const Config cfg = path.empty() ? Config::parse(empty, "<defaults>") : Config::load(path);
        RunContext ctx{out_dir, resolve_threads(threads), &out, &err};
        for (const auto& [sc, fn] : subs)
            if (sc->parsed()) return fn(cfg, ctx);
        return kValidationFailure;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumericError;
    } catch (const SingularityError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
}

} // namespace aggr::cli
