// End-to-end checks, one PASS/FAIL line each. Exit status 1 if any line fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aggr/characteristics/library.hpp"
#include "aggr/harness/figures.hpp"
#include "aggr/harness/studies.hpp"
#include "aggr/models/closed_form.hpp"
#include "aggr/models/lattice.hpp"
#include "aggr/models/simulate.hpp"
#include "aggr/replication/replication.hpp"

using namespace aggr;
using C = Component;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [fail: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void lattice_exactness(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto tree = LatticeModel::build(100.0, 0.2, 1.0, 8);
    const Characteristic cs[] = {lv_characteristic(), ntm_characteristic(), characteristic_by_name("RTM"),
                                 characteristic_by_name("RFM"), moment_characteristic(MomentSpec(1))};
    double worst = 0.0;
    for (const auto& c : cs) {
        const auto r = lattice_ap_check_all(tree, c);
        worst = std::max(worst, r.max_scaled);
        o.require(r.max_scaled <= 1e-12, c.label() + " residual " + fmt(r.max_scaled));
    }
    const auto slr = lattice_ap_check_all(tree, characteristic_by_name("SLR"));
    const double secs = seconds_since(t0);
    o.require(slr.max_abs > 1e-8, "SLR control residual " + fmt(slr.max_abs));
    o.require(secs < 1.0, "runtime " + fmt(secs) + " s");
    o.detail << "worst scaled residual " << fmt(worst) << ", SLR " << fmt(slr.max_abs) << ", " << fmt(secs) << " s";
}

void describe_rows(Outcome& o, const StudyReport& r) {
    for (const auto& row : r.rows()) {
        o.detail << "; " << row.configuration << " z=" << fmt(row.z);
        o.require(row.pass, row.configuration);
    }
}

void unbiasedness(Outcome& o) {
    const auto gbm = ModelSpec::gbm(0.2);
    const Characteristic cs[] = {lv_characteristic(), characteristic_by_name("RTM"), characteristic_by_name("RFM")};
    const Partition parts[] = {Partition::regular(1.0, 1), Partition::regular(1.0, 12), Partition::regular(1.0, 250)};
    BiasOptions opt;
    opt.threads = 1;
    // Gaussian moments of y_T - Y_0 ~ N(0, sigma^2 T)
    opt.targets = {{"LV", 0.04}, {"RTM", 0.0}, {"RFM", 3 * std::pow(0.2, 4)}};
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = bias_study(gbm, cs, parts, 100000, {20240611, 0}, opt);
    const double secs = seconds_since(t0);
    o.detail << fmt(secs) << " s single-threaded";
    o.require(secs < 120.0, "runtime");
    describe_rows(o, r);
}

void jump_bias(Outcome& o) {
    const auto m = ModelSpec::merton(0.2, 1.0, -0.1, 0.05);
    const auto cm = merton_central_moments(m, 1.0);
    o.require(std::abs(cm.m3 + 0.00175) <= 1e-15, "m3 oracle " + fmt(cm.m3));
    const Characteristic cs[] = {characteristic_by_name("RTM"), characteristic_by_name("RFM")};
    const Partition daily[] = {Partition::regular(1.0, 250)};
    BiasOptions opt;
    opt.threads = resolve_threads(0);
    opt.targets = {{"RTM", -0.00175}, {"RFM", cm.m4}};
    const auto r = bias_study(m, cs, daily, 100000, {77, 0}, opt);
    o.detail << "m4 oracle " << fmt(cm.m4);
    for (const auto& row : r.rows()) o.detail << "; " << row.configuration << " mean " << fmt(row.mean);
    describe_rows(o, r);
}

void replication(Outcome& o) {
    const double F = 100.0, s = 0.2, T = 1.0, v = s * s * T;
    const auto t0 = std::chrono::steady_clock::now();
    const auto chain = synth_chain(F, s, T, 2001, 8.0);
    const auto u = replicate_state(chain);
    double m[3];
    for (int n = 1; n <= 3; ++n) m[n - 1] = implied_characteristic(MomentSpec(n), u);
    const double secs = seconds_since(t0);

    const double Y = std::log(F) - v / 2;
    const std::pair<const char*, std::pair<double, double>> contracts[] = {
        {"Y", {u[C::Y], Y}},
        {"P2", {u[C::P2], Y * Y + v}},
        {"P3", {u[C::P3], Y * Y * Y + 3 * Y * v}},
        {"Z", {u[C::Z], F * (std::log(F) + v / 2)}},
    };
    double worst = 0.0;
    for (const auto& [name, pr] : contracts) {
        const double rel = std::abs(pr.first / pr.second - 1.0);
        worst = std::max(worst, rel);
        o.require(rel <= 1e-4, std::string(name) + " relative error " + fmt(rel));
    }
    o.require(std::abs(m[0] / 0.04 - 1.0) <= 1e-3, "variance " + fmt(m[0]));
    o.require(std::abs(m[1]) <= 1e-3, "third moment " + fmt(m[1]));
    o.require(std::abs(m[2] / 0.0048 - 1.0) <= 1e-3, "fourth moment " + fmt(m[2]));
    o.require(secs < 1.0, "runtime " + fmt(secs) + " s");
    o.detail << "worst contract error " << fmt(worst) << ", moments (" << fmt(m[0]) << ", " << fmt(m[1]) << ", "
             << fmt(m[2]) << "), " << fmt(secs) << " s";
}

void efficiency(Outcome& o) {
    const auto gbm = ModelSpec::gbm(0.2);
    const auto daily = Partition::regular(1.0, 250);
    const BVariant variants[] = {BVariant::b_star, BVariant::fixed_at_start};
    EfficiencyOptions opt;
    opt.threads = resolve_threads(0);
    const std::vector<Component> uY{C::Y};
    const MomentSpec rtm(2);
    const auto u_rtm = moment_components(rtm);
    const std::pair<const char*, std::pair<Polynomial, std::vector<Component>>> cases[] = {
        {"Y^2", {Polynomial::variable(C::Y, 2), uY}},
        {"RTM", {moment_a(rtm), u_rtm}},
    };
    for (const auto& [name, au] : cases) {
        const auto r = efficiency_study(gbm, au.first, au.second, variants, daily, 100000, {31, 0}, opt);
        for (const auto& row : r.rows()) {
            if (row.test != RowTest::below) continue;
            o.detail << name << " z=" << fmt(row.z) << "; ";
            o.require(row.pass, std::string(name) + " variance ordering");
        }
    }
    const GapOptions gap{true, 3.0};
    for (const auto& [name, au] : cases) {
        std::vector<double> g;
        for (std::size_t n : {32u, 64u, 128u, 256u})
            g.push_back(lattice_optimal_gap(LatticeModel::build(100.0, 0.2, 1.0, n), au.first, au.second, gap));
        o.detail << name << " gap ratios";
        for (std::size_t i = 1; i < g.size(); ++i) {
            const double ratio = g[i] / g[i - 1];
            o.detail << ' ' << fmt(ratio);
            o.require(ratio >= 0.4 && ratio <= 0.6, std::string(name) + " gap ratio");
        }
        o.detail << "; ";
    }
}

ContractState random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uf(50.0, 200.0), small(0.0, 0.1);
    const double f = uf(rng), y = std::log(f);
    ContractState u(0.0);
    const double Y = y - small(rng);
    const double p2 = Y * Y + small(rng);
    u.set(C::F, f).set(C::y, y).set(C::Y, Y).set(C::P2, p2).set(C::P3, Y * Y * Y + 3 * Y * (p2 - Y * Y));
    u.set(C::P4, p2 * p2 + small(rng)).set(C::Z, f * (y + small(rng)));
    return u.derive_variances();
}

void geometric_identity(Outcome& o) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> co(-10.0, 10.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const bool pick8 = rng() & 1;
        const GeometricCoeffs k(co(rng), co(rng), co(rng), co(rng), pick8 ? co(rng) : 0.0, pick8 ? 0.0 : co(rng));
        const auto r = random_state(rng), s = random_state(rng);
        const double g = geometric_g(k, geometric_increment(r, s));
        const double f = eval_characteristic(corollary4_characteristic(k), r, s);
        worst = std::max(worst, std::abs(g - f) / (1.0 + std::abs(g)));
    }
    o.require(worst <= 1e-12, "identity");
    o.detail << "worst |g - f| / (1 + |g|) = " << fmt(worst) << " over 10000 draws";
}

void martingality(Outcome& o) {
    const double cs[] = {0.5, -1.0};
    MartingaleOptions opt;
    opt.threads = resolve_threads(0);
    const auto r = log_martingale_study(ModelSpec::gbm(0.2), cs, Partition::regular(1.0, 250), 100000, {88, 0}, opt);
    describe_rows(o, r);
}

void figure_orderings_check(Outcome& o) {
    for (auto id : {FigureId::fig1, FigureId::fig2, FigureId::fig3}) {
        const auto table = figure_data(id);
        std::ostringstream csv;
        write_figure_csv(csv, table);
        o.require(!csv.str().empty(), "csv");
        for (const auto& c : figure_orderings(table)) {
            o.detail << "; " << c.name << (c.pass ? " ok" : " violated (" + c.detail + ")");
            o.require(c.pass, c.name);
        }
    }
}

} // namespace

int main() {
    const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
        {"lattice aggregation exactness", lattice_exactness},
        {"partition-invariant unbiasedness", unbiasedness},
        {"jump bias reproduction", jump_bias},
        {"replication accuracy", replication},
        {"efficiency ordering", efficiency},
        {"geometric family identity", geometric_identity},
        {"log-martingale martingality", martingality},
        {"figure orderings", figure_orderings_check},
    };
    int failed = 0, n = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        auto detail = o.detail.str();
        while (detail.rfind("; ", 0) == 0) detail.erase(0, 2);
        while (detail.size() >= 2 && detail.ends_with("; ")) detail.resize(detail.size() - 2);
        std::printf("criterion %d %s: %s | %s\n", ++n, o.pass ? "PASS" : "FAIL", name, detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %d criteria pass\n", n - failed, n);
    return failed ? 1 : 0;
}
