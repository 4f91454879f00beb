#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "aggr/characteristics/library.hpp"
#include "aggr/core/error.hpp"
#include "aggr/harness/figures.hpp"
#include "aggr/harness/premium.hpp"
#include "aggr/harness/studies.hpp"
#include "aggr/models/closed_form.hpp"

using namespace aggr;
using C = Component;

namespace {

const StudyRow& row(const StudyReport& r, const std::string& configuration) {
    for (const auto& x : r.rows())
        if (x.configuration == configuration) return x;
    FAIL("missing row " << configuration);
    return r.rows().front();
}

BiasOptions with_threads(std::size_t n) {
    BiasOptions o;
    o.threads = n;
    return o;
}

std::vector<Partition> three_partitions() {
    return {Partition::regular(1.0, 1), Partition::regular(1.0, 12), Partition::regular(1.0, 250)};
}

} // namespace

TEST_CASE("report rows") {
    StudyReport r("demo");
    const auto& a = r.add("a", 10, 1.5, 0.5, 1.0, RowTest::two_sided, 3.0);
    CHECK(a.z == doctest::Approx(1.0));
    CHECK(a.pass);
    CHECK_FALSE(r.add("b", 10, 3.0, 0.5, 1.0, RowTest::two_sided, 3.0).pass);
    CHECK(r.add("c", 10, -3.0, 1.0, 0.0, RowTest::below, 2.0).pass);
    CHECK_FALSE(r.add("d", 10, -1.0, 1.0, 0.0, RowTest::below, 2.0).pass);
    CHECK(r.add("e", 10, 0.0, 0.0, 0.0, RowTest::below, 2.0).pass);
    const auto& f = r.add("f", 10, -1e-9, 0.0, 0.0, RowTest::below, 2.0);
    CHECK(f.z == -INFINITY);
    CHECK(f.pass);
    CHECK(r.add("g", 10, 5.0, 0.0, 5.0, RowTest::two_sided, 3.0).z == 0.0);
    CHECK(r.add("h", 10, 9.0, 1.0, 0.0, RowTest::info, 3.0).pass);
    CHECK_FALSE(r.passed());

    std::ostringstream csv, text;
    write_report_csv(csv, r);
    CHECK(csv.str().rfind("configuration,mean,stderr,target,z\na,1.5,0.5,1,1\n", 0) == 0);
    CHECK(csv.str().find("h,9,1,,\n") != std::string::npos);
    write_report_text(text, r);
    CHECK(text.str().find("FAIL") != std::string::npos);
    CHECK(text.str().find("some rows FAIL") != std::string::npos);
}

TEST_CASE("summaries and jackknife") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    std::vector<double> x(40), y(40);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = n01(rng);
        y[i] = 0.5 * x[i] + n01(rng);
    }
    auto var = [](const std::vector<double>& v) { return summarize(v).variance; };
    // brute-force leave-one-out
    auto brute = [&](auto stat) {
        const std::size_t n = x.size();
        std::vector<double> loo;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> a, b;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    a.push_back(x[j]);
                    b.push_back(y[j]);
                }
            loo.push_back(stat(a, b));
        }
        const double m = summarize(loo).mean;
        double s = 0.0;
        for (double v : loo) s += (v - m) * (v - m);
        return std::sqrt((n - 1.0) / n * s);
    };
    const auto jx = jackknife_variance(x);
    CHECK(jx.variance == doctest::Approx(var(x)).epsilon(1e-13));
    CHECK(jx.stderr_ == doctest::Approx(brute([&](auto& a, auto&) { return var(a); })).epsilon(1e-10));
    const auto jd = jackknife_variance_difference(x, y);
    CHECK(jd.variance == doctest::Approx(var(x) - var(y)).epsilon(1e-12));
    CHECK(jd.stderr_ == doctest::Approx(brute([&](auto& a, auto& b) { return var(a) - var(b); })).epsilon(1e-10));
    CHECK_THROWS_AS(jackknife_variance(std::vector<double>{1.0, 2.0}), ValidationError);

    const auto s = summarize(std::vector<double>{1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(describe_partition(Partition::regular(1.0, 12)) == "regular(12)");
    CHECK(describe_partition(Partition({0.0, 0.1, 1.0})) == "partition(2)");
}

TEST_CASE("implied targets under gbm") {
    const auto gbm = ModelSpec::gbm(0.2);
    CHECK(implied_target(gbm, lv_characteristic()) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(std::abs(implied_target(gbm, characteristic_by_name("RTM"))) <= 1e-12);
    CHECK(implied_target(gbm, characteristic_by_name("RFM")) == doctest::Approx(0.0048).epsilon(1e-10));
    CHECK(implied_target(gbm, characteristic_by_name("RV")) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(implied_target(gbm, characteristic_by_name("SLR")) == doctest::Approx(0.0404).epsilon(1e-12));
    const auto m = ModelSpec::merton(0.2, 1.0, -0.1, 0.05);
    CHECK(implied_target(m, characteristic_by_name("RTM")) == doctest::Approx(-0.00175).epsilon(1e-9));
    CHECK_THROWS_AS(implied_target(ModelSpec::heston({}), lv_characteristic()), CapabilityError);
}

TEST_CASE("bias study: aggregating characteristics are partition invariant") {
    const auto gbm = ModelSpec::gbm(0.2);
    const std::vector<Characteristic> cs{lv_characteristic(), characteristic_by_name("RTM"),
                                         characteristic_by_name("RFM"), characteristic_by_name("SLR")};
    const auto parts = three_partitions();
    const auto r = bias_study(gbm, cs, parts, 20000, {2024, 0}, with_threads(2));
    REQUIRE(r.rows().size() == 12);
    for (const char* name : {"LV", "RTM", "RFM"})
        for (const auto& p : parts) {
            const auto& x = row(r, std::string(name) + " " + describe_partition(p));
            CAPTURE(x.configuration);
            CHECK(x.pass);
            CHECK(x.n_paths == 20000);
        }
    CHECK(row(r, "LV regular(1)").target == doctest::Approx(0.04));
    CHECK(std::abs(row(r, "RTM regular(12)").target) <= 1e-12);
    CHECK(row(r, "RFM regular(250)").target == doctest::Approx(0.0048).epsilon(1e-10));

    // pairwise across partitions within 4 joint standard errors
    for (const char* name : {"LV", "RTM", "RFM"})
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i + 1; j < 3; ++j) {
                const auto& a = row(r, std::string(name) + " " + describe_partition(parts[i]));
                const auto& b = row(r, std::string(name) + " " + describe_partition(parts[j]));
                CHECK(std::abs(a.mean - b.mean) <= 4.0 * std::hypot(a.stderr_, b.stderr_));
            }

    // the squared log return drifts with the partition: gap (sigma^2 T / 2)^2 (1 - 1/250)
    const auto& s1 = row(r, "SLR regular(1)");
    const auto& s250 = row(r, "SLR regular(250)");
    CHECK(s1.pass);
    CHECK_FALSE(s250.pass);
    CHECK(std::abs(s1.mean - s250.mean - 0.0004 * (1.0 - 1.0 / 250.0)) <= 4.0 * std::hypot(s1.stderr_, s250.stderr_));
    CHECK(s250.mean == doctest::Approx(0.04 + 0.0004 / 250.0).epsilon(0.02));
}

TEST_CASE("bias study is thread-count independent") {
    const auto gbm = ModelSpec::gbm(0.25);
    const Partition parts[] = {Partition::regular(1.0, 12)};
    const auto a = bias_study(gbm, characteristic_by_name("RTM"), parts, 500, {3, 0}, with_threads(1));
    const auto b = bias_study(gbm, characteristic_by_name("RTM"), parts, 500, {3, 0}, with_threads(5));
    std::ostringstream sa, sb;
    write_report_csv(sa, a);
    write_report_csv(sb, b);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("bias study under heston with an explicit target") {
    const Heston h{0.06, 2.0, 0.04, 0.3, -0.6};
    const auto spec = ModelSpec::heston(h);
    const Partition parts[] = {Partition::regular(1.0, 4), Partition::regular(1.0, 50)};
    const auto u0 = closed_form_state(spec, 0.0, 100.0, h.v0, {C::y, C::Y});
    const double target = 2.0 * (u0[C::y] - u0[C::Y]);
    CHECK_THROWS_AS(bias_study(spec, lv_characteristic(), parts, 100, {}), CapabilityError);
    BiasOptions opt;
    opt.targets["LV"] = target;
    opt.threads = 4;
    const auto r = bias_study(spec, lv_characteristic(), parts, 5000, {8, 0}, opt);
    for (const auto& x : r.rows()) {
        CAPTURE(x.configuration);
        CHECK(x.pass);
    }
    CHECK_THROWS_AS(bias_study(spec, characteristic_by_name("RTM"), parts, 100, {}, opt), CapabilityError);
}

TEST_CASE("efficiency study") {
    const auto gbm = ModelSpec::gbm(0.2);
    const std::vector<Component> uY{C::Y};
    const auto a = Polynomial::variable(C::Y, 2);
    const BVariant all[] = {BVariant::b_star, BVariant::fixed_at_start, BVariant::lattice_optimal};
    const auto daily = Partition::regular(1.0, 250);
    const auto r = efficiency_study(gbm, a, uY, all, daily, 20000, {5, 0}, {true, ClosedForm{}, 2});
    for (const auto& x : r.rows()) {
        CAPTURE(x.configuration);
        CHECK(x.pass);
    }
    const auto& d = row(r, "Var[b_star] - Var[fixed_at_start] regular(250)");
    CHECK(d.z < -2.0);
    CHECK(row(r, "Var[lattice_optimal] - Var[b_star] lattice(250)").mean < 0.0);
    // a = Y^2 realises the squared change in Y, with variance near 2 (sigma^2 T)^2
    CHECK(row(r, "Var[b_star] regular(250)").mean == doctest::Approx(2.0 * 0.04 * 0.04).epsilon(0.05));

    const auto one = efficiency_study(gbm, a, uY, all, Partition::regular(1.0, 1), 1000, {5, 0});
    const auto& d1 = row(one, "Var[b_star] - Var[fixed_at_start] regular(1)");
    CHECK(d1.mean == 0.0);
    CHECK(d1.stderr_ == 0.0);
    CHECK(d1.pass);

    const BVariant mc[] = {BVariant::b_star, BVariant::fixed_at_start};
    const auto rtm = MomentSpec(2);
    const auto u = moment_components(rtm);
    EfficiencyOptions indep;
    indep.common_random_numbers = false;
    const auto ri = efficiency_study(gbm, moment_a(rtm), u, mc, Partition::regular(1.0, 50), 2000, {5, 0}, indep);
    CHECK(ri.rows().size() == 3);

    CHECK_THROWS_AS(efficiency_study(ModelSpec::merton(0.2, 1, 0, 0.1), a, uY, all, daily, 100, {}), ValidationError);
    CHECK_THROWS_AS(efficiency_study(gbm, a, uY, all, Partition({0.0, 0.3, 1.0}), 100, {}), ValidationError);
    CHECK_THROWS_AS(parse_variant("optimal"), ValidationError);
    CHECK(parse_variant("fixed_at_start") == BVariant::fixed_at_start);
}

TEST_CASE("log-martingale transform has driftless increments") {
    const auto gbm = ModelSpec::gbm(0.2);
    const double cs[] = {0.5, -1.0, 2.0};
    const auto r = log_martingale_study(gbm, cs, Partition::regular(1.0, 250), 20000, {6, 0}, {2});
    REQUIRE(r.rows().size() == 3);
    for (const auto& x : r.rows()) {
        CAPTURE(x.configuration);
        CHECK(x.pass);
        CHECK(x.threshold == 4.0);
    }
    // per-step increments
    const auto part = Partition::regular(1.0, 12);
    const auto gen = study_generator(gbm, part, 0, {9, 0}, ClosedForm{}, {C::F, C::y});
    for (double c : {0.5, -1.0}) {
        std::vector<std::vector<double>> inc(12);
        for (std::size_t i = 0; i < 20000; ++i) {
            const auto p = gen.path(i);
            for (std::size_t k = 1; k <= 12; ++k) {
                auto m = [&](std::size_t j) {
                    return std::expm1(c * log_martingale_u(c, 0.2, 1.0, p[j].time(), p[j][C::y])) / c;
                };
                inc[k - 1].push_back(m(k) - m(k - 1));
            }
        }
        for (const auto& v : inc) {
            const auto s = summarize(v);
            CHECK(std::abs(s.mean) <= 4.0 * s.stderr_);
        }
    }
    // c = 1 reduces to u = y and m = F - 1
    CHECK(log_martingale_u(1.0, 0.2, 1.0, 0.3, 4.0) == 4.0);
    CHECK_THROWS_AS(log_martingale_study(ModelSpec::merton(0.2, 1, 0, 0.1), cs, part, 10, {}), CapabilityError);
}

TEST_CASE("figure curves") {
    const double shift = 0.5 * 0.04 / 250.0, v2 = 0.04 / 250.0, vs = 0.04 / 12.0;
    const auto f1 = figure_data(FigureId::fig1);
    REQUIRE(f1.rows.size() == 601);
    CHECK(f1.columns == std::vector<std::string>{"x", "RV", "LV", "SLR"});
    const auto& mid = f1.rows[300];
    CHECK(mid[0] == 0.0);
    CHECK(mid[1] == 0.0);
    CHECK(mid[3] == doctest::Approx(shift * shift).epsilon(1e-12));
    for (const auto& r : f1.rows) {
        CHECK(r[1] == doctest::Approx(r[0] * r[0]).epsilon(1e-9));
        CHECK(r[2] == doctest::Approx(lambda_kernel(r[0] + shift)).epsilon(1e-9));
    }

    const auto f2 = figure_data(FigureId::fig2);
    for (const auto& r : f2.rows) {
        const double x = r[0];
        CHECK(std::abs(r[1] - (x * x * x - 3.0 * v2 * x)) <= 1e-12);
        const double ntm = rho_term(-v2, x + shift) + tau_kernel(x + shift);
        CHECK(std::abs(r[2] - ntm) <= 1e-12);
        // CLR is odd in the log return
        CHECK(r[3] == doctest::Approx(-power_return(-(x + shift), 3)).epsilon(1e-14));
    }

    const auto f3 = figure_data(FigureId::fig3);
    for (const auto& r : f3.rows) {
        const double x = r[0];
        CHECK(std::abs(r[1] - (x * x * x * x + 6.0 * vs * x * x)) <= 1e-12);
        CHECK(r[2] == doctest::Approx(std::pow(x + shift, 4)).epsilon(1e-12));
    }

    std::ostringstream os;
    write_figure_csv(os, f3);
    CHECK(os.str().rfind("x,RFM,QLR\n-0.15,", 0) == 0);

    CHECK_THROWS_AS(parse_figure_id("fig4"), ValidationError);
    CHECK(parse_figure_id("fig2") == FigureId::fig2);
    CHECK_THROWS_AS(figure_grid(0.1, -0.1, 5), ValidationError);
    FigureParams bad;
    bad.grid = {0.0, NAN};
    CHECK_THROWS_AS(figure_data(FigureId::fig1, bad), ValidationError);
    bad.grid = {};
    CHECK_THROWS_AS(figure_data(FigureId::fig1, bad), ValidationError);
}

TEST_CASE("figure ordering checks") {
    auto find = [](const std::vector<OrderingCheck>& v, const std::string& prefix) {
        for (const auto& c : v)
            if (c.name.rfind(prefix, 0) == 0) return c;
        FAIL("missing check " << prefix);
        return v.front();
    };
    const auto c1 = figure_orderings(figure_data(FigureId::fig1));
    for (const auto& c : c1) CHECK(c.pass);

    const auto f2 = figure_data(FigureId::fig2);
    const auto c2 = figure_orderings(f2);
    CHECK(find(c2, "RTM < CLR").pass);
    CHECK(find(c2, "RTM > CLR").pass);
    // the distance check agrees with a pointwise evaluation of the table
    bool closer = true;
    for (const auto& r : f2.rows)
        if (std::abs(r[0]) >= 0.05 - 1e-12) closer = closer && std::abs(r[2] - r[3]) > std::abs(r[1] - r[3]);
    const auto dist = find(c2, "|NTM - CLR|");
    CHECK(dist.pass == closer);
    CHECK(dist.pass == dist.detail.empty());

    // beyond |x| = 0.13 NTM is the farther curve on both sides
    FigureParams wide;
    wide.grid = {-0.15, -0.14, -0.13, 0.13, 0.14, 0.15};
    CHECK(find(figure_orderings(figure_data(FigureId::fig2, wide)), "|NTM - CLR|").pass);

    const auto c3 = figure_orderings(figure_data(FigureId::fig3));
    CHECK(c3.size() == 1);
    CHECK(c3[0].pass);
    // a flat curve fails the monotonicity check
    FigureTable flat = figure_data(FigureId::fig3);
    for (auto& r : flat.rows) r[1] = r[2];
    CHECK_FALSE(figure_orderings(flat)[0].pass);
}

TEST_CASE("risk premium") {
    const auto part = Partition::regular(1.0, 50);
    const auto chain = synth_chain(100.0, 0.2, 1.0);
    const auto gbm_paths = simulate_paths(ModelSpec::gbm(0.2), part, 4000, {31, 0}, ClosedForm{},
                                          kDefaultPathComponents, 4);
    for (int n : {1, 2, 3}) {
        const auto c = moment_characteristic(MomentSpec(n));
        const auto r = risk_premium(gbm_paths, c, chain, MomentSpec(n));
        CAPTURE(n);
        CHECK(r.n_paths == 4000);
        CHECK(std::abs(r.premium) <= 3.0 * r.realised_stderr);
        CHECK(r.premium == r.realised_mean - r.implied);
    }
    const auto lv = risk_premium(gbm_paths, lv_characteristic(), chain, MomentSpec(1));
    CHECK(lv.implied == doctest::Approx(0.04).epsilon(1e-4));
    CHECK(std::abs(lv.premium) <= 3.0 * lv.realised_stderr);

    const auto jumps = simulate_paths(ModelSpec::merton(0.2, 1.0, -0.1, 0.05), part, 4000, {32, 0}, ClosedForm{},
                                      kDefaultPathComponents, 4);
    const auto m = risk_premium(jumps, characteristic_by_name("RTM"), chain, MomentSpec(2));
    CHECK(std::abs(m.implied) <= 1e-6);
    CHECK(m.premium < -3.0 * m.realised_stderr);
    CHECK(m.realised_mean == doctest::Approx(-0.00175).epsilon(0.25));

    // zero volatility: flat paths against an empty chain
    const auto flat = simulate_paths(ModelSpec::gbm(0.0), part, 10, {1, 0}, ClosedForm{});
    std::vector<double> k, q(64, 0.0);
    for (int i = 0; i < 64; ++i) k.push_back(100.0 * std::exp(-1.0 + i / 31.5));
    const OptionChain zero(100.0, 1.0, k, q);
    for (int n : {1, 2, 3}) {
        const auto z = risk_premium(flat, moment_characteristic(MomentSpec(n)), zero, MomentSpec(n));
        CHECK(z.premium == 0.0);
        CHECK(z.realised_mean == 0.0);
    }

    CHECK_THROWS_AS(risk_premium(gbm_paths, characteristic_by_name("RTM"), chain, MomentSpec(3)), ValidationError);
    CHECK_THROWS_AS(risk_premium(gbm_paths, characteristic_by_name("RTM"), synth_chain(100.0, 0.2, 0.5), MomentSpec(2)),
                    ValidationError);
    CHECK(characteristic_order(ntm_characteristic()) == 2);
    CHECK(characteristic_order(characteristic_by_name("QLR")) == 3);
    CHECK_THROWS_AS(characteristic_order(corollary4_characteristic({1, 0, 0, 1, 0, 0})), ValidationError);
}

TEST_CASE("path CSV round trip preserves realised means") {
    const auto paths = simulate_paths(ModelSpec::gbm(0.2), Partition::regular(1.0, 20), 200, {4, 0}, ClosedForm{});
    std::stringstream io;
    write_paths_csv(io, paths);
    const auto back = read_paths_csv(io);
    REQUIRE(back.size() == paths.size());
    const auto chain = synth_chain(100.0, 0.2, 1.0);
    for (const char* name : {"RTM", "RFM"}) {
        const auto c = characteristic_by_name(name);
        const auto order = characteristic_order(c);
        const auto a = risk_premium(paths, c, chain, MomentSpec(order));
        const auto b = risk_premium(back, c, chain, MomentSpec(order));
        CHECK(a.realised_mean == b.realised_mean);
    }
}
