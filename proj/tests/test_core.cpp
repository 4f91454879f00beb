#include "doctest.h"

#include <cmath>
#include <sstream>

#include "aggr/core/error.hpp"
#include "aggr/core/partition.hpp"
#include "aggr/core/seed.hpp"
#include "aggr/core/state_path.hpp"

using namespace aggr;

namespace {
std::vector<double> v(std::span<const double> s) { return {s.begin(), s.end()}; }
} // namespace

TEST_CASE("regular partitions") {
    CHECK(v(Partition::regular(1.0, 4).times()) == std::vector<double>{0, 0.25, 0.5, 0.75, 1.0});
    CHECK(v(Partition::regular(1.0, 1).times()) == std::vector<double>{0, 1.0});
    const auto daily = Partition::regular(1.0, 250);
    CHECK(daily.intervals() == 250);
    CHECK(daily.horizon() == 1.0);
    CHECK_THROWS_AS(Partition::regular(1.0, 0), ValidationError);
    CHECK_THROWS_AS(Partition::regular(0.0, 3), ValidationError);
    CHECK_THROWS_AS(Partition::regular(-1.0, 3), ValidationError);
}

TEST_CASE("explicit partitions") {
    const std::vector<double> t{0, 0.1, 1.9, 2.0};
    CHECK(v(Partition::from_times(t).times()) == t);
    CHECK_THROWS_AS(Partition::from_times({0, 0.5, 0.5, 1}), ValidationError);
    CHECK_THROWS_AS(Partition::from_times({0, 0.7, 0.5, 1}), ValidationError);
    CHECK_THROWS_AS(Partition::from_times({0.1, 0.5, 1}), ValidationError);
    CHECK_THROWS_AS(Partition::from_times({0}), ValidationError);
    CHECK_THROWS_AS(Partition::from_times({0, NAN, 1}), ValidationError);
}

TEST_CASE("random partitions are valid and reproducible") {
    const SeedSpec seed{42, 7};
    const auto a = Partition::random(2.0, 50, seed);
    const auto b = Partition::random(2.0, 50, seed);
    CHECK(a == b);
    CHECK(a.intervals() == 50);
    CHECK(a.horizon() == 2.0);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] - a[i - 1] >= Partition::kMinInterval);
    CHECK_FALSE(a == Partition::random(2.0, 50, SeedSpec{42, 8}));
    CHECK(Partition::random(1.0, 1, seed) == Partition::regular(1.0, 1));
}

TEST_CASE("refinement") {
    CHECK(v(refine(Partition::regular(1.0, 1), 2).times()) == std::vector<double>{0, 0.5, 1});
    CHECK(v(refine(Partition::from_times({0, 0.25, 1}), 2).times()) == std::vector<double>{0, 0.125, 0.25, 0.625, 1});
    const auto p = Partition::random(1.0, 7, SeedSpec{1, 1});
    CHECK(refine(p, 1) == p);
    CHECK_THROWS_AS(refine(p, 0), ValidationError);
}

TEST_CASE("refine composes multiplicatively") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto p = Partition::random(1.5, 1 + s % 6, SeedSpec{s, 3});
        for (std::size_t a = 1; a <= 4; ++a)
            for (std::size_t b = 1; b <= 4; ++b) {
                const auto lhs = refine(p, a * b);
                const auto rhs = refine(refine(p, a), b);
                REQUIRE(lhs.size() == rhs.size());
                for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-14));
                // original times survive
                for (std::size_t i = 0; i < p.size(); ++i) CHECK(lhs[i * a * b] == p[i]);
            }
    }
}

TEST_CASE("seed derivation") {
    const SeedSpec s{123, 4};
    CHECK(derive_seed(s, 10) == derive_seed(s, 10));
    CHECK(derive_seed(s, 10) != derive_seed(s, 11));
    CHECK(derive_seed(s, 10, 1) != derive_seed(s, 10, 0));
    CHECK(derive_seed(s, 10) != derive_seed(SeedSpec{123, 5}, 10));
    auto e1 = make_engine(s, 3), e2 = make_engine(s, 3);
    for (int i = 0; i < 100; ++i) CHECK(e1() == e2());
}

TEST_CASE("contract state access and invariants") {
    ContractState u(0.5);
    u.set(Component::F, 100.0).set(Component::y, std::log(100.0)).set(Component::Y, std::log(100.0) - 0.02);
    u.set(Component::Z, 100.0 * (std::log(100.0) + 0.02));
    CHECK(u.has(Component::F));
    CHECK_FALSE(u.has(Component::P2));
    CHECK_THROWS_AS(u[Component::P2], ComponentError);
    u.derive_variances();
    CHECK(u[Component::v_lambda] == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(u[Component::v_eta] == doctest::Approx(0.04).epsilon(1e-12));
    CHECK_NOTHROW(validate_state(u));

    ContractState bad = u;
    bad.set(Component::y, 4.0);
    CHECK_THROWS_AS(validate_state(bad), ValidationError);
    ContractState neg(0.0);
    neg.set(Component::F, -1.0);
    CHECK_THROWS_AS(validate_state(neg), ValidationError);
    ContractState badv = u;
    badv.set(Component::v_lambda, 0.05);
    CHECK_THROWS_AS(validate_state(badv), ValidationError);
}

TEST_CASE("component sets") {
    ComponentSet s{Component::F, Component::Y};
    CHECK(s.to_string() == "{F,Y}");
    CHECK(s.contains(Component::Y));
    CHECK((s - ComponentSet{Component::Y}).to_string() == "{F}");
    for (auto c : kAllComponents) CHECK(parse_component(component_name(c)) == c);
    CHECK_FALSE(parse_component("Q").has_value());
}

namespace {
StatePath sample_path() {
    const auto p = Partition::from_times({0, 0.1, 0.35, 1.0});
    std::vector<ContractState> st;
    double f = 100.0;
    for (double t : p.times()) {
        ContractState u(t);
        u.set(Component::F, f).set(Component::y, std::log(f)).set(Component::Y, std::log(f) - 0.02 * (1 - t));
        st.push_back(u);
        f *= 1.0173;
    }
    return StatePath(p, st);
}
} // namespace

TEST_CASE("state path validation") {
    const auto p = Partition::regular(1.0, 2);
    std::vector<ContractState> st(3);
    for (int i = 0; i < 3; ++i) st[i] = ContractState(p[i]).set(Component::F, 1.0);
    CHECK_NOTHROW(StatePath(p, st));
    auto misaligned = st;
    misaligned[1] = ContractState(0.4).set(Component::F, 1.0);
    CHECK_THROWS_AS(StatePath(p, misaligned), ValidationError);
    auto mixed = st;
    mixed[2].set(Component::Y, 0.0);
    CHECK_THROWS_AS(StatePath(p, mixed), ValidationError);
    CHECK_THROWS_AS(StatePath(p, {st[0], st[1]}), ValidationError);
    CHECK_NOTHROW(validate_path(sample_path()));
}

TEST_CASE("path CSV round trip is exact") {
    const auto a = sample_path();
    std::stringstream single;
    write_path_csv(single, a);
    CHECK(single.str().rfind("time,F,y,Y\n", 0) == 0);
    auto back = read_paths_csv(single);
    REQUIRE(back.size() == 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(back[0][i].time() == a[i].time());
        for (auto c : {Component::F, Component::y, Component::Y}) CHECK(back[0][i][c] == a[i][c]);
    }

    std::stringstream multi;
    write_paths_csv(multi, {a, a, a});
    CHECK(multi.str().rfind("path,time,", 0) == 0);
    auto many = read_paths_csv(multi);
    CHECK(many.size() == 3);
    CHECK(many[2][3][Component::F] == a[3][Component::F]);
}

TEST_CASE("path CSV errors carry line numbers") {
    std::stringstream bad("time,F\n0,100\n0.5,abc\n1,101\n");
    try {
        read_paths_csv(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::stringstream ragged("time,F\n0,100\n1\n");
    CHECK_THROWS_AS(read_paths_csv(ragged), ParseError);
    std::stringstream unknown("time,Q\n0,1\n1,1\n");
    CHECK_THROWS_AS(read_paths_csv(unknown), ParseError);
    std::stringstream comments("# exported\ntime,F\n\n0,100\n1,120\n");
    CHECK(read_paths_csv(comments).at(0).size() == 2);
}

TEST_CASE("double formatting round trips") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 4.9e-324})
        CHECK(parse_double(format_double(x)) == x);
    CHECK(parse_double(" +1.5 ") == 1.5);
    CHECK_THROWS_AS(parse_double("1.5x"), ParseError);
    CHECK_THROWS_AS(parse_double(""), ParseError);
}
