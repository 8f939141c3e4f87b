#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gridss/errors.hpp"
#include "gridss/network.hpp"
#include "gridss/rng.hpp"

using namespace gridss;

TEST_CASE("rotate_frame basics") {
    const Dq unit{1.0, 0.0};
    CHECK(rotate_frame(unit, 0.0).d == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rotate_frame(unit, 0.0).q == doctest::Approx(0.0).epsilon(1e-15));

    const Dq quarter = rotate_frame(unit, std::numbers::pi / 2.0);
    CHECK(quarter.d == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(quarter.q == doctest::Approx(1.0).epsilon(1e-12));

    const Dq half = rotate_frame(Dq{0.8, 0.6}, std::numbers::pi);
    CHECK(half.d == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK(half.q == doctest::Approx(-0.6).epsilon(1e-12));
}

TEST_CASE("rotate_frame round trip and magnitude preservation") {
    SplitMix64 rng(7);
    for (int t = 0; t < 200; ++t) {
        const Dq x{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        const double theta = 20.0 * rng.uniform() - 10.0;
        const Dq back = rotate_frame(rotate_frame(x, theta), -theta);
        CHECK(std::abs(back.d - x.d) < 1e-12);
        CHECK(std::abs(back.q - x.q) < 1e-12);
        CHECK(std::abs(rotate_frame(x, theta).mag() - x.mag()) < 1e-12);
    }
}

TEST_CASE("default template parses and validates") {
    const NetworkCase c = default_case_template();
    CHECK(c.buses.size() == 9);
    CHECK(c.branches.size() == 9);
    CHECK(c.machine.bus == 1);
    CHECK(c.gfl.bus == 2);
    CHECK(c.gfm.bus == 3);
    CHECK(c.base.omega_b() == doctest::Approx(2.0 * std::numbers::pi * 60.0));
    CHECK(c.total_load_p() == doctest::Approx(3.15));
}

TEST_CASE("build_wscc9 dispatch from shares") {
    const double p_total_base = default_case_template().total_load_p();

    SUBCASE("case 1 at 0.4 loading") {
        const NetworkCase c = build_wscc9(0.4, standard_condition(1));
        CHECK(c.gfm_p_set == doctest::Approx(0.56 * 0.4 * p_total_base).epsilon(1e-14));
        CHECK(c.gfl_p_set == doctest::Approx(0.14 * 0.4 * p_total_base).epsilon(1e-14));
        CHECK(c.total_load_p() == doctest::Approx(0.4 * p_total_base).epsilon(1e-14));
    }
    SUBCASE("all-slack dispatch") {
        OperatingCondition cond{"allsm", 0.0, 0.0, 1.0};
        const NetworkCase c = build_wscc9(0.7, cond);
        CHECK(c.gfm_p_set == 0.0);
        CHECK(c.gfl_p_set == 0.0);
    }
    SUBCASE("case 4 at nominal loading") {
        const NetworkCase c = build_wscc9(1.0, standard_condition(4));
        CHECK(c.gfl_p_set == doctest::Approx(0.54 * p_total_base).epsilon(1e-14));
        CHECK(c.condition.eta_ibr() == doctest::Approx(0.9));
    }
}

TEST_CASE("build_wscc9 rejects invalid fractions") {
    OperatingCondition bad{"bad", 0.7, 0.4, 1.0};
    CHECK_THROWS_AS(build_wscc9(1.0, bad), ConfigError);
    OperatingCondition negative{"neg", -0.1, 0.2, 1.0};
    CHECK_THROWS_AS(build_wscc9(1.0, negative), ConfigError);
    CHECK_THROWS_AS(build_wscc9(0.0, standard_condition(1)), ConfigError);
}

TEST_CASE("build_wscc9 is deterministic") {
    const NetworkCase a = build_wscc9(0.4, standard_condition(2));
    const NetworkCase b = build_wscc9(0.4, standard_condition(2));
    CHECK(case_to_json(a) == case_to_json(b));
}

TEST_CASE("case JSON round trip") {
    const NetworkCase a = build_wscc9(0.4, standard_condition(3));
    const NetworkCase b = case_from_json(case_to_json(a));
    CHECK(case_to_json(a) == case_to_json(b));
    CHECK(b.gfm_p_set == a.gfm_p_set);
    CHECK(b.branches[3].l_km == a.branches[3].l_km);
}

TEST_CASE("standard conditions match the published shares") {
    CHECK(standard_condition(1).eta_gfm == doctest::Approx(0.56));
    CHECK(standard_condition(1).eta_gfl == doctest::Approx(0.14));
    CHECK(standard_condition(2).eta_gfm == doctest::Approx(0.28));
    CHECK(standard_condition(2).eta_gfl == doctest::Approx(0.42));
    CHECK(standard_condition(3).eta_gfm == doctest::Approx(0.72));
    CHECK(standard_condition(4).eta_gfl == doctest::Approx(0.54));
    CHECK_THROWS_AS(standard_condition(5), ConfigError);
}
