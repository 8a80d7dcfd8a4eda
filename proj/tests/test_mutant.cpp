#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "seasonal/mutant.hpp"
#include "seasonal/resident.hpp"
#include "seasonal/trajectory.hpp"
#include "seasonal/values.hpp"

using namespace seasonal;

namespace {
constexpr double kLn2 = std::numbers::ln2;

ModelParams make(double c, double T, double eps = 0.0) {
    ModelParams p;
    p.c = c;
    p.T = T;
    p.eps = eps;
    return validate(p);
}
}  // namespace

TEST_CASE("S_m switching surface") {
    const MutantPolicy pol(make(3.0, 2.0));
    CHECK(pol.switching_surface_Sm(0.0) == 0.0);
    CHECK(pol.switching_surface_Sm(kLn2) == doctest::Approx(0.5));
    CHECK(pol.switching_surface_Sm(1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK_THROWS_AS(pol.switching_surface_Sm(2.5), TauOutOfSeason);
}

TEST_CASE("S_1^sigma arc and control") {
    CHECK(*s1_arc_tau(0.5, 0.2, 3.0) == doctest::Approx(kLn2).epsilon(1e-13));
    CHECK(*s1_arc_tau(0.25, 0.2, 3.0) ==
          doctest::Approx(std::log(4.0) + 2.0 / 0.15 - 4.0 / 0.6).epsilon(1e-13));
    CHECK(!s1_arc_tau(0.3, 0.0, 3.0).has_value());  // eps = 0: hyperplane marker
    CHECK_THROWS_AS(s1_arc_tau(0.6, 0.2, 3.0), XOutOfRange);

    CHECK(s1_singular_control(0.5, 0.0, 3.0) == doctest::Approx(0.5));
    CHECK(s1_singular_control(0.5, 0.2, 3.0) == doctest::Approx(1.0 / 2.3));
    CHECK(s1_singular_control(1e-9, 0.2, 3.0) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("sliding resident control") {
    // eps = 0 collapses to the plain singular control, whatever the mutant does
    for (double um : {0.0, 0.37, 1.0})
        CHECK(sliding_resident_control(0.5, um, 0.0, 3.0) == doctest::Approx(2.0 / 7.0));
    // value of the sliding formula at (x_r=1/2, u_m=1, eps=0.2, c=3):
    // 2*0.5*2.5/(2.2*3.5) - 0.5*0.6/2.2
    CHECK(sliding_resident_control(0.5, 1.0, 0.2, 3.0) ==
          doctest::Approx(2.5 / 7.7 - 0.3 / 2.2).epsilon(1e-14));
    CHECK(sliding_resident_control(0.5, 1.0, 0.2, 3.0) ==
          doctest::Approx(0.18831168831168832).epsilon(1e-12));
    CHECK_THROWS_AS(sliding_resident_control(0.5, 1.0, 0.4, 3.0), EpsBoundViolated);
    CHECK_THROWS_AS(sliding_resident_control(0.7, 0.5, 0.1, 3.0), XOutOfRange);
}

TEST_CASE("sliding control satisfies its defining invariance") {
    // u_r_hat is defined by x_r(1 - c((1-eps)u + eps u_m)) - u = -x_r^2 c/(2 + x_r c)
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ux(1e-6, 0.5), uu(0.0, 1.0), uc(0.3, 5.0);
    for (int i = 0; i < 2000; ++i) {
        const double c = uc(rng), x = ux(rng), um = uu(rng);
        const double eps = uu(rng) * 0.99 / c;
        const double u = sliding_equivalent_control(x, um, eps, c);
        const double lhs = x * (1.0 - c * ((1.0 - eps) * u + eps * um)) - u;
        const double rhs = -x * x * c / (2.0 + x * c);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
}

TEST_CASE("S_hat^sigma closed forms for eps = 0") {
    CHECK(hat_arc_xm(0.5, 3.0) == doctest::Approx(0.875));
    CHECK(hat_arc_xm(0.5, 2.0) == doctest::Approx(0.75));
    CHECK(hat_arc_xm(1e-9, 3.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(hat_singular_control(0.5, 3.0) == doctest::Approx(2.0 / 7.0));
    CHECK(hat_singular_control(0.5, 2.0) == doctest::Approx(1.0 / 3.0));
    CHECK(hat_singular_control(1e-9, 3.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(hat_arc_xm(0.0, 3.0), XOutOfRange);
}

TEST_CASE("hat junction solves both defining equations") {
    for (double c : {1.5, 3.0, 5.0, 0.9}) {
        const HatJunction j = hat_junction_eps0(c);
        CHECK(j.x_m == doctest::Approx(0.25 * (2.0 + j.x_r * c)).epsilon(1e-12));
        CHECK(j.x_m == doctest::Approx(-std::expm1(-j.tau)).epsilon(1e-10));
        const ResidentPolicy rp(c, 10.0);
        CHECK(j.tau == doctest::Approx(rp.singular_arc_tau(j.x_r)).epsilon(1e-10));
    }
}

TEST_CASE("S_2^sigma existence and control") {
    CHECK(!s2_singular_control(0.7, 0.0, 3.0).has_value());  // 1 - 3 < 0
    // eps = 0 reduction u_m = (1-c)/(2-c) on x_m = 1/(2-c)
    const auto u = s2_singular_control(1.0 / 1.5, 0.0, 0.5);
    REQUIRE(u.has_value());
    CHECK(*u == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(s2_singular_control(1.0 / (2.0 - 1.25 * 0.65), 0.35, 1.25).has_value());

    const auto tan = s2_tangency_point(0.35, 1.25);
    REQUIRE(tan.has_value());
    CHECK(tan->x_m == doctest::Approx(1.0 / 1.1875).epsilon(1e-12));
    CHECK(tan->tau == doctest::Approx(-std::log(1.0 - 1.0 / 1.1875)).epsilon(1e-12));
    CHECK(!s2_tangency_point(0.0, 1.0).has_value());  // degenerate boundary
    CHECK(!s2_tangency_point(0.0, 3.0).has_value());
}

TEST_CASE("Kelley sign holds wherever the S_2 control exists") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uxm(0.0, 1.5), uc(0.2, 3.0), ue(0.0, 0.9);
    for (int i = 0; i < 5000; ++i) {
        const double xm = uxm(rng), c = uc(rng), eps = ue(rng);
        if (const auto u = s2_singular_control(xm, eps, c)) {
            CHECK(2.0 - (1.0 - eps) * c + xm * eps * c >= 0.0);
            CHECK(*u >= 0.0);
            CHECK(*u <= 1.0);
        }
    }
}

TEST_CASE("feedback assembly: terminal, mimicking and simultaneous switches") {
    const MutantPolicy pol(make(3.0, 2.0));
    // terminal time reproduces
    const ControlPair term = pol.control({0.4, 0.9, 0.0});
    CHECK(term.u_r == 0.0);
    CHECK(term.u_m == 0.0);
    // off the arcs with x_m = x_r the mutant copies the resident
    for (double tau : {0.3, 0.55, 1.1, 1.9})
        for (double x : {0.05, 0.3, 0.8}) {
            const ControlPair u = pol.control({x, x, tau});
            const double ur = pol.resident().control(x, tau);
            if (ur == 0.0 || ur == 1.0) CHECK(u.u_m == ur);
        }
    // just inside the feeding region with x_m below x_r: both feed
    const double tau1 = 0.5;
    const double xs = pol.resident().switching_curve(tau1);
    const ControlPair both = pol.control({xs - 1e-4, 0.5 * xs, tau1});
    CHECK(both.u_r == 1.0);
    CHECK(both.u_m == 1.0);
    // exactly on S_r the resident enters reproduction; the mutant, still
    // below its own surface, keeps feeding
    const ControlPair on = pol.control({xs, 0.5 * xs, tau1});
    CHECK(on.u_r == 0.0);
    CHECK(on.u_m == 1.0);
}

TEST_CASE("numeric sweep reproduces the eps = 0 structure in the limit") {
    const MutantPolicy pol(make(3.0, 4.0, 1e-7));
    const HatJunction j = hat_junction_eps0(3.0);
    CHECK(pol.hat_junction_x() == doctest::Approx(j.x_r).epsilon(5e-4));
    for (double xr : {0.15, 0.25, 0.35}) {
        CHECK(pol.hat_arc_xm_at(xr) == doctest::Approx(hat_arc_xm(xr, 3.0)).epsilon(2e-3));
        CHECK(pol.hat_arc_um(xr) ==
              doctest::Approx(hat_singular_control(xr, 3.0)).epsilon(2e-3));
        CHECK(pol.hat_switch_xm(0.45) ==
              doctest::Approx(-std::expm1(-pol.resident().singular_arc_tau(0.45)))
                  .epsilon(2e-3));
    }
}

TEST_CASE("policy construction enforces the eps bound") {
    CHECK_THROWS_AS(MutantPolicy(make(3.0, 2.0, 0.5)), EpsBoundViolated);
}

TEST_CASE("best response dominates mimicry, strictly beyond T1") {
    IntegrateOptions opt;
    opt.record_samples = false;
    for (double c : {0.9055, 3.0}) {
        const double T1 = season_threshold_T1(c);
        for (double eps : {0.0, 0.05}) {
            for (double frac : {0.7, 1.9, 3.5}) {
                const double T = T1 * frac;
                const ModelParams p = make(c, T, eps);
                const MutantPolicy best(p);
                const MimicPolicy mimic(p);
                const double u_best = integrate_season(p, best, 1.0, opt).U_m;
                const double u_mimic = integrate_season(p, mimic, 1.0, opt).U_m;
                CHECK(u_best >= u_mimic - 1e-9);
                if (T > T1 * 1.01) CHECK(u_best > u_mimic + 1e-6);
                if (T < T1 * 0.99) CHECK(u_best == doctest::Approx(u_mimic).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("controls never return to full feeding once abandoned") {
    for (double eps : {0.0, 0.1}) {
        const ModelParams p = make(3.0, 4.0, eps);
        const MutantPolicy pol(p);
        const SeasonOutcome o = integrate_season(p, pol, 1.0);
        bool r_left = false, m_left = false;
        for (const auto& s : o.samples) {
            if (s.u.u_r < 1.0 - 1e-9) r_left = true;
            if (s.u.u_m < 1.0 - 1e-9) m_left = true;
            if (r_left) CHECK(s.u.u_r < 1.0 - 1e-9);
            if (m_left) CHECK(s.u.u_m < 1.0 - 1e-9);
        }
    }
}
