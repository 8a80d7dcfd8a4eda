#include <doctest.h>

#include <cmath>
#include <numbers>

#include "seasonal/resident.hpp"

using namespace seasonal;

namespace {
constexpr double kLn2 = std::numbers::ln2;
}

TEST_CASE("switching curve S") {
    const ResidentPolicy pol(3.0, 2.5);
    CHECK(pol.switching_curve(0.0) == 0.0);
    CHECK(pol.switching_curve(kLn2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pol.switching_curve(2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(pol.switching_curve(3.0), TauOutOfSeason);
    CHECK_THROWS_AS(pol.switching_curve(-0.1), TauOutOfSeason);
}

TEST_CASE("singular arc tau(x) and its inverse") {
    const ResidentPolicy pol(3.0, 4.0);
    CHECK(pol.singular_arc_tau(0.5) == doctest::Approx(kLn2).epsilon(1e-14));
    CHECK(pol.singular_arc_tau(0.25) ==
          doctest::Approx(std::log(4.0) + 8.0 / 3.0 - 4.0 / 3.0).epsilon(1e-14));
    CHECK(pol.singular_arc_tau(1e-8) > 1e7);  // monotone blow-up toward x = 0
    CHECK_THROWS_AS(pol.singular_arc_tau(0.6), XOutOfRange);
    CHECK_THROWS_AS(pol.singular_arc_tau(0.0), XOutOfRange);

    for (double x : {0.05, 0.2, 0.45, 0.5})
        CHECK(pol.singular_arc_x(pol.singular_arc_tau(x)) == doctest::Approx(x).epsilon(1e-10));
    // boundary is continuous through the junction at ln 2
    CHECK(pol.boundary_x(kLn2 - 1e-9) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(pol.boundary_x(kLn2 + 1e-9) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("singular control values") {
    const ResidentPolicy pol2(2.0, 3.0);
    CHECK(pol2.singular_control(0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    const ResidentPolicy pol3(3.0, 3.0);
    CHECK(pol3.singular_control(0.5) == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
    CHECK(pol3.singular_control(1e-9) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("season threshold T1") {
    CHECK(season_threshold_T1(3.0) == doctest::Approx(1.5 * kLn2).epsilon(1e-14));
    CHECK(season_threshold_T1(2.0) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    // removable singularity at c = 1: limit 1/2 + ln 2, cross-validated
    const double lim = season_threshold_T1(1.0);
    CHECK(lim == doctest::Approx(0.5 + kLn2).epsilon(1e-12));
    CHECK(lim == doctest::Approx(season_threshold_T1(1.0 + 1e-6)).epsilon(1e-6));
    CHECK(lim == doctest::Approx(season_threshold_T1(1.0 - 1e-6)).epsilon(1e-6));
    CHECK_THROWS_AS(season_threshold_T1(0.0), NonPositive);
}

TEST_CASE("feedback classification") {
    const ResidentPolicy pol(3.0, 4.0);
    CHECK(pol.control(0.7, 0.0) == 0.0);  // terminal time reproduces
    // junction point lies on the arc
    CHECK(pol.control(0.5, kLn2) == doctest::Approx(2.0 / 7.0));
    CHECK(pol.control(0.1, 3.0) == 1.0);  // deep feeding region below the arc
    CHECK(pol.control(0.9, 3.0) == 0.0);  // above everything
    CHECK(pol.control(0.35, 0.4) == 0.0);  // above S at small tau (S = 0.3297)
    CHECK(pol.control(0.1, 0.4) == 1.0);   // below S
    // exactly on S: the value of the region entered forward in time
    const double tau = 0.5;
    CHECK(pol.control(pol.switching_curve(tau), tau) == 0.0);
    // on the arc away from the junction
    const double xa = 0.3;
    CHECK(pol.control(xa, pol.singular_arc_tau(xa)) == doctest::Approx(pol.singular_control(xa)));
}

TEST_CASE("points riding the arc stay on it") {
    // backward ride: x' = -x^2 c/(2 + x c) keeps tau_arc(x) - tau constant
    const double c = 2.0;
    const ResidentPolicy pol(c, 6.0);
    double x = 0.5, tau = kLn2;
    const int n = 20000;
    const double h = 2.0 / n;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        auto f = [c](double z) { return -z * z * c / (2.0 + z * c); };
        const double k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2),
                     k4 = f(x + h * k3);
        x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        tau += h;
        worst = std::max(worst, std::abs(pol.singular_arc_tau(x) - tau));
    }
    CHECK(worst < 1e-6);
}
