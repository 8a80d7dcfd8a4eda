#include <doctest.h>

#include <array>
#include <cmath>

#include "seasonal/model.hpp"
#include "seasonal/trajectory.hpp"

using namespace seasonal;

TEST_CASE("validate accepts admissible parameters and fills the flag") {
    ModelParams p;
    p.T = 2.0;
    p.c = 1.5;
    p.eps = 0.0;
    const ModelParams v = validate(p);
    CHECK(v.hierarchical_admissible);

    p.T = 4.0;
    p.c = 3.0;
    p.eps = 0.5;  // 0.5 >= 1/3
    CHECK_FALSE(validate(p).hierarchical_admissible);
}

TEST_CASE("validate rejects out-of-range fields") {
    ModelParams p;
    p.T = 0.0;
    CHECK_THROWS_AS(validate(p), NonPositive);
    p.T = 1.0;
    p.c = -1.0;
    CHECK_THROWS_AS(validate(p), NonPositive);
    p.c = 1.0;
    p.eps = 1.0;
    CHECK_THROWS_AS(validate(p), EpsOutOfRange);
    p.eps = -0.1;
    CHECK_THROWS_AS(validate(p), EpsOutOfRange);
    p.eps = 0.0;
    p.alpha = 0.0;
    CHECK_THROWS_AS(validate(p), NonPositive);
}

TEST_CASE("reduce maps full states to ratios and backward time") {
    const ReducedState r = reduce({1.0, 2.0, 2.0, 0.5}, 2.0);
    CHECK(r.x_r == doctest::Approx(0.5));
    CHECK(r.x_m == doctest::Approx(1.0));
    CHECK(r.tau == doctest::Approx(1.5));

    const ReducedState start = reduce({0.0, 0.0, 1.0, 0.0}, 4.0);
    CHECK(start.x_r == 0.0);
    CHECK(start.x_m == 0.0);
    CHECK(start.tau == 4.0);

    CHECK_THROWS_AS(reduce({3.0, 3.0, 1e-12, 1.0}, 2.0), ZeroResource);
}

namespace {

// plain RK4 on the reduced two-ratio system under fixed controls; kept
// independent of the production integrator on purpose
std::array<double, 2> advance_reduced(std::array<double, 2> x, double c, double eps,
                                      ControlPair u, double t_span) {
    const int n = 4000;
    const double h = t_span / n;
    auto rhs = [&](const std::array<double, 2>& s) {
        const double w = c * ((1.0 - eps) * u.u_r + eps * u.u_m);
        return std::array<double, 2>{-s[0] * (1.0 - w) + u.u_r, -s[1] * (1.0 - w) + u.u_m};
    };
    for (int i = 0; i < n; ++i) {
        const auto k1 = rhs(x);
        const auto k2 = rhs({x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]});
        const auto k3 = rhs({x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]});
        const auto k4 = rhs({x[0] + h * k3[0], x[1] + h * k3[1]});
        x[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        x[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    return x;
}

}  // namespace

TEST_CASE("reduction commutes with the dynamics") {
    ModelParams p;
    p.c = 2.5;
    p.T = 1.3;
    p.eps = 0.3;
    p = validate(p);
    const ConstPolicy pol(p, 1.0, 0.4);
    const FullState init{0.2, 0.35, 1.4, 0.0};

    const SeasonOutcome o = integrate_from(p, pol, init);
    const FullState end = o.samples.back().state;
    const ReducedState via_full = reduce(end, p.T);

    const auto via_reduced =
        advance_reduced({init.p_r / init.n, init.p_m / init.n}, p.c, p.eps, {1.0, 0.4}, p.T);
    CHECK(via_full.x_r == doctest::Approx(via_reduced[0]).epsilon(1e-8));
    CHECK(via_full.x_m == doctest::Approx(via_reduced[1]).epsilon(1e-8));
}
