#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "seasonal/mutant.hpp"
#include "seasonal/numerics.hpp"
#include "seasonal/trajectory.hpp"

using namespace seasonal;

namespace {

ModelParams make(double c, double T, double eps = 0.0) {
    ModelParams p;
    p.c = c;
    p.T = T;
    p.eps = eps;
    return validate(p);
}

}  // namespace

TEST_CASE("zero-control season leaves the resource untouched") {
    const ModelParams p = make(3.0, 2.0);
    const ConstPolicy pol(p, 0.0, 0.0);
    const SeasonOutcome o = integrate_season(p, pol, 1.5);
    CHECK(o.J_n == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(o.J_r == 0.0);
    CHECK(o.J_m == 0.0);
    CHECK(o.samples.back().state.p_r == 0.0);
    CHECK(o.samples.back().state.n == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("all-feeding season matches the closed-form exponentials") {
    const ModelParams p = make(3.0, 2.0, 0.3);
    const ConstPolicy pol(p, 1.0, 1.0);
    const SeasonOutcome o = integrate_season(p, pol, 1.0);
    CHECK(o.U_r == 0.0);  // never reproduces
    CHECK(o.U_m == 0.0);
    CHECK(o.J_n == doctest::Approx(-std::expm1(-p.c * p.T) / p.c).epsilon(1e-9));
    const FullState end = o.samples.back().state;
    CHECK(end.n == doctest::Approx(std::exp(-p.c * p.T)).epsilon(1e-9));
    // p' = -p + n with n = e^{-ct}: p(t) = (e^{-ct} - e^{-t})/(1 - c)
    const double p_exact = (std::exp(-p.c * p.T) - std::exp(-p.T)) / (1.0 - p.c);
    CHECK(end.p_r == doctest::Approx(p_exact).epsilon(1e-9));
}

TEST_CASE("locate_event solves switching residuals") {
    CHECK(locate_event([](double t) { return t - 1.0; }, 0.0, 2.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(locate_event([](double t) { return 1.0 + t * t; }, 0.0, 2.0),
                    NoSignChange);

    // feeding trajectory x(t) = (e^{(c-1)t}-1)/(c-1) crossing x = 1-e^{-(T-t)}
    const double c = 3.0, T = 0.8;
    auto resid = [&](double t) {
        return expm1_ratio(c - 1.0, t) + std::expm1(-(T - t));
    };
    const double t_star = locate_event(resid, 0.0, T);
    // the same crossing expressed in backward time solves the tau_1 equation
    const double tau1 = find_root(
        [&](double tau) { return -std::expm1(-tau) - expm1_ratio(c - 1.0, T - tau); }, 0.0,
        T);
    CHECK(T - t_star == doctest::Approx(tau1).epsilon(1e-8));
}

TEST_CASE("payoffs are additive across an interior split") {
    const ModelParams p = make(3.0, 2.0);
    const MutantPolicy pol(p);
    const SeasonOutcome whole = integrate_season(p, pol, 1.0);

    const double t_split = 0.9;  // inside the sliding segment
    IntegrateOptions first_opt;
    first_opt.t_stop = t_split;
    const SeasonOutcome first = integrate_season(p, pol, 1.0, first_opt);
    const FullState mid = first.samples.back().state;
    const SeasonOutcome second = integrate_from(p, pol, mid);

    CHECK(first.J_n + second.J_n == doctest::Approx(whole.J_n).epsilon(1e-10));
    CHECK(first.U_r + second.U_r * mid.n ==
          doctest::Approx(whole.U_r).epsilon(1e-10));  // U is per unit start-n
    CHECK(first.U_m + second.U_m * mid.n == doctest::Approx(whole.U_m).epsilon(1e-10));
}

TEST_CASE("sliding segment stays on the arc") {
    const ModelParams p = make(3.0, 2.0);
    const MimicPolicy pol(p);
    const SeasonOutcome o = integrate_season(p, pol, 1.0);
    REQUIRE(o.events.size() >= 2);
    const double t_enter = o.events.front().t;
    const double t_leave = o.events.back().t;
    double worst = 0.0;
    int checked = 0;
    for (const auto& s : o.samples) {
        if (s.t < t_enter + 1e-6 || s.t > t_leave - 1e-6) continue;
        const double x = s.state.p_r / s.state.n;
        const double tau = p.T - s.t;
        worst = std::max(worst,
                         std::abs(tau - pol.resident().singular_arc_tau(std::min(x, 0.5))));
        ++checked;
    }
    CHECK(checked > 10);
    CHECK(worst < 1e-6);
}

TEST_CASE("reduced sliding field agrees with the substituted bang field") {
    const ModelParams p = make(3.0, 4.0);
    const MutantPolicy pol(p);
    IntegrateOptions reduced, full;
    reduced.record_samples = full.record_samples = false;
    full.reduced_sliding = false;
    const SeasonOutcome a = integrate_season(p, pol, 1.0, reduced);
    const SeasonOutcome b = integrate_season(p, pol, 1.0, full);
    CHECK(a.U_r == doctest::Approx(b.U_r).epsilon(1e-7));
    CHECK(a.U_m == doctest::Approx(b.U_m).epsilon(1e-7));
    CHECK(a.J_n == doctest::Approx(b.J_n).epsilon(1e-7));
}

TEST_CASE("resource is non-increasing along any admissible season") {
    const ModelParams p = make(2.0, 3.0, 0.2);
    const MutantPolicy pol(p);
    const SeasonOutcome o = integrate_season(p, pol, 1.0);
    for (size_t i = 1; i < o.samples.size(); ++i)
        CHECK(o.samples[i].state.n <= o.samples[i - 1].state.n + 1e-12);
}

TEST_CASE("trajectory CSV export") {
    const ModelParams p = make(3.0, 1.0);
    const ConstPolicy pol(p, 1.0, 0.0);
    const SeasonOutcome o = integrate_season(p, pol, 1.0);
    std::ostringstream os;
    write_trajectory_csv(os, o, p.T);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,p_r,p_m,n,x_r,x_m,u_r,u_m");
    size_t rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    CHECK(rows == o.samples.size());
}

TEST_CASE("degenerate inputs are rejected") {
    const ModelParams p = make(1.0, 1.0);
    const ConstPolicy pol(p, 0.0, 0.0);
    CHECK_THROWS_AS(integrate_season(p, pol, 0.0), ZeroResource);
    CHECK_THROWS_AS(integrate_from(p, pol, FullState{0.0, 0.0, 1.0, 2.0}), TauOutOfSeason);
}
