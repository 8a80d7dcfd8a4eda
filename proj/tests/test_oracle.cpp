#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "seasonal/mutant.hpp"
#include "seasonal/oracle.hpp"
#include "seasonal/values.hpp"

using namespace seasonal;
namespace dp = seasonal::dp;

TEST_CASE("resident DP basics: terminal slice, monotonicity in time") {
    const auto tab = dp::dp_resident_value(3.0, 2.0, {64, 128, 2.0, 2});
    for (int i = 0; i < 64; ++i) CHECK(tab.value[i] == 0.0);  // tau = 0 slice
    // more season is weakly more offspring
    for (int k = 0; k < 128; ++k)
        CHECK(tab.value_at(0.0, (k + 1) * tab.dt()) >= tab.value_at(0.0, k * tab.dt()) - 1e-13);
    CHECK(tab.clamp_hits == 0);  // optimal flows never hit the x_max cap here
}

TEST_CASE("resident DP converges to the analytic value under refinement") {
    const double c = 3.0, T = 2.0;
    const double exact = season_values(T, c).U_r;
    double prev_err = -1.0;
    for (int n : {64, 128, 256}) {
        const auto tab = dp::dp_resident_value(c, T, {n, 2 * n, 2.0, 2});
        const double err = std::abs(tab.value_at(0.0, T) - exact);
        if (prev_err > 0.0) CHECK(prev_err / err >= 1.5);  // at least linear decay
        prev_err = err;
    }
}

TEST_CASE("the singular arc shows up as argmax chattering") {
    // discrete bang controls cannot hold the arc; neighbouring cells around
    // it alternate between feeding and laying
    const double c = 3.0, T = 2.0;
    const dp::GridSpec grid{256, 512, 2.0, 2};
    const auto tab = dp::dp_resident_value(c, T, grid);
    const ResidentPolicy pol(c, T);
    const double tau = 1.4;
    const double xa = pol.singular_arc_x(tau);
    const int k = static_cast<int>(std::lround(tau / tab.dt()));
    int ones = 0, zeros = 0;
    for (int off = -4; off <= 4; ++off) {
        const int i = static_cast<int>(std::lround(xa / tab.dx())) + off;
        (tab.argmax[k * grid.nx + i] ? ones : zeros)++;
    }
    CHECK(ones > 0);
    CHECK(zeros > 0);
}

TEST_CASE("resident DP argmax matches the analytic feedback away from surfaces") {
    const double c = 3.0, T = 2.0;
    const dp::GridSpec grid{256, 512, 2.0, 2};
    const auto tab = dp::dp_resident_value(c, T, grid);
    const ResidentPolicy pol(c, T);
    const double dx = tab.dx(), dt = tab.dt();
    long total = 0, agree = 0;
    for (int k = 1; k <= grid.nt; ++k) {
        const double tau = k * dt;
        const double b = pol.boundary_x(tau);
        for (int i = 0; i < grid.nx; ++i) {
            const double x = i * dx;
            if (std::abs(x - b) <= 1.5 * dx) continue;  // one-cell margin at S/arc
            const double u = pol.control(x, tau);
            if (u > 0.0 && u < 1.0) continue;
            ++total;
            if (tab.argmax[k * grid.nx + i] == (u > 0.5 ? 1 : 0)) ++agree;
        }
    }
    CHECK(total > 100000);
    CHECK(static_cast<double>(agree) / total >= 0.99);
}

TEST_CASE("mutant DP equals the resident value in region A and exceeds it beyond") {
    const double c = 3.0;
    {
        const double T = 0.8;  // region A
        const ResidentPolicy rp(c, T);
        const auto mt = dp::dp_mutant_value(c, 0.0, T, rp, {96, 384, 2.0, 2});
        const double exact = season_values(T, c).U_r;
        CHECK(mt.value_origin() == doctest::Approx(exact).epsilon(2e-2));
    }
    {
        const double T = 4.0;  // deep region C: DP itself sees the gap
        const ResidentPolicy rp(c, T);
        const auto mt = dp::dp_mutant_value(c, 0.0, T, rp, {96, 384, 2.0, 2});
        const auto rt = dp::dp_resident_value(c, T, {96, 384, 2.0, 2});
        CHECK(mt.value_origin() > rt.value_at(0.0, T) + 0.02);
    }
}

TEST_CASE("mutant DP argmax matches the feedback away from all surfaces") {
    const double c = 3.0, T = 2.0;
    const dp::GridSpec grid{96, 384, 2.0, 2};
    const ResidentPolicy rp(c, T);
    const auto tab = dp::dp_mutant_value(c, 0.0, T, rp, grid, {.keep_argmax = true});
    ModelParams p;
    p.c = c;
    p.T = T;
    const MutantPolicy pol(validate(p));
    const double dx = tab.dx(), dt = tab.dt();
    long total = 0, agree = 0;
    for (int k = 4; k <= grid.nt; k += 4) {
        const double tau = k * dt;
        const double br = rp.boundary_x(tau);
        const double sm = -std::expm1(-tau);
        for (int ir = 0; ir < grid.nx; ++ir) {
            const double xr = ir * dx;
            if (std::abs(xr - br) <= 1.5 * dx) continue;  // resident switch margin
            for (int im = 0; im < grid.nx; ++im) {
                const double xm = im * dx;
                if (std::abs(xm - sm) <= 1.5 * dx) continue;               // S_m margin
                if (tau > std::numbers::ln2 && std::abs(xm - 0.5) <= 1.5 * dx)
                    continue;                                              // S_1 margin
                const PolicyDecision d = pol.decide({xr, xm, tau});
                if (d.regime != Regime::bang) continue;
                ++total;
                if (tab.argmax_at(xr, xm, tau) == (d.u.u_m > 0.5 ? 1 : 0)) ++agree;
            }
        }
    }
    CHECK(total > 200000);
    CHECK(static_cast<double>(agree) / total >= 0.98);
}

TEST_CASE("no adjoint jump across S_r when the mutant is richer") {
    // k = 0 case: above the x_m = x_r diagonal the value gradient in x_r is
    // continuous (and here flat) across the resident switch
    const double c = 3.0, T = 0.4;
    const ResidentPolicy rp(c, T);
    const auto tab = dp::dp_mutant_value(c, 0.0, T, rp, {256, 512, 2.0, 2});
    const double xs = -std::expm1(-T);  // S_r at tau = T
    const double xm = 0.6;
    const double h = 4.0 * tab.dx();
    const double left =
        (tab.value_final_at(xs - h, xm) - tab.value_final_at(xs - 2.0 * h, xm)) / h;
    const double right =
        (tab.value_final_at(xs + 2.0 * h, xm) - tab.value_final_at(xs + h, xm)) / h;
    const double scale = tab.value_final_at(xs, xm);
    CHECK(std::abs(left - right) < 0.05 * std::max(scale, 1e-6));
}

TEST_CASE("mimic restriction reproduces the resident iteration exactly") {
    const double c = 3.0, T = 2.0;
    const dp::GridSpec grid{64, 128, 2.0, 2};
    const auto rt = dp::dp_resident_value(c, T, grid);
    const ResidentPolicy rp(c, T);
    const auto mt = dp::dp_mutant_value(c, 0.37, T, rp, grid, {.mimic = true});
    REQUIRE(mt.mimic_diagonal.size() == static_cast<size_t>(grid.nx));
    for (int i = 0; i < grid.nx; ++i)
        CHECK(mt.mimic_diagonal[i] == rt.value[static_cast<size_t>(grid.nt) * grid.nx + i]);
}

TEST_CASE("serial and OpenMP kernels are bit-identical") {
    {
        const auto a = dp::dp_resident_value(2.0, 1.5, {128, 256, 2.0, 3}, false);
        const auto b = dp::dp_resident_value(2.0, 1.5, {128, 256, 2.0, 3}, true);
        REQUIRE(a.value.size() == b.value.size());
        for (size_t i = 0; i < a.value.size(); ++i) CHECK(a.value[i] == b.value[i]);
    }
    {
        const ResidentPolicy rp(2.0, 1.5);
        const auto a = dp::dp_mutant_value(2.0, 0.1, 1.5, rp, {48, 128, 2.0, 2},
                                           {.parallel = false});
        const auto b = dp::dp_mutant_value(2.0, 0.1, 1.5, rp, {48, 128, 2.0, 2},
                                           {.parallel = true});
        for (size_t i = 0; i < a.value_final.size(); ++i)
            CHECK(a.value_final[i] == b.value_final[i]);
    }
}

TEST_CASE("compare harness: zero error, sensitivity, shape checks") {
    const std::vector<double> analytic{0.1, 0.2, 0.3};
    const std::vector<std::vector<double>> runs{{0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}};
    const auto rep = dp::compare(analytic, runs, 1e-3);
    CHECK(rep.pass);
    CHECK(rep.max_rel_err == 0.0);

    std::vector<double> off = analytic;
    for (auto& v : off) v *= 1.05;
    const auto bad = dp::compare(off, runs, 1e-3);
    CHECK_FALSE(bad.pass);

    CHECK_THROWS_AS(dp::compare(analytic, {{0.1, 0.2}}, 1e-3), dp::ShapeMismatch);
}

TEST_CASE("value table dump round-trips") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> data(6 * 5);
    for (auto& v : data) v = u(rng);
    const std::vector<int> dims{6, 5};
    const std::string path = "dp_table_roundtrip.bin";
    dp::dump_value_table(path, dims, data);
    const auto [rdims, rdata] = dp::load_value_table(path);
    CHECK(rdims == dims);
    REQUIRE(rdata.size() == data.size());
    for (size_t i = 0; i < data.size(); ++i) CHECK(rdata[i] == data[i]);
    std::remove(path.c_str());
}
