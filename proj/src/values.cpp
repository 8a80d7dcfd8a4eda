#include "seasonal/values.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "seasonal/csv.hpp"
#include "seasonal/mutant.hpp"
#include "seasonal/numerics.hpp"
#include "seasonal/resident.hpp"

namespace seasonal {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double tau_arc(double x, double c) { return -std::log(x) + 2.0 / (x * c) - 4.0 / c; }

// x on the arc for a given tau >= ln 2
double arc_x_of_tau(double tau, double c) {
    if (tau <= kLn2) return 0.5;
    const double x_lo = 2.0 / (c * tau + c + 4.0);
    return find_root([&](double x) { return tau_arc(x, c) - tau; }, x_lo, 0.5);
}

// x_m along the (u_r_hat, u_m = 1) ride on the surface, anchored so that
// x_m(x_anchor) = xm_anchor:  x_m = C1 x^2 e^{tau(x)} + x c + 1.
struct RideCurve {
    double c, C1;

    static RideCurve through(double x_anchor, double xm_anchor, double c) {
        const double e = std::exp(tau_arc(x_anchor, c));
        return {c, (xm_anchor - x_anchor * c - 1.0) / (x_anchor * x_anchor * e)};
    }
    double operator()(double x) const {
        const double arg = 2.0 / (x * c) - 4.0 / c;
        if (arg > 600.0) return -std::numeric_limits<double>::infinity();  // C1 < 0 here
        return C1 * x * std::exp(arg) + x * c + 1.0;
    }
};

// first sign change of f marching from lo toward hi (in either direction),
// refined by bracketed root finding
double first_root(const std::function<double(double)>& f, double lo, double hi, int steps) {
    auto bracket = first_sign_change(f, lo, hi, steps);
    if (!bracket) throw RootNotBracketed(lo, hi, f(lo), f(hi));
    double a = bracket->first, b = bracket->second;
    if (a == b) return a;
    if (a > b) std::swap(a, b);
    return find_root(f, a, b, {1e-15, 0.0, 300});
}

double region_A_tau1(double T, double c) {
    auto g = [&](double tau) { return -std::expm1(-tau) - expm1_ratio(c - 1.0, T - tau); };
    const double hi = std::min(T, kLn2);
    // g(0) < 0; g(hi) >= 0 exactly when T <= T1, up to rounding at T = T1
    const double ghi = g(hi);
    if (ghi <= 0.0) {
        if (ghi > -1e-9) return hi;
        throw RootNotBracketed(0.0, hi, g(0.0), ghi);
    }
    return find_root(g, 0.0, hi, {1e-15, 0.0, 300});
}

}  // namespace

const char* region_name(Region r) {
    switch (r) {
        case Region::A: return "A";
        case Region::B: return "B";
        case Region::C: return "C";
    }
    return "?";
}

ArcEntry arc_entry_point(double T, double c) {
    const double T1 = season_threshold_T1(c);
    if (!(T > T1)) throw XOutOfRange("arc entry exists only for T > T1");
    auto f = [&](double x) { return x - expm1_ratio(c - 1.0, T - tau_arc(x, c)); };
    const double fhi = f(0.5);
    if (fhi >= 0.0) {
        // T is at (or within rounding of) T1: entry sits at the junction
        if (fhi < 1e-9) return {0.5, kLn2};
        throw RootNotBracketed(0.0, 0.5, -1.0, fhi);
    }
    const double x_lo = arc_x_of_tau(T, c);  // tau(x_lo) = T so f(x_lo) = x_lo > 0
    const double x = find_root(f, std::min(x_lo, 0.5 * (1.0 - 1e-12)), 0.5, {1e-15, 0.0, 300});
    return {x, tau_arc(x, c)};
}

double compute_T2(double c) {
    const HatJunction B = hat_junction_eps0(c);
    const RideCurve ride = RideCurve::through(B.x_r, B.x_m, c);
    // entry point of the limiting trajectory: ride backward from the junction
    // until x_m meets the diagonal x_m = x_r
    auto f = [&](double x) { return ride(x) - x; };
    const double x_lo = std::max(1e-8, 2.0 / (620.0 * c));
    const double x_entry = first_root(f, B.x_r * (1.0 - 1e-12), x_lo, 4000);
    const double tau_entry = tau_arc(x_entry, c);
    return tau_entry + log1p_ratio(c - 1.0, x_entry);
}

Region classify_region(double T, double c) {
    if (T <= season_threshold_T1(c)) return Region::A;
    return T <= compute_T2(c) ? Region::B : Region::C;
}

ValuePair value_region_A(double T, double c) {
    const double tau1 = region_A_tau1(T, c);
    const double x1 = -std::expm1(-tau1);
    const double U = x1 * x1 * std::exp(-c * (T - tau1));
    return {U, U};
}

ValuePair value_region_B(double T, double c) {
    const ArcEntry e = arc_entry_point(T, c);
    const double decay = std::exp(-c * (T - e.tau));
    const double U_r = (e.x * (1.0 - e.x) + (1.0 - 2.0 * e.x) / c) * decay;

    const RideCurve ride = RideCurve::through(e.x, e.x, c);
    // mutant leaves through S_hat: x_m = 1 - e^{-tau} on the surface
    auto q = [&](double x) { return ride(x) + std::expm1(-tau_arc(x, c)); };
    const double x1 = first_root(q, e.x, 0.5, 4000);
    const double xm1 = -std::expm1(-tau_arc(x1, c));
    const double U_m = xm1 * xm1 * (e.x / x1) * (e.x / x1) * decay;
    return {U_r, U_m};
}

ValuePair value_region_C(double T, double c) {
    const ArcEntry e = arc_entry_point(T, c);
    const double decay = std::exp(-c * (T - e.tau));
    const double U_r = (e.x * (1.0 - e.x) + (1.0 - 2.0 * e.x) / c) * decay;

    const HatJunction B = hat_junction_eps0(c);
    const RideCurve ride = RideCurve::through(e.x, e.x, c);
    // mutant reaches the singular arc S_hat^sigma: x_m = (2 + x c)/4
    auto q = [&](double x) { return ride(x) - 0.25 * (2.0 + x * c); };
    const double xH = first_root(q, e.x, B.x_r, 4000);

    // value along S_hat^sigma: U = C3 x^2 + (4 + 3 x c (3 + 2 x c))/(24 x c),
    // anchored at the junction where the value is x_m(B)^2
    const double C3 = c * c / 16.0 - (4.0 + 3.0 * B.x_r * c) / (24.0 * B.x_r * B.x_r * B.x_r * c);
    const double xHc = xH * c;
    const double U_H = C3 * xH * xH + (4.0 + 3.0 * xHc * (3.0 + 2.0 * xHc)) / (24.0 * xHc);
    const double U_m = U_H * (e.x / xH) * (e.x / xH) * decay;
    return {U_r, U_m};
}

ValuePair season_values(double T, double c) {
    if (!(T > 0.0)) throw NonPositive("T");
    if (!(c > 0.0)) throw NonPositive("c");
    switch (classify_region(T, c)) {
        case Region::A: return value_region_A(T, c);
        case Region::B: return value_region_B(T, c);
        case Region::C: return value_region_C(T, c);
    }
    return {0.0, 0.0};
}

std::vector<ValueSweepRow> value_sweep(double c, double T_min, double T_max, int count) {
    std::vector<ValueSweepRow> rows(std::max(count, 1));
    const double T1 = season_threshold_T1(c);
    const double T2 = compute_T2(c);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        const double T = count > 1 ? T_min + (T_max - T_min) * i / (count - 1.0) : T_min;
        Region reg = T <= T1 ? Region::A : (T <= T2 ? Region::B : Region::C);
        ValuePair v{};
        switch (reg) {
            case Region::A: v = value_region_A(T, c); break;
            case Region::B: v = value_region_B(T, c); break;
            case Region::C: v = value_region_C(T, c); break;
        }
        rows[i] = {T, v.U_r, v.U_m, reg};
    }
    return rows;
}

void write_value_sweep_csv(std::ostream& os, const std::vector<ValueSweepRow>& rows) {
    os << "T,U_r,U_m,region\n";
    for (const auto& r : rows)
        os << g17(r.T) << ',' << g17(r.U_r) << ',' << g17(r.U_m) << ',' << region_name(r.region)
           << "\n";
}

}  // namespace seasonal
