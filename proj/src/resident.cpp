#include "seasonal/resident.hpp"

#include <cmath>
#include <numbers>

#include "seasonal/numerics.hpp"

namespace seasonal {

namespace {
constexpr double kLn2 = std::numbers::ln2;
}

double season_threshold_T1(double c) {
    if (!(c > 0.0)) throw NonPositive("c");
    const double h = c - 1.0;
    if (std::abs(h) < 1e-7) {
        // ln(c+1) + (c-2) ln 2 vanishes at c = 1; expanding about c = 1
        // gives T1 = 1/2 + ln 2 - h/8 + O(h^2).
        return 0.5 + kLn2 - h / 8.0;
    }
    return (std::log(c + 1.0) + (c - 2.0) * kLn2) / h;
}

ResidentPolicy::ResidentPolicy(double c, double T) : c_(c), T_(T) {
    if (!(c > 0.0)) throw NonPositive("c");
    if (!(T > 0.0)) throw NonPositive("T");
    T1_ = season_threshold_T1(c);
}

double ResidentPolicy::switching_curve(double tau) const {
    if (!(tau >= 0.0 && tau <= T_)) throw TauOutOfSeason();
    return -std::expm1(-tau);
}

double ResidentPolicy::singular_arc_tau(double x) const {
    if (!(x > 0.0 && x <= 0.5)) throw XOutOfRange("singular arc requires 0 < x <= 1/2");
    return -std::log(x) + 2.0 / (x * c_) - 4.0 / c_;
}

double ResidentPolicy::singular_arc_x(double tau) const {
    if (!(tau >= kLn2 - 1e-12)) throw TauOutOfSeason();
    if (tau <= kLn2) return 0.5;
    // tau(x) is strictly decreasing; 2/(c x_lo) alone already exceeds tau
    const double x_lo = 2.0 / (c_ * tau + c_ + 4.0);
    return find_root([&](double x) { return singular_arc_tau(x) - tau; }, x_lo, 0.5);
}

double ResidentPolicy::singular_control(double x) const {
    if (!(x > 0.0 && x <= 0.5)) throw XOutOfRange("singular control requires 0 < x <= 1/2");
    return 2.0 * x / (2.0 + x * c_);
}

double ResidentPolicy::boundary_x(double tau) const {
    return tau <= kLn2 ? -std::expm1(-tau) : singular_arc_x(tau);
}

bool ResidentPolicy::on_singular_arc(double x, double tau) const {
    if (!(tau >= kLn2 && x > 0.0 && x <= 0.5 + kOnSurfaceTol)) return false;
    const double xa = std::min(x, 0.5);
    const double resid = std::abs(tau - singular_arc_tau(xa));
    if (resid < kOnSurfaceTol) return true;
    const double slope = 1.0 / xa + 2.0 / (xa * xa * c_);  // |dtau_arc/dx|
    return resid < kOnSurfaceTol * slope;
}

double ResidentPolicy::control(double x, double tau) const {
    if (tau <= 0.0) return 0.0;
    if (on_singular_arc(x, tau)) return singular_control(std::min(x, 0.5));
    const double b = boundary_x(tau);
    if (tau <= kLn2 && std::abs(x - b) < kOnSurfaceTol) return 0.0;  // entering u = 0
    return x < b ? 1.0 : 0.0;
}

}  // namespace seasonal
