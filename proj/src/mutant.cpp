#include "seasonal/mutant.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "seasonal/numerics.hpp"

namespace seasonal {

namespace {
constexpr double kLn2 = std::numbers::ln2;
constexpr double kTol = ResidentPolicy::kOnSurfaceTol;  // analytic surfaces
constexpr double kCacheTol = 1e-7;                      // numerically swept surfaces

// Geometry of the u_m = 0 / singular fields restricted to S_r^sigma.
// Everything is parametrized by x = x_r riding the arc, where
//   tau(x)   = -ln x + 2/(x c) - 4/c,
//   A(x)     = 1 + (1-eps) x c,     G(x) = 2 + x c,
//   w0(x)    = effective depletion rate c[(1-eps) u_r_hat + eps u_m] at u_m = 0,
//   r(x)     = A'/A along the arc (backward time).
struct SurfGeom {
    double c, eps;

    double tau(double x) const { return -std::log(x) + 2.0 / (x * c) - 4.0 / c; }
    double dtau_dx(double x) const { return -(1.0 / x + 2.0 / (x * x * c)); }
    double lambda0(double x) const { return -std::expm1(-tau(x)); }  // 1 - e^{-tau}
    double A(double x) const { return 1.0 + (1.0 - eps) * x * c; }
    double G(double x) const { return 2.0 + x * c; }
    double w0(double x) const {
        return 2.0 * (1.0 - eps) * c * x * (1.0 + x * c) / (A(x) * G(x));
    }
    double r(double x) const { return -(1.0 - eps) * c * c * x * x / (G(x) * A(x)); }

    double w0_prime(double x) const {
        const double k1 = (1.0 - eps) * c;
        const double N = 2.0 * k1 * (x + c * x * x), Np = 2.0 * k1 * (1.0 + 2.0 * c * x);
        const double D = A(x) * G(x), Dp = k1 * G(x) + c * A(x);
        return (Np * D - N * Dp) / (D * D);
    }
    double r_prime(double x) const {
        const double k1 = (1.0 - eps) * c;
        const double D = A(x) * G(x), Dp = k1 * G(x) + c * A(x);
        return -k1 * c * (2.0 * x * D - x * x * Dp) / (D * D);
    }

    // switching function of the mutant on the surface,
    //   A_hat = lambda - x_m + eps c (lambda x_m - U)/A
    double am(double x, double x_m, double lambda, double U) const {
        return lambda - x_m + eps * c * (lambda * x_m - U) / A(x);
    }

    // A_hat' restricted to A_hat = 0; independent of u_m there
    double am_prime_on(double x, double x_m, double lambda) const {
        return 1.0 - x_m - lambda * (1.0 - w0(x)) - (x_m - lambda) * r(x);
    }

    // singular control from A_hat'' = 0 (affine in u_m)
    double singular_um(double x, double x_m, double lambda) const {
        const double Exm = -1.0 - r(x);
        const double El = -(1.0 - w0(x)) + r(x);
        const double Ex = lambda * w0_prime(x) - (x_m - lambda) * r_prime(x);
        const double K0 = Ex * (-x * x * c / G(x)) + Exm * x_m * (1.0 - w0(x)) +
                          El * (1.0 - lambda);
        const double K1 = -Exm * (1.0 + x_m * eps * c / A(x)) - El;
        return -K0 / K1;
    }
};

struct CrossPoint {
    double x, x_m, lambda, U;
};
}  // namespace

std::optional<double> s1_arc_tau(double x_m, double eps, double c) {
    if (!(x_m > 0.0 && x_m <= 0.5))
        throw XOutOfRange("S_1^sigma requires 0 < x_m <= 1/2");
    if (eps == 0.0) return std::nullopt;  // hyperplane x_m = 1/2, all tau >= ln 2
    return -std::log(x_m) + 2.0 / (x_m * eps * c) - 4.0 / (eps * c);
}

double s1_singular_control(double x_m, double eps, double c) {
    if (!(x_m > 0.0 && x_m <= 0.5))
        throw XOutOfRange("S_1^sigma control requires 0 < x_m <= 1/2");
    return 2.0 * x_m / (2.0 + x_m * eps * c);
}

double sliding_equivalent_control(double x_r, double u_m, double eps, double c) {
    const double A = 1.0 + (1.0 - eps) * x_r * c;
    return 2.0 * x_r * (1.0 + x_r * c) / (A * (2.0 + x_r * c)) -
           x_r * eps * c * u_m / A;
}

double sliding_resident_control(double x_r, double u_m, double eps, double c) {
    if (!(eps < 1.0 / c)) throw EpsBoundViolated(eps, c);
    if (!(x_r > 0.0 && x_r <= 0.5))
        throw XOutOfRange("sliding control requires 0 < x_r <= 1/2");
    return sliding_equivalent_control(x_r, u_m, eps, c);
}

double hat_arc_xm(double x_r, double c) {
    if (!(x_r > 0.0 && x_r <= 0.5))
        throw XOutOfRange("S_hat^sigma requires 0 < x_r <= 1/2");
    return 0.25 * (2.0 + x_r * c);
}

double hat_singular_control(double x_r, double c) {
    if (!(x_r > 0.0 && x_r <= 0.5))
        throw XOutOfRange("S_hat^sigma control requires 0 < x_r <= 1/2");
    return 1.0 / (2.0 + x_r * c);
}

std::optional<double> s2_singular_control(double x_m, double eps, double c) {
    if (1.0 - c * (1.0 - eps) < 0.0) return std::nullopt;  // surface existence
    const double den = 2.0 - (1.0 - eps) * c + x_m * eps * c;
    if (den < 1e-12) return std::nullopt;  // Kelley condition
    const double u = (2.0 * x_m - (1.0 - eps) * c * (1.0 + x_m)) / den;
    if (u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;  // control range
    return std::clamp(u, 0.0, 1.0);
}

std::optional<S2Tangency> s2_tangency_point(double eps, double c) {
    const double q = c * (1.0 - eps);
    if (!(q < 1.0)) return std::nullopt;  // degenerate at q = 1 (x_m -> 1, tau -> inf)
    const double x = 1.0 / (2.0 - q);
    if (!(x > 0.0 && x < 1.0)) return std::nullopt;
    return S2Tangency{x, -std::log1p(-x)};
}

HatJunction hat_junction_eps0(double c) {
    // tau restrictions give e^{-tau} = (2 - x c)/4 on the junction, hence
    // solve tau_arc(x) = ln(4/(2 - x c)) for x.
    auto resid = [c](double x) {
        return -std::log(x) + 2.0 / (x * c) - 4.0 / c - std::log(4.0 / (2.0 - x * c));
    };
    double hi = std::min(0.5, 2.0 / c * (1.0 - 1e-9));
    double lo = 0.5 * hi;
    while (resid(lo) <= 0.0) {
        lo *= 0.5;
        if (lo < 1e-12) throw RootNotBracketed(lo, hi, resid(lo), resid(hi));
    }
    const double x = find_root(resid, lo, hi);
    const double x_m = 0.25 * (2.0 + x * c);
    return {x, x_m, std::log(4.0 / (2.0 - x * c))};
}

// ---- MutantPolicy ------------------------------------------------------

MutantPolicy::MutantPolicy(const ModelParams& p) : p_(validate(p)), resident_(p_.c, p_.T) {
    if (!p_.hierarchical_admissible) throw EpsBoundViolated(p_.eps, p_.c);
    cache_x_min_ = resident_.singular_arc_x(p_.T + 2.0);
    if (p_.eps == 0.0) {
        junction_x_ = hat_junction_eps0(p_.c).x_r;
    } else {
        build_hat_curves();
    }
    build_s2_curve();
}

double MutantPolicy::switching_surface_Sm(double tau) const {
    if (!(tau >= 0.0 && tau <= p_.T)) throw TauOutOfSeason();
    return -std::expm1(-tau);
}

namespace {

// one RK4 step of the u_m = 0 characteristic field on the surface,
// state (x_m, U), independent variable x (descending)
void char_rhs(const SurfGeom& g, double x, const std::array<double, 2>& y,
              std::array<double, 2>& dy) {
    const double gx = g.dtau_dx(x);
    dy[0] = y[0] * (1.0 - g.w0(x)) * gx;
    dy[1] = (-y[1] * g.w0(x) + y[0]) * gx;
}

void char_step(const SurfGeom& g, double& x, std::array<double, 2>& y, double h) {
    std::array<double, 2> k1, k2, k3, k4, t;
    char_rhs(g, x, y, k1);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + 0.5 * h * k1[i];
    char_rhs(g, x + 0.5 * h, t, k2);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + 0.5 * h * k2[i];
    char_rhs(g, x + 0.5 * h, t, k3);
    for (int i = 0; i < 2; ++i) t[i] = y[i] + h * k3[i];
    char_rhs(g, x + h, t, k4);
    for (int i = 0; i < 2; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    x += h;
}

// first zero of A_hat along the characteristic started at x = 1/2 with
// x_m(ln 2) = s, scanned down to x_min
std::optional<CrossPoint> find_crossing(const SurfGeom& g, double s, double x_min,
                                        int steps = 4000) {
    double x = 0.5;
    std::array<double, 2> y{s, 0.5 * s};  // continuation value U = x_m (1 - e^{-ln 2})
    double a_prev = g.am(x, y[0], g.lambda0(x), y[1]);
    const double h = (x_min - 0.5) / steps;  // negative
    for (int i = 0; i < steps; ++i) {
        const double x_prev = x;
        const std::array<double, 2> y_prev = y;
        char_step(g, x, y, h);
        const double a = g.am(x, y[0], g.lambda0(x), y[1]);
        if (a_prev < 0.0 && a >= 0.0) {
            // refine inside [x, x_prev] by bisecting the substep length
            double lo = 0.0, hi = -h;  // step size taken downward from x_prev
            std::array<double, 2> yc = y;
            double xc = x;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                double xm_ = x_prev;
                std::array<double, 2> ym_ = y_prev;
                char_step(g, xm_, ym_, -mid);
                if (g.am(xm_, ym_[0], g.lambda0(xm_), ym_[1]) < 0.0)
                    lo = mid;
                else {
                    hi = mid;
                    xc = xm_;
                    yc = ym_;
                }
            }
            return CrossPoint{xc, yc[0], g.lambda0(xc), yc[1]};
        }
        a_prev = a;
    }
    return std::nullopt;
}

}  // namespace

void MutantPolicy::build_hat_curves() {
    const SurfGeom g{p_.c, p_.eps};
    const double x_min = cache_x_min_;

    // family parameter: s = x_m at the arc end (x_r = 1/2, tau = ln 2)
    double s_lo = 0.5 * (1.0 + 1e-9);
    double s_hi = 0.6;
    while (find_crossing(g, s_hi, x_min)) {
        s_lo = s_hi;
        s_hi *= 1.5;
        if (s_hi > 64.0) break;
    }
    if (s_hi <= 64.0) {
        for (int it = 0; it < 64; ++it) {
            const double mid = 0.5 * (s_lo + s_hi);
            if (find_crossing(g, mid, x_min))
                s_lo = mid;
            else
                s_hi = mid;
        }
    }
    const double s_B = s_lo;

    // S_hat polyline: crossings for a family packed toward the tangency
    const int K = 160;
    std::vector<CurvePoint> pts;
    pts.push_back({0.5, 0.5, 0.5, 0.0});
    for (int i = 1; i <= K; ++i) {
        const double f = static_cast<double>(i) / (K + 1);
        const double s = 0.5 + (s_B - 0.5) * std::pow(f, 0.6);
        if (auto cp = find_crossing(g, s, x_min))
            pts.push_back({cp->x, cp->x_m, cp->lambda, 0.0});
    }
    auto tangent = find_crossing(g, s_B, x_min);
    if (!tangent) tangent = find_crossing(g, s_B * (1.0 - 1e-9), x_min);
    if (tangent) {
        junction_x_ = tangent->x;
        pts.push_back({tangent->x, tangent->x_m, tangent->lambda, 0.0});
    } else {
        junction_x_ = x_min;  // no tangency found within the window
    }
    std::sort(pts.begin(), pts.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.x_r < b.x_r; });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const CurvePoint& a, const CurvePoint& b) {
                              return std::abs(a.x_r - b.x_r) < 1e-12;
                          }),
              pts.end());
    hat_switch_ = std::move(pts);

    // S_hat^sigma: integrate the singular field down from the tangency point
    if (!tangent) return;
    double x = tangent->x;
    std::array<double, 3> y{tangent->x_m, tangent->lambda, tangent->U};  // (x_m, lambda, U)
    const int M = 4000;
    const double h = (x_min - x) / M;
    hat_arc_.clear();
    hat_arc_.push_back({x, y[0], y[1], g.singular_um(x, y[0], y[1])});
    auto rhs = [&g](double xx, const std::array<double, 3>& yy, std::array<double, 3>& dd) {
        double u = g.singular_um(xx, yy[0], yy[1]);
        u = std::clamp(u, 0.0, 1.0);
        const double gx = g.dtau_dx(xx);
        dd[0] = (yy[0] * (1.0 - g.w0(xx)) - u * (1.0 + yy[0] * g.eps * g.c / g.A(xx))) * gx;
        dd[1] = (-yy[1] + 1.0 - u) * gx;
        dd[2] = (-yy[2] * (g.w0(xx) + g.eps * g.c * u / g.A(xx)) + yy[0] * (1.0 - u)) * gx;
    };
    for (int i = 0; i < M; ++i) {
        std::array<double, 3> k1, k2, k3, k4, t;
        rhs(x, y, k1);
        for (int j = 0; j < 3; ++j) t[j] = y[j] + 0.5 * h * k1[j];
        rhs(x + 0.5 * h, t, k2);
        for (int j = 0; j < 3; ++j) t[j] = y[j] + 0.5 * h * k2[j];
        rhs(x + 0.5 * h, t, k3);
        for (int j = 0; j < 3; ++j) t[j] = y[j] + h * k3[j];
        rhs(x + h, t, k4);
        for (int j = 0; j < 3; ++j)
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        x += h;
        const double u = g.singular_um(x, y[0], y[1]);
        if (!(u > -0.05 && u < 1.05)) break;  // left the admissible window
        hat_arc_.push_back({x, y[0], y[1], std::clamp(u, 0.0, 1.0)});
    }
    std::reverse(hat_arc_.begin(), hat_arc_.end());  // ascending x_r
}

void MutantPolicy::build_s2_curve() {
    const auto tan = s2_tangency_point(p_.eps, p_.c);
    if (!tan) return;
    s2_tau_min_ = tan->tau;
    if (tan->tau >= p_.T) return;  // emitted beyond the season horizon
    const double c = p_.c, eps = p_.eps;
    if (eps == 0.0) {
        // constant line x_m = 1/(2 - c) with u_m = (1-c)/(2-c)
        const auto u = s2_singular_control(tan->x_m, eps, c);
        if (!u) return;
        s2_curve_.push_back({tan->tau, tan->x_m, *u});
        s2_curve_.push_back({p_.T, tan->x_m, *u});
        return;
    }
    // integrate the singular dynamics backward from the tangency point
    double tau = tan->tau, x_m = tan->x_m;
    const int M = 4000;
    const double h = (p_.T - tan->tau) / M;
    auto rhs = [&](double xm) {
        const auto u = s2_singular_control(xm, eps, c);
        if (!u) return std::pair{0.0, false};
        return std::pair{xm * (1.0 - c * ((1.0 - eps) + eps * *u)) - *u, true};
    };
    const auto u0 = s2_singular_control(x_m, eps, c);
    if (!u0) return;
    s2_curve_.push_back({tau, x_m, *u0});
    for (int i = 0; i < M; ++i) {
        auto [k1, ok1] = rhs(x_m);
        auto [k2, ok2] = rhs(x_m + 0.5 * h * k1);
        auto [k3, ok3] = rhs(x_m + 0.5 * h * k2);
        auto [k4, ok4] = rhs(x_m + h * k3);
        if (!(ok1 && ok2 && ok3 && ok4)) break;
        x_m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tau += h;
        const auto u = s2_singular_control(x_m, eps, c);
        if (!u) break;
        s2_curve_.push_back({tau, x_m, *u});
    }
}

double MutantPolicy::hat_switch_xm(double x_r) const {
    if (p_.eps == 0.0) {
        const double xr = std::clamp(x_r, cache_x_min_, 0.5);
        return -std::expm1(-resident_.singular_arc_tau(xr));  // S_m on the surface
    }
    const auto& v = hat_switch_;
    if (v.empty()) return 0.5;
    if (x_r <= v.front().x_r) return v.front().x_m;
    if (x_r >= v.back().x_r) return v.back().x_m;
    auto it = std::lower_bound(v.begin(), v.end(), x_r,
                               [](const CurvePoint& p, double x) { return p.x_r < x; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double f = (x_r - a.x_r) / (b.x_r - a.x_r);
    return a.x_m + f * (b.x_m - a.x_m);
}

double MutantPolicy::hat_arc_xm_at(double x_r) const {
    if (p_.eps == 0.0) return hat_arc_xm(std::clamp(x_r, cache_x_min_, 0.5), p_.c);
    const auto& v = hat_arc_;
    if (v.empty()) return hat_arc_xm(std::clamp(x_r, cache_x_min_, 0.5), p_.c);
    if (x_r <= v.front().x_r) return v.front().x_m;
    if (x_r >= v.back().x_r) return v.back().x_m;
    auto it = std::lower_bound(v.begin(), v.end(), x_r,
                               [](const CurvePoint& p, double x) { return p.x_r < x; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double f = (x_r - a.x_r) / (b.x_r - a.x_r);
    return a.x_m + f * (b.x_m - a.x_m);
}

double MutantPolicy::hat_arc_um(double x_r) const {
    if (p_.eps == 0.0) return hat_singular_control(std::clamp(x_r, cache_x_min_, 0.5), p_.c);
    const auto& v = hat_arc_;
    if (v.empty()) return hat_singular_control(std::clamp(x_r, cache_x_min_, 0.5), p_.c);
    if (x_r <= v.front().x_r) return v.front().u_m;
    if (x_r >= v.back().x_r) return v.back().u_m;
    auto it = std::lower_bound(v.begin(), v.end(), x_r,
                               [](const CurvePoint& p, double x) { return p.x_r < x; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double f = (x_r - a.x_r) / (b.x_r - a.x_r);
    return a.u_m + f * (b.u_m - a.u_m);
}

double MutantPolicy::s1_boundary_xm(double tau) const {
    if (p_.eps == 0.0) return 0.5;
    if (tau <= kLn2) return 0.5;
    const double ec = p_.eps * p_.c;
    const double x_lo = 2.0 / (ec * tau + ec + 4.0);
    auto resid = [&](double x) { return *s1_arc_tau(x, p_.eps, p_.c) - tau; };
    return find_root(resid, x_lo, 0.5);
}

double MutantPolicy::feed_side_boundary(double tau) const {
    double b = -std::expm1(-tau);
    if (!s2_curve_.empty() && tau >= s2_tau_min_) {
        const auto& v = s2_curve_;
        double xs2;
        if (tau <= v.front().tau)
            xs2 = v.front().x_m;
        else if (tau >= v.back().tau)
            xs2 = v.back().x_m;
        else {
            auto it = std::lower_bound(v.begin(), v.end(), tau,
                                       [](const S2Point& p, double t) { return p.tau < t; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double f = (tau - lo.tau) / (hi.tau - lo.tau);
            xs2 = lo.x_m + f * (hi.x_m - lo.x_m);
        }
        b = std::min(b, xs2);
    }
    return b;
}

double MutantPolicy::repro_side_boundary(double tau) const {
    return tau <= kLn2 ? -std::expm1(-tau) : s1_boundary_xm(tau);
}

double MutantPolicy::hat_boundary_xm(double x_r) const {
    return x_r >= junction_x_ ? hat_switch_xm(x_r) : hat_arc_xm_at(x_r);
}

PolicyDecision MutantPolicy::decide(const ReducedState& s) const {
    const double c = p_.c, eps = p_.eps;
    if (s.tau <= 1e-12 * std::max(1.0, p_.T)) return {Regime::terminal, 0, {0.0, 0.0}};

    // resident sliding surface first
    if (resident_.on_singular_arc(s.x_r, s.tau)) {
        const double xr = std::min(s.x_r, 0.5);
        {
            const double arc_tol = eps == 0.0 ? kTol : kCacheTol;
            if (xr <= junction_x_ + arc_tol &&
                std::abs(s.x_m - hat_arc_xm_at(xr)) < arc_tol) {
                const double um = hat_arc_um(xr);
                return {Regime::double_slide, 0,
                        {sliding_equivalent_control(xr, um, eps, c), um}};
            }
            const double b = hat_boundary_xm(xr);
            const double um = (b - s.x_m > arc_tol) ? 1.0 : 0.0;
            return {Regime::resident_slide, um > 0.5 ? 1 : 0,
                    {sliding_equivalent_control(xr, um, eps, c), um}};
        }
    }

    const double ur = resident_.control(s.x_r, s.tau);
    if (ur >= 0.5) {
        // resident feeding region: S_m, shielded by S_2^sigma where present
        if (!s2_curve_.empty() && s.tau >= s2_tau_min_ - kTol) {
            const double tol = eps == 0.0 ? kTol : kCacheTol;
            const double b_only_s2 = feed_side_boundary(s.tau);
            if (std::abs(s.x_m - b_only_s2) < tol && b_only_s2 < -std::expm1(-s.tau) - tol) {
                if (auto u = s2_singular_control(s.x_m, eps, c))
                    return {Regime::s2_slide, 0, {1.0, *u}};
            }
        }
        const double b = feed_side_boundary(s.tau);
        const double um = (b - s.x_m > kTol) ? 1.0 : 0.0;
        return {Regime::bang, 2 + (um > 0.5 ? 1 : 0), {1.0, um}};
    }

    // resident reproduction region: S_m below ln 2, S_1^sigma above
    if (s.tau > kLn2 && s.x_m > 0.0 && s.x_m <= 0.5 + kTol) {
        const double xm = std::min(s.x_m, 0.5);
        bool on_arc = false;
        if (eps == 0.0) {
            on_arc = std::abs(s.x_m - 0.5) < kTol;
        } else {
            const double resid = std::abs(s.tau - *s1_arc_tau(xm, eps, c));
            const double slope = 1.0 / xm + 2.0 / (xm * xm * eps * c);
            on_arc = resid < kTol || resid < kTol * slope;
        }
        if (on_arc) return {Regime::s1_slide, 0, {0.0, s1_singular_control(xm, eps, c)}};
    }
    const double b = repro_side_boundary(s.tau);
    const double um = (b - s.x_m > kTol) ? 1.0 : 0.0;
    return {Regime::bang, um > 0.5 ? 1 : 0, {0.0, um}};
}

ControlPair MutantPolicy::segment_controls(const PolicyDecision& d, const ReducedState& s) const {
    const double c = p_.c, eps = p_.eps;
    switch (d.regime) {
        case Regime::resident_slide: {
            const double xr = std::clamp(s.x_r, cache_x_min_, 0.5);
            const double um = d.branch == 1 ? 1.0 : 0.0;
            return {sliding_equivalent_control(xr, um, eps, c), um};
        }
        case Regime::double_slide: {
            const double xr = std::clamp(s.x_r, cache_x_min_, 0.5);
            const double um = hat_arc_um(xr);
            return {sliding_equivalent_control(xr, um, eps, c), um};
        }
        case Regime::s1_slide: {
            const double xm = std::clamp(s.x_m, 1e-12, 0.5);
            return {0.0, s1_singular_control(xm, eps, c)};
        }
        case Regime::s2_slide: {
            const auto u = s2_singular_control(s.x_m, eps, c);
            return {1.0, u ? *u : 0.0};
        }
        default:
            return d.u;
    }
}

std::vector<FeedbackPolicy::Guard> MutantPolicy::guards(const PolicyDecision& d,
                                                        const ReducedState&) const {
    std::vector<Guard> gs;
    const ResidentPolicy* rp = &resident_;
    auto resident_boundary = [rp](const ReducedState& s) {
        return s.x_r - rp->boundary_x(std::max(s.tau, 1e-300));
    };
    auto refine_resident = [](const ReducedState& s) {
        return s.tau > kLn2 ? SurfaceId::S_r_sigma : SurfaceId::S_r;
    };

    switch (d.regime) {
        case Regime::bang: {
            gs.push_back({SurfaceId::S_r, resident_boundary, refine_resident});
            if (d.branch >= 2) {
                // feeding side: S_m possibly shielded by S_2^sigma
                gs.push_back({SurfaceId::S_m,
                              [this](const ReducedState& s) {
                                  return s.x_m - feed_side_boundary(std::max(s.tau, 0.0));
                              },
                              [this](const ReducedState& s) {
                                  const double sm = -std::expm1(-s.tau);
                                  return feed_side_boundary(s.tau) < sm - 1e-12
                                             ? SurfaceId::S2_sigma
                                             : SurfaceId::S_m;
                              }});
            } else {
                gs.push_back({SurfaceId::S_m,
                              [this](const ReducedState& s) {
                                  return s.x_m - repro_side_boundary(std::max(s.tau, 1e-12));
                              },
                              [](const ReducedState& s) {
                                  return s.tau > kLn2 ? SurfaceId::S1_sigma : SurfaceId::S_m;
                              }});
            }
            break;
        }
        case Regime::resident_slide: {
            gs.push_back(
                {SurfaceId::S_r, [](const ReducedState& s) { return s.tau - kLn2; }, {}});
            gs.push_back({SurfaceId::S_hat,
                          [this](const ReducedState& s) {
                              return s.x_m - hat_boundary_xm(std::clamp(s.x_r, 1e-12, 0.5));
                          },
                          [this](const ReducedState& s) {
                              return s.x_r < junction_x_ ? SurfaceId::S_hat_sigma
                                                         : SurfaceId::S_hat;
                          }});
            break;
        }
        case Regime::double_slide: {
            gs.push_back({SurfaceId::S_hat,
                          [this](const ReducedState& s) { return s.x_r - junction_x_; },
                          {}});
            gs.push_back(
                {SurfaceId::S_r, [](const ReducedState& s) { return s.tau - kLn2; }, {}});
            break;
        }
        case Regime::s1_slide: {
            gs.push_back(
                {SurfaceId::S_m, [](const ReducedState& s) { return s.tau - kLn2; }, {}});
            break;
        }
        case Regime::s2_slide: {
            gs.push_back({SurfaceId::S_m,
                          [this](const ReducedState& s) { return s.tau - s2_tau_min_; },
                          {}});
            break;
        }
        default:
            break;
    }
    return gs;
}

}  // namespace seasonal
