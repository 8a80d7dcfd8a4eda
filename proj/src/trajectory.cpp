#include "seasonal/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "seasonal/csv.hpp"
#include "seasonal/numerics.hpp"

namespace seasonal {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr int kDim = 6;  // p_r, p_m, n, I_r, I_m, I_n
using Vec = std::array<double, kDim>;

// Dormand-Prince 5(4) coefficients
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = B1 - 5179.0 / 57600, E3 = B3 - 7571.0 / 16695, E4 = B4 - 393.0 / 640,
                 E5 = B5 + 92097.0 / 339200, E6 = B6 - 187.0 / 2100, E7 = -1.0 / 40;

ReducedState to_reduced(double t, const Vec& y, double T) {
    return {y[0] / y[2], y[1] / y[2], T - t};
}

// Right-hand side with the regime held fixed. Sliding regimes replace the
// slaved coordinate's derivative by the invariant arc field lifted to full
// state (p = x n  =>  dp = n dx + x dn), which keeps the arc residual at
// integrator precision instead of accumulating drift.
struct SegmentField {
    const ModelParams* P;
    const FeedbackPolicy* pol;
    PolicyDecision seg;
    bool reduced_sliding;

    void operator()(double t, const Vec& y, Vec& dy) const {
        const double c = P->c, eps = P->eps;
        const ReducedState rs = to_reduced(t, y, P->T);
        const ControlPair u = pol->segment_controls(seg, rs);
        const double w = c * ((1.0 - eps) * u.u_r + eps * u.u_m);
        dy[2] = -y[2] * w;

        const bool ride_r = reduced_sliding && (seg.regime == Regime::resident_slide ||
                                                seg.regime == Regime::double_slide);
        if (ride_r) {
            const double xr = rs.x_r;
            const double xr_dot = xr * xr * c / (2.0 + xr * c);
            dy[0] = y[2] * xr_dot + xr * dy[2];
        } else {
            dy[0] = -y[0] + y[2] * u.u_r;
        }

        if (reduced_sliding && seg.regime == Regime::double_slide && eps == 0.0) {
            // x_m = (2 + x_r c)/4 along the arc
            const double xr = rs.x_r;
            const double xm_dot = 0.25 * c * xr * xr * c / (2.0 + xr * c);
            dy[1] = y[2] * xm_dot + rs.x_m * dy[2];
        } else if (reduced_sliding && seg.regime == Regime::s1_slide) {
            const double xm = rs.x_m;
            const double xm_dot = eps > 0.0 ? xm * xm * eps * c / (2.0 + xm * eps * c) : 0.0;
            dy[1] = y[2] * xm_dot + xm * dy[2];
        } else if (ride_r && seg.branch == 2) {
            // mimicry: x_m rides the resident arc as well
            const double xm = rs.x_m;
            const double xm_dot = xm * xm * c / (2.0 + xm * c);
            dy[1] = y[2] * xm_dot + xm * dy[2];
        } else {
            dy[1] = -y[1] + y[2] * u.u_m;
        }

        dy[3] = (1.0 - u.u_r) * y[0];
        dy[4] = (1.0 - u.u_m) * y[1];
        dy[5] = y[2];
    }
};

struct StepAttempt {
    Vec y;
    double err;  // normalized error estimate
};

StepAttempt rk_step(const SegmentField& f, double t, const Vec& y, double h, double rtol,
                    double atol) {
    Vec k1, k2, k3, k4, k5, k6, k7, tmp, out;
    f(t, y, k1);
    for (int i = 0; i < kDim; ++i) tmp[i] = y[i] + h * A21 * k1[i];
    f(t + h / 5.0, tmp, k2);
    for (int i = 0; i < kDim; ++i) tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    f(t + 3.0 * h / 10.0, tmp, k3);
    for (int i = 0; i < kDim; ++i) tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    f(t + 4.0 * h / 5.0, tmp, k4);
    for (int i = 0; i < kDim; ++i)
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    f(t + 8.0 * h / 9.0, tmp, k5);
    for (int i = 0; i < kDim; ++i)
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    f(t + h, tmp, k6);
    for (int i = 0; i < kDim; ++i)
        out[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    f(t + h, out, k7);
    double err = 0.0;
    for (int i = 0; i < kDim; ++i) {
        const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                              E7 * k7[i]);
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(out[i]));
        err += (e / sc) * (e / sc);
    }
    return {out, std::sqrt(err / kDim)};
}

// 5th-order state at an interior time of an accepted step, by re-stepping.
Vec state_at(const SegmentField& f, double t0, const Vec& y0, double t, double rtol,
             double atol) {
    if (t <= t0) return y0;
    return rk_step(f, t0, y0, t - t0, rtol, atol).y;
}

}  // namespace

const char* surface_name(SurfaceId id) {
    switch (id) {
        case SurfaceId::S_r: return "S_r";
        case SurfaceId::S_r_sigma: return "S_r_sigma";
        case SurfaceId::S_m: return "S_m";
        case SurfaceId::S1_sigma: return "S1_sigma";
        case SurfaceId::S_hat: return "S_hat";
        case SurfaceId::S_hat_sigma: return "S_hat_sigma";
        case SurfaceId::S2_sigma: return "S2_sigma";
    }
    return "?";
}

MimicPolicy::MimicPolicy(const ModelParams& p) : p_(validate(p)), resident_(p_.c, p_.T) {}

PolicyDecision MimicPolicy::decide(const ReducedState& s) const {
    if (s.tau <= 1e-12 * std::max(1.0, p_.T)) return {Regime::terminal, 0, {0.0, 0.0}};
    const double ur = resident_.control(s.x_r, s.tau);
    if (ur > 0.0 && ur < 1.0) return {Regime::resident_slide, 2, {ur, ur}};
    return {Regime::bang, ur > 0.5 ? 1 : 0, {ur, ur}};
}

ControlPair MimicPolicy::segment_controls(const PolicyDecision& d, const ReducedState& s) const {
    if (d.regime == Regime::resident_slide) {
        const double u = resident_.singular_control(std::clamp(s.x_r, 1e-300, 0.5));
        return {u, u};
    }
    return d.u;
}

std::vector<FeedbackPolicy::Guard> MimicPolicy::guards(const PolicyDecision& d,
                                                       const ReducedState&) const {
    std::vector<Guard> gs;
    if (d.regime == Regime::resident_slide) {
        gs.push_back(
            {SurfaceId::S_r, [](const ReducedState& s) { return s.tau - kLn2; }, {}});
    } else if (d.regime == Regime::bang) {
        const ResidentPolicy* rp = &resident_;
        gs.push_back({SurfaceId::S_r,
                      [rp](const ReducedState& s) {
                          return s.x_r - rp->boundary_x(std::max(s.tau, 0.0));
                      },
                      [](const ReducedState& s) {
                          return s.tau > kLn2 ? SurfaceId::S_r_sigma : SurfaceId::S_r;
                      }});
    }
    return gs;
}

double locate_event(const std::function<double(double)>& residual, double lo, double hi,
                    double scale) {
    double flo = residual(lo), fhi = residual(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw NoSignChange("switching residual does not change sign over the bracket");
    RootOptions opt;
    opt.xtol = 1e-15 * std::max({std::abs(lo), std::abs(hi), 1.0});
    opt.ftol = 1e-10 * scale;
    opt.max_iter = 500;
    return find_root(residual, lo, hi, opt);
}

namespace {

SeasonOutcome run_season(const ModelParams& params, const FeedbackPolicy& policy,
                         const FullState& init, const IntegrateOptions& opt) {
    const ModelParams P = validate(params);
    const double T = P.T;  // season horizon, fixed for the feedback
    const double t_end = opt.t_stop > 0.0 ? std::min(opt.t_stop, T) : T;
    if (!(init.n > kResourceFloor)) throw ZeroResource();
    if (!(init.t >= 0.0 && init.t < t_end)) throw TauOutOfSeason();

    Vec y{init.p_r, init.p_m, init.n, 0.0, 0.0, 0.0};
    double t = init.t;
    const double n0 = init.n;
    // absolute tolerance in units of the problem scale keeps the error
    // control covariant under the model's degree-one homogeneity
    const double rtol = opt.rtol;
    const double atol = opt.atol * std::max(n0, 1e-6);

    SeasonOutcome out;
    auto record = [&](double tt, const Vec& yy) {
        if (!opt.record_samples) return;
        const ReducedState rs = to_reduced(tt, yy, T);
        PolicyDecision d = policy.decide(rs);
        out.samples.push_back({tt, FullState{yy[0], yy[1], yy[2], tt},
                               policy.segment_controls(d, rs)});
    };

    PolicyDecision seg = policy.decide(to_reduced(t, y, T));
    SegmentField field{&P, &policy, seg, opt.reduced_sliding};
    auto gset = policy.guards(seg, to_reduced(t, y, T));
    record(t, y);

    double h = std::min(1e-3 * T, t_end - t);
    const double h_floor = 1e-15 * std::max(1.0, T);
    long steps = 0;
    int stall = 0;

    while (t < t_end - 1e-14 * std::max(1.0, T)) {
        if (++steps > opt.max_steps)
            throw EventLocalizationFailure("step budget exhausted; policy may be chattering");
        h = std::min(h, t_end - t);
        StepAttempt att = rk_step(field, t, y, h, rtol, atol);
        if (att.err > 1.0) {
            h *= std::clamp(0.9 * std::pow(att.err, -0.2), 0.1, 0.5);
            if (h < h_floor) throw StepUnderflow("adaptive step size underflow");
            continue;
        }
        const double t1 = t + h;
        const double h_next =
            h * std::clamp(0.9 * std::pow(std::max(att.err, 1e-10), -0.2), 1.0, 5.0);

        // earliest guard crossing inside (t, t1]
        int hit = -1;
        double t_star = t1;
        const ReducedState r0 = to_reduced(t, y, T);
        const ReducedState r1 = to_reduced(t1, att.y, T);
        for (size_t gi = 0; gi < gset.size(); ++gi) {
            const double a = gset[gi].residual(r0);
            const double b = gset[gi].residual(r1);
            if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b)) continue;
            if (std::signbit(a) == std::signbit(b)) continue;
            auto phi = [&](double tt) {
                const Vec ys = state_at(field, t, y, tt, rtol, atol);
                return gset[gi].residual(to_reduced(tt, ys, T));
            };
            RootOptions ro;
            ro.xtol = 1e-14 * std::max(1.0, T);
            ro.max_iter = 200;
            const double tc = find_root(phi, t, t1, ro);
            if (tc < t_star) {
                t_star = tc;
                hit = static_cast<int>(gi);
            }
        }

        if (hit >= 0) {
            // nudge past the crossing so the post-side classification holds
            double delta = std::max(64.0 * 1e-16 * std::max(1.0, T), 1e-9 * h);
            PolicyDecision next = seg;
            Vec y_adv{};
            double t_adv = t_star;
            for (int attempt = 0; attempt < 48; ++attempt) {
                t_adv = std::min(t1, t_star + delta);
                y_adv = state_at(field, t, y, t_adv, rtol, atol);
                next = policy.decide(to_reduced(t_adv, y_adv, T));
                if (!same_decision(next, seg) || t_adv == t1) break;
                delta *= 4.0;
            }
            const Vec ys = state_at(field, t, y, t_star, rtol, atol);
            const ReducedState rstar = to_reduced(t_star, ys, T);
            const SurfaceId sid =
                gset[hit].refine ? gset[hit].refine(rstar) : gset[hit].surface;
            out.events.push_back({t_star, sid});
            // sister surfaces crossed at the same instant (e.g. S_r and S_m met
            // together when x_m = x_r)
            for (size_t gi = 0; gi < gset.size(); ++gi) {
                if (static_cast<int>(gi) == hit) continue;
                if (std::abs(gset[gi].residual(rstar)) < 1e-9)
                    out.events.push_back(
                        {t_star, gset[gi].refine ? gset[gi].refine(rstar) : gset[gi].surface});
            }
            t = t_adv;
            y = y_adv;
            if (same_decision(next, seg)) {
                if (++stall > 8)
                    throw EventLocalizationFailure("policy decision did not flip across event");
            } else {
                stall = 0;
            }
            seg = next;
            field.seg = seg;
            gset = policy.guards(seg, to_reduced(t, y, T));
            record(t, y);
            if (seg.regime == Regime::terminal) break;
            continue;
        }

        // guards silent: double-check the decision did not drift (covers
        // boundaries without a registered residual)
        PolicyDecision d1 = policy.decide(r1);
        if (!same_decision(seg, d1) && d1.regime != Regime::terminal) {
            double lo = t, hi = t1;
            for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, T); ++it) {
                const double mid = 0.5 * (lo + hi);
                const Vec ym = state_at(field, t, y, mid, rtol, atol);
                if (same_decision(policy.decide(to_reduced(mid, ym, T)), seg))
                    lo = mid;
                else
                    hi = mid;
            }
            y = state_at(field, t, y, hi, rtol, atol);
            t = hi;
            seg = policy.decide(to_reduced(t, y, T));  // decision at the bisected state
            field.seg = seg;
            gset = policy.guards(seg, to_reduced(t, y, T));
            record(t, y);
            if (seg.regime == Regime::terminal) break;
            continue;
        }

        t = t1;
        y = att.y;
        h = h_next;
        record(t, y);
    }

    out.J_r = (1.0 - P.eps) * P.c * y[3];
    out.J_m = P.eps * P.c * y[4];
    out.J_n = y[5];
    out.U_r = y[3] / n0;
    out.U_m = y[4] / n0;
    return out;
}

}  // namespace

SeasonOutcome integrate_season(const ModelParams& params, const FeedbackPolicy& policy,
                               double n0, const IntegrateOptions& opt) {
    if (!(n0 > kResourceFloor)) throw ZeroResource();
    return run_season(params, policy, FullState{0.0, 0.0, n0, 0.0}, opt);
}

SeasonOutcome integrate_from(const ModelParams& params, const FeedbackPolicy& policy,
                             const FullState& init, const IntegrateOptions& opt) {
    return run_season(params, policy, init, opt);
}

void write_trajectory_csv(std::ostream& os, const SeasonOutcome& outcome, double T) {
    os << "t,p_r,p_m,n,x_r,x_m,u_r,u_m\n";
    for (const auto& s : outcome.samples) {
        os << g17(s.t) << ',' << g17(s.state.p_r) << ',' << g17(s.state.p_m) << ','
           << g17(s.state.n) << ',' << g17(s.state.p_r / s.state.n) << ','
           << g17(s.state.p_m / s.state.n) << ',' << g17(s.u.u_r) << ',' << g17(s.u.u_m)
           << "\n";
    }
    (void)T;
}

}  // namespace seasonal
