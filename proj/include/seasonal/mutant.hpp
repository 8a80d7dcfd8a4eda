#pragma once
// Best-response feedback of the mutant sub-population against the fixed
// resident policy, assembled from the switching/singular structure in
// reduced coordinates:
//
//   S_m:        x_m = 1 - exp(-tau)                      (mutant bang switch)
//   S_1^sigma:  tau = -ln x_m + 2/(x_m eps c) - 4/(eps c) (eps > 0; the
//               hyperplane x_m = 1/2 in the limit eps = 0)
//   S_r^sigma:  the resident's singular arc, held by the resident in the
//               Filippov sense with the equivalent control u_r_hat
//   S_hat / S_hat^sigma: the mutant's switch curve and singular arc inside
//               S_r^sigma (analytic for eps = 0, swept numerically from the
//               characteristic conditions H_hat = A_hat = A_hat' = 0 else)
//   S_2^sigma:  singular arc below the resident surface; exists only when
//               1 - c(1-eps) >= 0 together with the control-range and
//               Kelley conditions.

#include <optional>
#include <vector>

#include "seasonal/model.hpp"
#include "seasonal/resident.hpp"
#include "seasonal/trajectory.hpp"

namespace seasonal {

// ---- closed-form building blocks -------------------------------------

// S_1^sigma as tau(x_m); nullopt marks the eps = 0 hyperplane x_m = 1/2.
std::optional<double> s1_arc_tau(double x_m, double eps, double c);

// intermediate control 2 x_m / (2 + x_m eps c) on S_1^sigma
double s1_singular_control(double x_m, double eps, double c);

// Equivalent (sliding) resident control on S_r^sigma,
//   u_r_hat = 2 x_r (1 + x_r c) / [(1 + (1-eps) x_r c)(2 + x_r c)]
//           - x_r eps c u_m / (1 + (1-eps) x_r c),
// evaluated with no admissibility checks (used by the bound searches).
double sliding_equivalent_control(double x_r, double u_m, double eps, double c);

// Checked variant: requires 0 < x_r <= 1/2 and eps < 1/c, under which the
// value is guaranteed to lie in (0, 1) for every u_m in [0, 1].
double sliding_resident_control(double x_r, double u_m, double eps, double c);

// S_hat^sigma for eps = 0: x_m = (2 + x_r c)/4 with control 1/(2 + x_r c).
double hat_arc_xm(double x_r, double c);
double hat_singular_control(double x_r, double c);

// Singular control on S_2^sigma,
//   u_m = [2 x_m - (1-eps) c (1+x_m)] / [2 - (1-eps) c + x_m eps c],
// returned only when the surface existence condition 1 - c(1-eps) >= 0,
// the range condition u_m in [0,1], and the Kelley condition
// 2 - (1-eps) c + x_m eps c >= 0 all hold. Non-existence is a value.
std::optional<double> s2_singular_control(double x_m, double eps, double c);

struct S2Tangency {
    double x_m;  // 1 / (2 - c (1-eps))
    double tau;  // -ln(1 - x_m)
};
// Point where S_2^sigma is emitted tangentially from S_m.
std::optional<S2Tangency> s2_tangency_point(double eps, double c);

struct HatJunction {
    double x_r, x_m, tau;
};
// Intersection of S_hat and S_hat^sigma for eps = 0:
// (2 + x_r c)/4 = 1 - exp(-tau), tau = -ln x_r + 2/(x_r c) - 4/c.
HatJunction hat_junction_eps0(double c);

// ---- assembled feedback ----------------------------------------------

class MutantPolicy final : public FeedbackPolicy {
public:
    // Requires eps < 1/c (throws EpsBoundViolated otherwise).
    explicit MutantPolicy(const ModelParams& p);

    const ModelParams& params() const override { return p_; }
    const ResidentPolicy& resident() const { return resident_; }

    // S_m as x_m(tau); requires 0 <= tau <= T
    double switching_surface_Sm(double tau) const;

    // x_r coordinate of the S_hat / S_hat^sigma junction
    double hat_junction_x() const { return junction_x_; }

    // S_hat as x_m(x_r) on the sliding surface, x_r in [junction, 1/2]
    double hat_switch_xm(double x_r) const;

    // S_hat^sigma as x_m(x_r), x_r in (0, junction]
    double hat_arc_xm_at(double x_r) const;

    // intermediate mutant control on S_hat^sigma
    double hat_arc_um(double x_r) const;

    // S_1^sigma as x_m(tau) for tau > ln 2 (1/2 when eps = 0)
    double s1_boundary_xm(double tau) const;

    struct S2Point {
        double tau, x_m, u_m;
    };
    bool s2_present() const { return !s2_curve_.empty(); }
    const std::vector<S2Point>& s2_curve() const { return s2_curve_; }

    // Full feedback map; at terminal time returns (0, 0).
    ControlPair control(const ReducedState& s) const { return decide(s).u; }

    PolicyDecision decide(const ReducedState& s) const override;
    ControlPair segment_controls(const PolicyDecision& d, const ReducedState& s) const override;
    std::vector<Guard> guards(const PolicyDecision& d, const ReducedState& s) const override;

private:
    struct CurvePoint {
        double x_r, x_m, lambda_m, u_m;
    };

    void build_hat_curves();       // eps > 0 sweep of S_hat and S_hat^sigma
    void build_s2_curve();
    double feed_side_boundary(double tau) const;   // min(S_m, S_2^sigma)
    double repro_side_boundary(double tau) const;  // S_m below ln 2, S_1^sigma above
    double hat_boundary_xm(double x_r) const;      // S_hat above junction, arc below

    ModelParams p_;
    ResidentPolicy resident_;
    double junction_x_ = 0.5;           // x_B
    double cache_x_min_ = 1e-6;         // smallest x_r covered by the caches
    std::vector<CurvePoint> hat_switch_;  // eps > 0: S_hat, ascending x_r
    std::vector<CurvePoint> hat_arc_;     // eps > 0: S_hat^sigma, ascending x_r
    std::vector<S2Point> s2_curve_;       // ascending tau
    double s2_tau_min_ = 0.0;
};

}  // namespace seasonal
