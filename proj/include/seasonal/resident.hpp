#pragma once
// Collectively optimal within-season feedback of the resident consumers.
//
// In reduced coordinates (x, tau = T - t) the feeding region u = 1 and the
// reproduction region u = 0 are separated by
//   S:       x = 1 - exp(-tau)                 for tau <= ln 2,
//   S^sigma: tau = -ln x + 2/(x c) - 4/c       for x in (0, 1/2],
// and along the singular arc the control is u = 2x/(2 + x c). Seasons
// shorter than T1 never reach the arc (pure bang-bang); longer seasons run
// bang-singular-bang.

#include "seasonal/model.hpp"

namespace seasonal {

// Season length separating bang-bang from bang-singular-bang,
//   T1 = (ln(c+1) + (c-2) ln 2) / (c - 1),
// with the removable singularity at c = 1 evaluated as the limit.
double season_threshold_T1(double c);

class ResidentPolicy {
public:
    ResidentPolicy(double c, double T);

    double c() const { return c_; }
    double T() const { return T_; }
    double T1() const { return T1_; }

    // S as x(tau); requires 0 <= tau <= T
    double switching_curve(double tau) const;

    // S^sigma as tau(x); requires 0 < x <= 1/2
    double singular_arc_tau(double x) const;

    // S^sigma as x(tau); requires tau >= ln 2
    double singular_arc_x(double tau) const;

    // intermediate control 2x/(2 + x c) on the arc; requires 0 < x <= 1/2
    double singular_control(double x) const;

    // switching boundary in x for a given tau: S below ln 2, the arc above
    double boundary_x(double tau) const;

    // Surface-membership test for the arc. The defining residual
    // tau - tau_arc(x) is normalized by the arc slope so the band has a
    // uniform width of kOnSurfaceTol in x even where the arc is steep.
    bool on_singular_arc(double x, double tau) const;

    // Feedback u_r(x, tau). Off-surface points return 0 or 1; points on the
    // arc (defining residual < 1e-9) return the singular control; points
    // exactly on S return 0, the value of the region entered forward in time.
    double control(double x, double tau) const;

    // residual tolerance for "on surface" point queries
    static constexpr double kOnSurfaceTol = 1e-9;

private:
    double c_, T_, T1_;
};

}  // namespace seasonal
