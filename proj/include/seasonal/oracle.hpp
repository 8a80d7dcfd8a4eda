#pragma once
// Brute-force grid dynamic programming used to certify the analytic
// policies and value functions. The control set is discrete (bang values
// plus optional intermediate levels), so singular arcs emerge as
// chattering in the argmax tables; the oracle shares no formula with the
// closed-form solution it checks.
//
// The time stepping follows the frozen-control characteristic exactly
// (the dynamics are linear for constant controls), so the only scheme
// errors are state interpolation and the per-step control freeze. Both
// vanish linearly under grid refinement, which Richardson extrapolation
// exploits in `compare`.
//
// Each value iteration is offered in two builds: a plain serial reference
// and an OpenMP kernel parallel across state nodes within a time slice
// (slices are sequential; tables are double-buffered). Both produce
// bit-identical tables; the benchmark target times them against each other.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seasonal/resident.hpp"

namespace seasonal::dp {

struct GridSpec {
    int nx = 512;       // nodes per state axis (>= 16)
    int nt = 1024;      // time steps (>= 16)
    double x_max = 2.0; // state-domain cap, audited via clamp_hits
    int control_levels = 2;  // includes the endpoints 0 and 1
};

struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResidentTable {
    GridSpec grid;
    double c = 0.0, T = 0.0;
    // slice-major: value[k * nx + i] at tau = k * T/nt, x = i * x_max/(nx-1)
    std::vector<double> value;
    std::vector<uint8_t> argmax;
    long clamp_hits = 0;

    double dx() const { return grid.x_max / (grid.nx - 1); }
    double dt() const { return T / grid.nt; }
    double value_at(double x, double tau) const;
    int argmax_at(double x, double tau) const;
};

ResidentTable dp_resident_value(double c, double T, const GridSpec& grid,
                                bool parallel = true);

struct MutantTable {
    GridSpec grid;
    double c = 0.0, eps = 0.0, T = 0.0;
    // final backward slice (tau = T), row-major over (i_r, i_m)
    std::vector<double> value_final;
    // mutant argmax for every slice when keep_argmax is set:
    // argmax[(k * nx + i_r) * nx + i_m]
    std::vector<uint8_t> argmax;
    bool has_argmax = false;
    // slice at tau = T - dt, kept so the final-step switching indicator can
    // be reconstructed
    std::vector<double> value_prefinal;
    // mimic runs only: value profile along x_m = x_r (the collapsed 1-D
    // problem, which must reproduce the resident iteration bit for bit)
    std::vector<double> mimic_diagonal;
    long clamp_hits = 0;

    double dx() const { return grid.x_max / (grid.nx - 1); }
    double dt() const { return T / grid.nt; }
    double value_origin() const { return value_final[0]; }  // U(0, 0, T)
    double value_final_at(double x_r, double x_m) const;
    int argmax_at(double x_r, double x_m, double tau) const;

    // Q(u_m = 1) - Q(u_m = 0) for the final backward step: the discrete
    // switching indicator at tau = T, whose zero level set traces the
    // mutant's switching boundary
    double switch_indicator(double x_r, double x_m, const ResidentPolicy& resident) const;
};

struct MutantDpOptions {
    bool keep_argmax = false;
    bool parallel = true;
    // restrict the mutant to copying the resident move for move; the run
    // collapses onto the diagonal x_m = x_r and reuses the resident kernel
    bool mimic = false;
};

MutantTable dp_mutant_value(double c, double eps, double T, const ResidentPolicy& resident,
                            const GridSpec& grid, const MutantDpOptions& opt = {});

// Per-point comparison of an analytic curve against a sequence of DP runs
// under grid refinement. The extrapolated value assumes first-order error
// decay between the last two refinements (error halves per doubling).
struct ComparePoint {
    double analytic = 0.0;
    std::vector<double> dp;
    double extrapolated = 0.0;
    double rel_err = 0.0;  // |extrapolated - analytic| / max(|analytic|, tiny)
};

struct CompareReport {
    std::vector<ComparePoint> points;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

CompareReport compare(std::span<const double> analytic,
                      const std::vector<std::vector<double>>& dp_refinements,
                      double tolerance);

// Little-endian binary dump: magic "DPT1", u32 ndims, u32 dims[ndims],
// then float64 data in row-major order.
void dump_value_table(const std::string& path, std::span<const int> dims,
                      std::span<const double> data);
std::pair<std::vector<int>, std::vector<double>> load_value_table(const std::string& path);

}  // namespace seasonal::dp
