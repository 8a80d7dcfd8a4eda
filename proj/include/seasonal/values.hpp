#pragma once
// Closed-form season value functions U_r(T), U_m(T) for a vanishing mutant
// fraction, per unit of season-start resource.
//
// Three season-length regimes:
//   A (T <= T1): both populations follow the same bang-bang pattern and the
//      values coincide.
//   B (T1 < T <= T2): the resident rides the singular arc; the mutant keeps
//      bang-bang play and switches on S_hat.
//   C (T > T2): the mutant additionally rides the singular arc S_hat^sigma
//      down to its junction with S_hat.
// All switch points solve transcendental equations handled by bracketed
// root finding; the trajectory integrator is the arbiter for the final
// values (see the test suite).

#include <iosfwd>
#include <vector>

#include "seasonal/model.hpp"

namespace seasonal {

enum class Region { A, B, C };
const char* region_name(Region r);

// Season length separating region B from region C.
double compute_T2(double c);

Region classify_region(double T, double c);

struct ValuePair {
    double U_r, U_m;
};

ValuePair value_region_A(double T, double c);
ValuePair value_region_B(double T, double c);
ValuePair value_region_C(double T, double c);

// dispatch on classify_region
ValuePair season_values(double T, double c);

// Intersection of the initial feeding segment with the resident arc
// (defined for T > T1): x = (e^{(c-1)(T-tau)}-1)/(c-1) meeting
// tau = -ln x + 2/(x c) - 4/c.
struct ArcEntry {
    double x, tau;
};
ArcEntry arc_entry_point(double T, double c);

struct ValueSweepRow {
    double T;
    double U_r, U_m;
    Region region;
};
std::vector<ValueSweepRow> value_sweep(double c, double T_min, double T_max, int count);

// columns: T, U_r, U_m, region
void write_value_sweep_csv(std::ostream& os, const std::vector<ValueSweepRow>& rows);

}  // namespace seasonal
