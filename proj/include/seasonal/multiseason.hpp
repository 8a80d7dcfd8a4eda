#pragma once
// Season-to-season discrete map. Offspring produced within a season become
// next season's populations:
//   c_r' = alpha * Utilde_r,  c_m' = alpha * Utilde_m,  n' = beta * Vtilde,
// where Utilde/Vtilde are the raw season payoffs under the resident policy
// and the mutant best response for the current (c, eps). Degree-one
// homogeneity in n makes the resident-only equilibrium a one-dimensional
// root-finding problem.

#include <iosfwd>
#include <string>
#include <vector>

#include "seasonal/model.hpp"

namespace seasonal {

struct Generation {
    double c_r = 0.0;  // resident consumer density
    double c_m = 0.0;  // mutant consumer density
    double n0 = 1.0;   // season-start resource
    int i = 0;         // season index
};

struct ExtinctPopulation : ModelError {
    ExtinctPopulation() : ModelError("consumer population is extinct (c_r + c_m = 0)") {}
};

struct SeasonRecord {
    Generation g;
    double eps = 0.0;
    double U_r_tilde = 0.0;  // alpha-free raw payoffs of the season just run
    double U_m_tilde = 0.0;
    double V_tilde = 0.0;
};

struct GenerationSeries {
    std::vector<SeasonRecord> rows;
    bool truncated = false;  // eps crossed 1/c mid-run
    int truncated_at = -1;
};

// One application of the structured map (alpha, beta, T from params).
Generation step_season(const Generation& g, const ModelParams& params);

struct EquilibriumResult {
    enum class Status { converged, resource_extinction, blow_up, no_convergence };
    Status status = Status::no_convergence;
    double c_star = 0.0;
    double n_star = 0.0;
    int evaluations = 0;
};

// Resident-only (eps = 0) fixed point of the map. Homogeneity reduces it to
// beta * Jhat_n(c) = 1 in c alone, then n* = 1/(alpha * U_r(c*)).
EquilibriumResult find_resident_equilibrium(double alpha, double beta, double T);

// Invasion run: a mutant population of size c_m0 appears at the resident
// equilibrium (c_star, n_star). Truncates with a flag if eps reaches 1/c.
GenerationSeries simulate_invasion(double c_star, double n_star, double c_m0, int seasons,
                                   double alpha, double beta, double T);

// columns: season, c_r, c_m, eps, n0, U_r, U_m, V
void write_series_csv(std::ostream& os, const GenerationSeries& s);

}  // namespace seasonal
