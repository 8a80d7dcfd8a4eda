#pragma once
// Core types of the seasonal consumer-resource model.
//
// Within a season of length T the full state (p_r, p_m, n) follows
//   dp_r/dt = -p_r + n u_r,  dp_m/dt = -p_m + n u_m,
//   dn/dt   = -n c [(1-eps) u_r + eps u_m],
// with feeding fractions u_r, u_m in [0,1] (u = 1 feeding, u = 0 laying
// eggs). All data are homogeneous of degree one in (p_r, p_m, n), so the
// energy-to-resource ratios x = p/n carry the full optimal control
// structure and drop one state dimension.

#include <stdexcept>
#include <string>

namespace seasonal {

struct ModelError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonPositive : ModelError {
    explicit NonPositive(const std::string& field)
        : ModelError("parameter must be positive: " + field) {}
};
struct EpsOutOfRange : ModelError {
    explicit EpsOutOfRange(double eps)
        : ModelError("mutant fraction must lie in [0, 1): eps = " + std::to_string(eps)) {}
};
struct ZeroResource : ModelError {
    ZeroResource() : ModelError("resource density is at or below the positivity floor") {}
};
struct TauOutOfSeason : ModelError {
    TauOutOfSeason() : ModelError("backward time must lie in [0, T]") {}
};
struct XOutOfRange : ModelError {
    explicit XOutOfRange(const std::string& what) : ModelError(what) {}
};
struct EpsBoundViolated : ModelError {
    EpsBoundViolated(double eps, double c)
        : ModelError("hierarchical play requires eps < 1/c: eps = " + std::to_string(eps) +
                      ", c = " + std::to_string(c)) {}
};

// n below this floor is treated as degenerate; the reduction divides by n
// and the dynamics never drive n to zero in finite time.
inline constexpr double kResourceFloor = 1e-12;

struct ModelParams {
    double T = 1.0;      // season length (> 0)
    double c = 1.0;      // total consumer density (> 0)
    double eps = 0.0;    // mutant fraction in [0, 1)
    double alpha = 1.0;  // consumer offspring conversion (season map)
    double beta = 1.0;   // resource offspring conversion (season map)
    // true iff eps < 1/c, the bound under which the resident can hold the
    // sliding surface for any mutant action
    bool hierarchical_admissible = true;
};

// Checks ranges and fills in hierarchical_admissible.
ModelParams validate(ModelParams p);

struct FullState {
    double p_r = 0.0;  // resident per-capita energy
    double p_m = 0.0;  // mutant per-capita energy
    double n = 1.0;    // resource density
    double t = 0.0;    // forward time in [0, T]
};

struct ReducedState {
    double x_r = 0.0;  // p_r / n
    double x_m = 0.0;  // p_m / n
    double tau = 0.0;  // backward time T - t
};

struct ControlPair {
    double u_r = 0.0;
    double u_m = 0.0;
};

// (p_r/n, p_m/n, T - t); throws ZeroResource below the positivity floor.
ReducedState reduce(const FullState& s, double T);

}  // namespace seasonal
