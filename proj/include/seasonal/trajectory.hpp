#pragma once
// Event-detecting season integrator for the three-population dynamics under
// feedback policies. Payoff integrals ride along as augmented state so they
// share the integrator's error control. Sliding arcs are integrated with the
// equivalent-control reduced field (the slaved coordinate follows the
// invariant arc ODE) instead of the raw bang field.

#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

#include "seasonal/model.hpp"
#include "seasonal/resident.hpp"

namespace seasonal {

enum class SurfaceId { S_r, S_r_sigma, S_m, S1_sigma, S_hat, S_hat_sigma, S2_sigma };
const char* surface_name(SurfaceId id);

enum class Regime { terminal, bang, resident_slide, double_slide, s1_slide, s2_slide };

struct PolicyDecision {
    Regime regime = Regime::bang;
    int branch = 0;  // disambiguates bang combinations / sliding sub-cases
    ControlPair u;
};

inline bool same_decision(const PolicyDecision& a, const PolicyDecision& b) {
    return a.regime == b.regime && a.branch == b.branch;
}

class FeedbackPolicy {
public:
    virtual ~FeedbackPolicy() = default;
    virtual const ModelParams& params() const = 0;
    virtual PolicyDecision decide(const ReducedState& s) const = 0;

    // Stage-accurate controls while a regime is held fixed (sliding controls
    // depend on the state along the segment).
    virtual ControlPair segment_controls(const PolicyDecision& d, const ReducedState&) const {
        return d.u;
    }

    // Residuals that vanish on the boundaries able to end the current
    // regime. Empty means the integrator falls back to decision-change
    // bisection without named surfaces. `refine`, when set, resolves the
    // surface id at the located crossing (a residual may cover a boundary
    // pieced together from several named surfaces).
    struct Guard {
        SurfaceId surface;
        std::function<double(const ReducedState&)> residual;
        std::function<SurfaceId(const ReducedState&)> refine;
    };
    virtual std::vector<Guard> guards(const PolicyDecision&, const ReducedState&) const {
        return {};
    }
};

// Fixed open-loop controls; handy for closed-form checks.
class ConstPolicy final : public FeedbackPolicy {
public:
    ConstPolicy(const ModelParams& p, double u_r, double u_m) : p_(p), u_{u_r, u_m} {}
    const ModelParams& params() const override { return p_; }
    PolicyDecision decide(const ReducedState&) const override {
        return {Regime::bang, 0, u_};
    }

private:
    ModelParams p_;
    ControlPair u_;
};

// The mutant copies the resident move for move (u_m = u_r), including the
// intermediate control on the singular arc.
class MimicPolicy final : public FeedbackPolicy {
public:
    explicit MimicPolicy(const ModelParams& p);
    const ModelParams& params() const override { return p_; }
    const ResidentPolicy& resident() const { return resident_; }
    PolicyDecision decide(const ReducedState& s) const override;
    ControlPair segment_controls(const PolicyDecision& d, const ReducedState& s) const override;
    std::vector<Guard> guards(const PolicyDecision& d, const ReducedState& s) const override;

private:
    ModelParams p_;
    ResidentPolicy resident_;
};

struct SeasonSample {
    double t;
    FullState state;
    ControlPair u;
};

struct SeasonEvent {
    double t;
    SurfaceId surface;
};

struct SeasonOutcome {
    std::vector<SeasonSample> samples;
    std::vector<SeasonEvent> events;
    // raw offspring counts, theta = gamma = 1:
    //   J_r = (1-eps) c Int (1-u_r) p_r dt,  J_m = eps c Int (1-u_m) p_m dt,
    //   J_n = Int n dt
    double J_r = 0.0, J_m = 0.0, J_n = 0.0;
    // per-capita offspring per unit initial resource: Int (1-u) p dt / n0
    double U_r = 0.0, U_m = 0.0;
};

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    // integrate sliding arcs with the reduced equivalent-control field;
    // false substitutes the sliding control into the full bang field instead
    bool reduced_sliding = true;
    bool record_samples = true;
    // stop at this forward time instead of T when positive (payoffs cover
    // [init.t, t_stop]); the feedback still targets the full season
    double t_stop = -1.0;
    long max_steps = 4000000;
};

struct EventLocalizationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSignChange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Season run from (p_r, p_m) = (0, 0), n(0) = n0.
SeasonOutcome integrate_season(const ModelParams& params, const FeedbackPolicy& policy,
                               double n0, const IntegrateOptions& opt = {});

// Season run from an arbitrary admissible state at t = init.t.
SeasonOutcome integrate_from(const ModelParams& params, const FeedbackPolicy& policy,
                             const FullState& init, const IntegrateOptions& opt = {});

// Root of a switching residual on a bracketing interval;
// |residual(t*)| < 1e-10 * scale on return.
double locate_event(const std::function<double(double)>& residual, double lo, double hi,
                    double scale = 1.0);

// columns: t, p_r, p_m, n, x_r, x_m, u_r, u_m
void write_trajectory_csv(std::ostream& os, const SeasonOutcome& outcome, double T);

}  // namespace seasonal
