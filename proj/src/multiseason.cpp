#include "seasonal/multiseason.hpp"

#include <cmath>
#include <ostream>

#include "seasonal/csv.hpp"
#include "seasonal/mutant.hpp"
#include "seasonal/numerics.hpp"
#include "seasonal/trajectory.hpp"

namespace seasonal {

namespace {

struct SeasonPayoffs {
    double U_r_raw, U_m_raw, V;  // Utilde_r, Utilde_m, Vtilde
};

// One within-season solve for the current mixture. The mutant best response
// is recomputed for the current (c, eps); with no mutants present the plain
// resident season is integrated instead.
SeasonPayoffs run_structured_season(double c_r, double c_m, double n0, double T) {
    const double c = c_r + c_m;
    if (!(c > 0.0)) throw ExtinctPopulation();
    const double eps = c_m / c;
    ModelParams p;
    p.T = T;
    p.c = c;
    p.eps = eps;
    p = validate(p);
    if (c_m > 0.0 && !p.hierarchical_admissible) throw EpsBoundViolated(eps, c);

    if (c_m == 0.0) {
        MimicPolicy mimic(p);
        const SeasonOutcome o = integrate_season(p, mimic, n0);
        return {c_r * o.U_r * n0, 0.0, o.J_n};
    }
    MutantPolicy policy(p);
    const SeasonOutcome o = integrate_season(p, policy, n0);
    // Utilde = c_subpop * Int (1-u) p dt = c_subpop * U * n0
    return {c_r * o.U_r * n0, c_m * o.U_m * n0, o.J_n};
}

}  // namespace

Generation step_season(const Generation& g, const ModelParams& params) {
    const ModelParams p = validate(params);
    const SeasonPayoffs pay = run_structured_season(g.c_r, g.c_m, g.n0, p.T);
    return {p.alpha * pay.U_r_raw, p.alpha * pay.U_m_raw, p.beta * pay.V, g.i + 1};
}

EquilibriumResult find_resident_equilibrium(double alpha, double beta, double T) {
    if (!(alpha > 0.0)) throw NonPositive("alpha");
    if (!(beta > 0.0)) throw NonPositive("beta");
    if (!(T > 0.0)) throw NonPositive("T");

    EquilibriumResult res;
    int evals = 0;
    // beta * J_n(c)/n0 - 1 is decreasing in c: more consumers deplete more
    auto resid = [&](double c) {
        ++evals;
        ModelParams p;
        p.T = T;
        p.c = c;
        p = validate(p);
        MimicPolicy mimic(p);
        const SeasonOutcome o = integrate_season(p, mimic, 1.0, {.record_samples = false});
        return beta * o.J_n - 1.0;
    };

    double lo = 1e-3, hi = 8.0;
    double f_lo = resid(lo), f_hi = resid(hi);
    while (f_lo < 0.0 && lo > 1e-9) {
        hi = lo;
        f_hi = f_lo;
        lo *= 0.25;
        f_lo = resid(lo);
    }
    while (f_hi > 0.0 && hi < 1e6) {
        lo = hi;
        f_lo = f_hi;
        hi *= 4.0;
        f_hi = resid(hi);
    }
    if (f_lo < 0.0) {
        // even a vanishing consumer load cannot sustain the resource
        res.status = EquilibriumResult::Status::resource_extinction;
        res.evaluations = evals;
        return res;
    }
    if (f_hi > 0.0) {
        res.status = EquilibriumResult::Status::blow_up;
        res.evaluations = evals;
        return res;
    }
    const double c_star = find_root(resid, lo, hi, {1e-10, 0.0, 200});

    ModelParams p;
    p.T = T;
    p.c = c_star;
    p = validate(p);
    MimicPolicy mimic(p);
    const SeasonOutcome o = integrate_season(p, mimic, 1.0, {.record_samples = false});
    evals++;
    const double n_star = 1.0 / (alpha * o.U_r);

    // confirm the fixed point by applying the map once
    Generation g{c_star, 0.0, n_star, 0};
    ModelParams pm = p;
    pm.alpha = alpha;
    pm.beta = beta;
    const Generation g1 = step_season(g, pm);
    evals++;
    if (std::abs(g1.c_r - c_star) > 1e-6 * std::max(1.0, c_star) ||
        std::abs(g1.n0 - n_star) > 1e-6 * std::max(1.0, n_star)) {
        res.status = EquilibriumResult::Status::no_convergence;
        res.evaluations = evals;
        return res;
    }
    res.status = EquilibriumResult::Status::converged;
    res.c_star = c_star;
    res.n_star = n_star;
    res.evaluations = evals;
    return res;
}

GenerationSeries simulate_invasion(double c_star, double n_star, double c_m0, int seasons,
                                   double alpha, double beta, double T) {
    GenerationSeries series;
    Generation g{c_star, c_m0, n_star, 0};
    for (int i = 0; i < seasons; ++i) {
        const double c = g.c_r + g.c_m;
        if (!(c > 0.0)) throw ExtinctPopulation();
        const double eps = g.c_m / c;
        if (g.c_m > 0.0 && !(eps < 1.0 / c)) {
            series.truncated = true;
            series.truncated_at = i;
            break;
        }
        const SeasonPayoffs pay = run_structured_season(g.c_r, g.c_m, g.n0, T);
        series.rows.push_back({g, eps, pay.U_r_raw, pay.U_m_raw, pay.V});
        g = Generation{alpha * pay.U_r_raw, alpha * pay.U_m_raw, beta * pay.V, g.i + 1};
    }
    return series;
}

void write_series_csv(std::ostream& os, const GenerationSeries& s) {
    os << "season,c_r,c_m,eps,n0,U_r,U_m,V\n";
    for (const auto& r : s.rows) {
        os << r.g.i << ',' << g17(r.g.c_r) << ',' << g17(r.g.c_m) << ',' << g17(r.eps) << ','
           << g17(r.g.n0) << ',' << g17(r.U_r_tilde) << ',' << g17(r.U_m_tilde) << ','
           << g17(r.V_tilde) << "\n";
    }
    if (s.truncated)
        csv_comment(os, "truncated: eps reached 1/c at season " +
                            std::to_string(s.truncated_at));
}

}  // namespace seasonal
