// Command-line front end: every computation is a reproducible, config-driven
// run emitting CSV (or JSON). Flags override config-file values; output uses
// 17 significant digits so identical configs give byte-identical files.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "seasonal/csv.hpp"
#include "seasonal/model.hpp"
#include "seasonal/multiseason.hpp"
#include "seasonal/mutant.hpp"
#include "seasonal/trajectory.hpp"
#include "seasonal/validation.hpp"
#include "seasonal/values.hpp"

namespace {

using namespace seasonal;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;

struct OutputTarget {
    std::string path;    // empty = stdout
    std::string format;  // csv | json

    std::ostream& open(std::ofstream& file) const {
        if (path.empty()) return std::cout;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        return file;
    }
};

void echo_config(std::ostream& os, const std::string& cmd,
                 const std::vector<std::pair<std::string, double>>& kv) {
    std::ostringstream meta;
    meta << "command=" << cmd;
    for (const auto& [k, v] : kv) meta << " " << k << "=" << g17(v);
    csv_comment(os, meta.str());
}

// ---- resident-pattern: control field u_r(x, tau) plus S and S^sigma ------

int cmd_resident_pattern(double c, double T, int nx, int ntau, const OutputTarget& out) {
    const ResidentPolicy pol(c, T);
    std::ofstream file;
    std::ostream& os = out.open(file);

    if (out.format == "json") {
        json j;
        j["c"] = c;
        j["T"] = T;
        j["T1"] = pol.T1();
        json field = json::array();
        for (int i = 0; i <= nx; ++i)
            for (int k = 0; k <= ntau; ++k) {
                const double x = 1.2 * i / nx, tau = T * k / ntau;
                field.push_back({{"x", x}, {"tau", tau}, {"u", pol.control(x, tau)}});
            }
        j["field"] = std::move(field);
        os << j.dump(2) << "\n";
        return kExitOk;
    }

    echo_config(os, "resident-pattern",
                {{"c", c}, {"T", T}, {"nx", nx}, {"ntau", ntau}});
    csv_comment(os, "T1=" + g17(pol.T1()));
    os << "kind,x,tau,u\n";
    for (int i = 0; i <= nx; ++i)
        for (int k = 0; k <= ntau; ++k) {
            const double x = 1.2 * i / nx, tau = T * k / ntau;
            os << "field," << g17(x) << ',' << g17(tau) << ',' << g17(pol.control(x, tau))
               << "\n";
        }
    const double ln2 = std::numbers::ln2;
    for (int k = 0; k <= ntau; ++k) {
        const double tau = std::min(T, ln2) * k / ntau;
        os << "S," << g17(pol.switching_curve(tau)) << ',' << g17(tau) << ",\n";
    }
    if (T > pol.T1()) {
        // arc sampled between its junction with S and the season horizon
        for (int k = 0; k <= ntau; ++k) {
            const double tau = ln2 + (T - ln2) * k / ntau;
            os << "S_sigma," << g17(pol.singular_arc_x(tau)) << ',' << g17(tau) << ",\n";
        }
    }
    return kExitOk;
}

// ---- mutant-pattern: surface polylines with existence flags ---------------

int cmd_mutant_pattern(double c, double eps, double T, int samples,
                       const OutputTarget& out) {
    ModelParams p;
    p.c = c;
    p.T = T;
    p.eps = eps;
    const MutantPolicy pol(validate(p));
    std::ofstream file;
    std::ostream& os = out.open(file);
    const double ln2 = std::numbers::ln2;

    echo_config(os, "mutant-pattern", {{"c", c}, {"eps", eps}, {"T", T}});
    csv_comment(os, std::string("S2_sigma=") + (pol.s2_present() ? "present" : "absent"));
    os << "surface,x_r,x_m,tau\n";
    for (int k = 0; k <= samples; ++k) {
        const double tau = T * k / samples;
        os << "S_m,," << g17(pol.switching_surface_Sm(tau)) << ',' << g17(tau) << "\n";
    }
    for (int k = 0; k <= samples; ++k) {  // S_1^sigma (x_m = 1/2 when eps = 0)
        const double tau = ln2 + (T - ln2) * k / samples;
        if (tau > T) break;
        os << "S1_sigma,," << g17(pol.s1_boundary_xm(tau)) << ',' << g17(tau) << "\n";
    }
    const ResidentPolicy& rp = pol.resident();
    for (int k = 0; k <= samples; ++k) {  // resident arc carrying the on-surface curves
        const double tau = ln2 + (T - ln2) * k / samples;
        os << "S_r_sigma," << g17(rp.singular_arc_x(tau)) << ",," << g17(tau) << "\n";
    }
    const double xB = pol.hat_junction_x();
    for (int k = 0; k <= samples; ++k) {  // S_hat from the junction to x_r = 1/2
        const double x = xB + (0.5 - xB) * k / samples;
        os << "S_hat," << g17(x) << ',' << g17(pol.hat_switch_xm(x)) << ','
           << g17(rp.singular_arc_tau(std::min(x, 0.5))) << "\n";
    }
    const double x_lo = rp.singular_arc_x(T);
    for (int k = 0; k <= samples; ++k) {  // S_hat^sigma below the junction
        const double x = x_lo + (xB - x_lo) * k / samples;
        os << "S_hat_sigma," << g17(x) << ',' << g17(pol.hat_arc_xm_at(x)) << ','
           << g17(rp.singular_arc_tau(std::min(x, 0.5))) << "\n";
    }
    for (const auto& pt : pol.s2_curve())
        os << "S2_sigma,," << g17(pt.x_m) << ',' << g17(pt.tau) << "\n";
    return kExitOk;
}

// ---- value-sweep ----------------------------------------------------------

int cmd_value_sweep(double c, double t_min, double t_max, int steps,
                    const OutputTarget& out) {
    std::ofstream file;
    std::ostream& os = out.open(file);

    std::vector<ValueSweepRow> rows;
    if (c > 1.0) {
        rows = value_sweep(c, t_min, t_max, steps);
    } else {
        // closed forms are not claimed below c = 1; integrate instead
        rows.resize(std::max(steps, 1));
        for (int i = 0; i < steps; ++i) {
            const double T = steps > 1 ? t_min + (t_max - t_min) * i / (steps - 1.0) : t_min;
            ModelParams p;
            p.c = c;
            p.T = T;
            const MutantPolicy pol(validate(p));
            const SeasonOutcome o = integrate_season(p, pol, 1.0, {.record_samples = false});
            const double T1 = season_threshold_T1(c);
            rows[i] = {T, o.U_r, o.U_m, T <= T1 ? Region::A : Region::B};
        }
    }
    if (out.format == "json") {
        json j = json::array();
        for (const auto& r : rows)
            j.push_back({{"T", r.T},
                         {"U_r", r.U_r},
                         {"U_m", r.U_m},
                         {"region", region_name(r.region)}});
        os << j.dump(2) << "\n";
        return kExitOk;
    }
    echo_config(os, "value-sweep",
                {{"c", c}, {"t_min", t_min}, {"t_max", t_max}, {"steps", steps}});
    write_value_sweep_csv(os, rows);
    return kExitOk;
}

// ---- season: one trajectory -----------------------------------------------

int cmd_season(double c, double eps, double T, double n0, const OutputTarget& out) {
    ModelParams p;
    p.c = c;
    p.T = T;
    p.eps = eps;
    p = validate(p);
    const MutantPolicy pol(p);
    const SeasonOutcome o = integrate_season(p, pol, n0);
    std::ofstream file;
    std::ostream& os = out.open(file);
    if (out.format == "json") {
        json j;
        j["J_r"] = o.J_r;
        j["J_m"] = o.J_m;
        j["J_n"] = o.J_n;
        j["U_r"] = o.U_r;
        j["U_m"] = o.U_m;
        json ev = json::array();
        for (const auto& e : o.events) ev.push_back({{"t", e.t}, {"surface", surface_name(e.surface)}});
        j["events"] = std::move(ev);
        os << j.dump(2) << "\n";
        return kExitOk;
    }
    echo_config(os, "season", {{"c", c}, {"eps", eps}, {"T", T}, {"n0", n0}});
    for (const auto& e : o.events)
        csv_comment(os, std::string("event t=") + g17(e.t) + " surface=" + surface_name(e.surface));
    csv_comment(os, "J_r=" + g17(o.J_r) + " J_m=" + g17(o.J_m) + " J_n=" + g17(o.J_n) +
                        " U_r=" + g17(o.U_r) + " U_m=" + g17(o.U_m));
    write_trajectory_csv(os, o, T);
    return kExitOk;
}

// ---- equilibrium and invasion ---------------------------------------------

int cmd_equilibrium(double alpha, double beta, double T, const OutputTarget& out) {
    const auto eq = find_resident_equilibrium(alpha, beta, T);
    std::ofstream file;
    std::ostream& os = out.open(file);
    const char* status = "no_convergence";
    switch (eq.status) {
        case EquilibriumResult::Status::converged: status = "converged"; break;
        case EquilibriumResult::Status::resource_extinction: status = "resource_extinction"; break;
        case EquilibriumResult::Status::blow_up: status = "blow_up"; break;
        default: break;
    }
    if (out.format == "json") {
        os << json{{"status", status}, {"c_star", eq.c_star}, {"n_star", eq.n_star}}.dump(2)
           << "\n";
    } else {
        echo_config(os, "equilibrium", {{"alpha", alpha}, {"beta", beta}, {"T", T}});
        os << "status,c_star,n_star\n"
           << status << ',' << g17(eq.c_star) << ',' << g17(eq.n_star) << "\n";
    }
    return eq.status == EquilibriumResult::Status::converged ? kExitOk
                                                             : kExitValidationFailure;
}

int cmd_invasion(double alpha, double beta, double T, double cm0, int seasons,
                 const OutputTarget& out) {
    const auto eq = find_resident_equilibrium(alpha, beta, T);
    if (eq.status != EquilibriumResult::Status::converged) {
        std::cerr << "resident equilibrium did not converge; cannot seed invasion\n";
        return kExitValidationFailure;
    }
    const auto series = simulate_invasion(eq.c_star, eq.n_star, cm0, seasons, alpha, beta, T);
    std::ofstream file;
    std::ostream& os = out.open(file);
    if (out.format == "json") {
        json j;
        j["truncated"] = series.truncated;
        json rows = json::array();
        for (const auto& r : series.rows)
            rows.push_back({{"season", r.g.i},
                            {"c_r", r.g.c_r},
                            {"c_m", r.g.c_m},
                            {"eps", r.eps},
                            {"n0", r.g.n0}});
        j["rows"] = std::move(rows);
        os << j.dump(2) << "\n";
        return kExitOk;
    }
    echo_config(os, "invasion",
                {{"alpha", alpha},
                 {"beta", beta},
                 {"T", T},
                 {"c_m0", cm0},
                 {"seasons", static_cast<double>(seasons)},
                 {"c_star", eq.c_star},
                 {"n_star", eq.n_star}});
    write_series_csv(os, series);
    return kExitOk;
}

// ---- validate ---------------------------------------------------------------

int cmd_validate(const std::string& suite) {
    std::vector<validation::CheckResult> results;
    try {
        results = validation::run_suite(suite);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    }
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %s — %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str(), r.seconds);
        all = all && r.pass;
    }
    return all ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seasonal consumer-resource policies, values and invasion dynamics"};
    app.set_config("--config", "", "key = value config file; sections select subcommands");
    app.require_subcommand(1);

    double c = 3.0, T = 2.0, eps = 0.0, alpha = 2.0, beta = 0.5, n0 = 1.0, cm0 = 0.001;
    double t_min = 0.2, t_max = 4.0;
    int nx = 120, ntau = 120, samples = 200, steps = 60, seasons = 40;
    OutputTarget out;
    std::string suite = "quick";

    auto add_common = [&](CLI::App* s) {
        s->configurable();   // accept [subcommand] sections from config files
        s->fallthrough();    // let --config reach the parent from inside a subcommand
        s->add_option("--out", out.path, "output path (default stdout)");
        s->add_option("--format", out.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->default_val("csv");
    };

    auto* rp = app.add_subcommand("resident-pattern",
                                  "resident control field with S and S^sigma");
    rp->add_option("--c", c)->required();
    rp->add_option("--T", T)->required();
    rp->add_option("--nx", nx);
    rp->add_option("--ntau", ntau);
    add_common(rp);

    auto* mp = app.add_subcommand("mutant-pattern",
                                  "mutant switching surfaces and singular arcs");
    mp->add_option("--c", c)->required();
    mp->add_option("--eps", eps)->required();
    mp->add_option("--T", T)->required();
    mp->add_option("--samples", samples);
    add_common(mp);

    auto* vs = app.add_subcommand("value-sweep", "season values U_r, U_m over a T range");
    vs->add_option("--c", c)->required();
    vs->add_option("--tmin", t_min);
    vs->add_option("--tmax", t_max);
    vs->add_option("--steps", steps);
    add_common(vs);

    auto* se = app.add_subcommand("season", "integrate one season and export the trajectory");
    se->add_option("--c", c)->required();
    se->add_option("--eps", eps);
    se->add_option("--T", T)->required();
    se->add_option("--n0", n0);
    add_common(se);

    auto* eq = app.add_subcommand("equilibrium", "resident-only fixed point of the season map");
    eq->add_option("--alpha", alpha);
    eq->add_option("--beta", beta);
    eq->add_option("--T", T)->required();
    add_common(eq);

    auto* in = app.add_subcommand("invasion", "mutant invasion run from the resident equilibrium");
    in->add_option("--alpha", alpha);
    in->add_option("--beta", beta);
    in->add_option("--T", T)->required();
    in->add_option("--cm0", cm0);
    in->add_option("--seasons", seasons);
    add_common(in);

    auto* va = app.add_subcommand("validate", "run the oracle-vs-analytic comparison suites");
    va->add_option("--suite", suite, "quick|full");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfigError : kExitOk;
    }

    try {
        if (rp->parsed()) return cmd_resident_pattern(c, T, nx, ntau, out);
        if (mp->parsed()) return cmd_mutant_pattern(c, eps, T, samples, out);
        if (vs->parsed()) return cmd_value_sweep(c, t_min, t_max, steps, out);
        if (se->parsed()) return cmd_season(c, eps, T, n0, out);
        if (eq->parsed()) return cmd_equilibrium(alpha, beta, T, out);
        if (in->parsed()) return cmd_invasion(alpha, beta, T, cm0, seasons, out);
        if (va->parsed()) return cmd_validate(suite);
    } catch (const ModelError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidationFailure;
    }
    return kExitConfigError;
}
