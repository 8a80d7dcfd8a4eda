#include "seasonal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace seasonal::dp {

namespace {

// (1 - e^{-a dt})/a, stable near a = 0
double decay_integral(double a, double dt) {
    const double ad = a * dt;
    if (std::abs(ad) < 1e-8) return dt * (1.0 - 0.5 * ad + ad * ad / 6.0);
    return -std::expm1(-ad) / a;
}

// (u/(1-w)) [ (1-e^{-w dt})/w - (1-e^{-dt}) ]: the pull part of the reward
// integral for constant controls over one step
double pull_reward(double u, double w, double dt) {
    if (u == 0.0) return 0.0;
    const double a = 1.0 - w;
    if (std::abs(a) < 1e-6) {
        const double ed = std::exp(-dt);
        return u * (1.0 - ed - dt * ed);
    }
    return u / a * (decay_integral(w, dt) - decay_integral(1.0, dt));
}

struct StepConsts {
    double w = 0.0;     // depletion rate c[(1-eps)u_r + eps u_m]
    double sfac = 0.0;  // e^{-(1-w) dt}
    double pull = 0.0;  // shared pull integral (1-e^{-(1-w)dt})/(1-w)
    double dfac = 0.0;  // e^{-w dt}
    double rx = 0.0;    // reward coefficient of the paying state
    double rc = 0.0;    // constant reward part
};

StepConsts make_consts(double u_pay, double w, double dt) {
    StepConsts k;
    k.w = w;
    k.sfac = std::exp(-(1.0 - w) * dt);
    k.pull = decay_integral(1.0 - w, dt);
    k.dfac = std::exp(-w * dt);
    k.rx = (1.0 - u_pay) * decay_integral(1.0, dt);
    k.rc = (1.0 - u_pay) * pull_reward(u_pay, w, dt);
    return k;
}

inline double lin1(const double* v, int nx, double xi) {
    if (xi <= 0.0) return v[0];
    if (xi >= nx - 1) return v[nx - 1];
    const int i = static_cast<int>(xi);
    const double f = xi - i;
    return v[i] * (1.0 - f) + v[i + 1] * f;
}

inline double lin2(const double* v, int nx, double xr_i, double xm_i) {
    const auto clamp_i = [nx](double z, int& i, double& f) {
        if (z <= 0.0) {
            i = 0;
            f = 0.0;
        } else if (z >= nx - 1) {
            i = nx - 2;
            f = 1.0;
        } else {
            i = static_cast<int>(z);
            f = z - i;
        }
    };
    int ir, im;
    double fr, fm;
    clamp_i(xr_i, ir, fr);
    clamp_i(xm_i, im, fm);
    const double* r0 = v + ir * nx + im;
    const double* r1 = r0 + nx;
    return (1.0 - fr) * ((1.0 - fm) * r0[0] + fm * r0[1]) +
           fr * ((1.0 - fm) * r1[0] + fm * r1[1]);
}

// one-node backward update shared by the resident iteration and the
// collapsed mimic run: exact frozen-control flow + linear interpolation
inline double node_value_1d(double x, const double* prev, int nx, double dx_inv,
                            const StepConsts& k, double u) {
    const double xn = x * k.sfac + u * k.pull;
    return k.rx * x + k.rc + k.dfac * lin1(prev, nx, xn * dx_inv);
}

struct ResidentKernel {
    int nx;
    double dx, dx_inv, x_max;
    std::vector<StepConsts> consts;
    std::vector<double> levels;

    void update_node(const double* prev, double* next, uint8_t* arg, long* clamps,
                     int i) const {
        const double x = i * dx;
        double best = -1.0;
        int bestj = 0;
        for (size_t j = 0; j < levels.size(); ++j) {
            const double v = node_value_1d(x, prev, nx, dx_inv, consts[j], levels[j]);
            if (v > best) {
                best = v;
                bestj = static_cast<int>(j);
            }
        }
        const double xn = x * consts[bestj].sfac + levels[bestj] * consts[bestj].pull;
        if (xn > x_max * (1.0 + 1e-12)) ++*clamps;
        next[i] = best;
        arg[i] = static_cast<uint8_t>(bestj);
    }
};

// serial reference: straight loop over the slice
void resident_slice_serial(const ResidentKernel& K, const double* prev, double* next,
                           uint8_t* arg, long& clamps) {
    long local = 0;
    for (int i = 0; i < K.nx; ++i) K.update_node(prev, next, arg, &local, i);
    clamps += local;
}

// OpenMP kernel: parallel across state nodes within the slice
void resident_slice_parallel(const ResidentKernel& K, const double* prev, double* next,
                             uint8_t* arg, long& clamps) {
    long total = 0;
#pragma omp parallel reduction(+ : total)
    {
        long local = 0;
#pragma omp for schedule(static)
        for (int i = 0; i < K.nx; ++i) K.update_node(prev, next, arg, &local, i);
        total += local;
    }
    clamps += total;
}

std::vector<double> control_levels(int n) {
    std::vector<double> u(std::max(n, 2));
    for (size_t j = 0; j < u.size(); ++j) u[j] = static_cast<double>(j) / (u.size() - 1);
    return u;
}

}  // namespace

double ResidentTable::value_at(double x, double tau) const {
    const int nx = grid.nx;
    const double k = tau / dt();
    const int k0 = std::clamp(static_cast<int>(k), 0, grid.nt);
    const int k1 = std::min(k0 + 1, grid.nt);
    const double f = std::clamp(k - k0, 0.0, 1.0);
    const double v0 = lin1(value.data() + k0 * nx, nx, x / dx());
    const double v1 = lin1(value.data() + k1 * nx, nx, x / dx());
    return v0 * (1.0 - f) + v1 * f;
}

int ResidentTable::argmax_at(double x, double tau) const {
    const int k = std::clamp(static_cast<int>(std::lround(tau / dt())), 0, grid.nt);
    const int i = std::clamp(static_cast<int>(std::lround(x / dx())), 0, grid.nx - 1);
    return argmax[k * grid.nx + i];
}

ResidentTable dp_resident_value(double c, double T, const GridSpec& grid, bool parallel) {
    if (grid.nx < 16 || grid.nt < 16) throw ShapeMismatch("grid too coarse (min 16)");
    ResidentTable tab;
    tab.grid = grid;
    tab.c = c;
    tab.T = T;
    const int nx = grid.nx, nt = grid.nt;
    tab.value.assign(static_cast<size_t>(nt + 1) * nx, 0.0);
    tab.argmax.assign(static_cast<size_t>(nt + 1) * nx, 0);

    ResidentKernel K;
    K.nx = nx;
    K.dx = grid.x_max / (nx - 1);
    K.dx_inv = 1.0 / K.dx;
    K.x_max = grid.x_max;
    K.levels = control_levels(grid.control_levels);
    const double dt = T / nt;
    for (double u : K.levels) K.consts.push_back(make_consts(u, c * u, dt));

    for (int k = 0; k < nt; ++k) {
        const double* prev = tab.value.data() + static_cast<size_t>(k) * nx;
        double* next = tab.value.data() + static_cast<size_t>(k + 1) * nx;
        uint8_t* arg = tab.argmax.data() + static_cast<size_t>(k + 1) * nx;
        if (parallel)
            resident_slice_parallel(K, prev, next, arg, tab.clamp_hits);
        else
            resident_slice_serial(K, prev, next, arg, tab.clamp_hits);
    }
    return tab;
}

double MutantTable::value_final_at(double x_r, double x_m) const {
    return lin2(value_final.data(), grid.nx, x_r / dx(), x_m / dx());
}

int MutantTable::argmax_at(double x_r, double x_m, double tau) const {
    if (!has_argmax) throw ShapeMismatch("argmax table was not kept");
    const int nx = grid.nx;
    const int k = std::clamp(static_cast<int>(std::lround(tau / dt())), 0, grid.nt);
    const int ir = std::clamp(static_cast<int>(std::lround(x_r / dx())), 0, nx - 1);
    const int im = std::clamp(static_cast<int>(std::lround(x_m / dx())), 0, nx - 1);
    return argmax[(static_cast<size_t>(k) * nx + ir) * nx + im];
}

namespace {

struct MutantKernel {
    int nx;
    double dx, dx_inv, x_max, c, eps, dt;
    std::vector<double> levels;
    // consts indexed [u_r bang][level j]
    std::vector<StepConsts> consts0, consts1;

    void update_node(const double* prev, double* next, uint8_t* arg, long* clamps,
                     double u_r, int ir, int im) const {
        const double xr = ir * dx, xm = im * dx;
        const std::vector<StepConsts>* row = nullptr;
        std::vector<StepConsts> scratch;
        if (u_r == 0.0)
            row = &consts0;
        else if (u_r == 1.0)
            row = &consts1;
        else {
            // resident feedback returned an intermediate value (node sits on
            // the arc within tolerance); build the constants in place
            scratch.reserve(levels.size());
            for (double um : levels)
                scratch.push_back(
                    make_consts(um, c * ((1.0 - eps) * u_r + eps * um), dt));
            row = &scratch;
        }
        double best = -1.0;
        int bestj = 0;
        for (size_t j = 0; j < levels.size(); ++j) {
            const StepConsts& k = (*row)[j];
            const double xrn = xr * k.sfac + u_r * k.pull;
            const double xmn = xm * k.sfac + levels[j] * k.pull;
            const double v =
                k.rx * xm + k.rc + k.dfac * lin2(prev, nx, xrn * dx_inv, xmn * dx_inv);
            if (v > best) {
                best = v;
                bestj = static_cast<int>(j);
            }
        }
        const StepConsts& kb = (*row)[bestj];
        if (xr * kb.sfac + u_r * kb.pull > x_max * (1.0 + 1e-12) ||
            xm * kb.sfac + levels[bestj] * kb.pull > x_max * (1.0 + 1e-12))
            ++*clamps;
        next[ir * nx + im] = best;
        if (arg) arg[ir * nx + im] = static_cast<uint8_t>(bestj);
    }
};

void mutant_slice_serial(const MutantKernel& K, const std::vector<double>& u_r_row,
                         const double* prev, double* next, uint8_t* arg, long& clamps) {
    long local = 0;
    for (int ir = 0; ir < K.nx; ++ir)
        for (int im = 0; im < K.nx; ++im)
            K.update_node(prev, next, arg, &local, u_r_row[ir], ir, im);
    clamps += local;
}

void mutant_slice_parallel(const MutantKernel& K, const std::vector<double>& u_r_row,
                           const double* prev, double* next, uint8_t* arg, long& clamps) {
    long total = 0;
#pragma omp parallel reduction(+ : total)
    {
        long local = 0;
#pragma omp for schedule(static)
        for (int ir = 0; ir < K.nx; ++ir)
            for (int im = 0; im < K.nx; ++im)
                K.update_node(prev, next, arg, &local, u_r_row[ir], ir, im);
        total += local;
    }
    clamps += total;
}

}  // namespace

MutantTable dp_mutant_value(double c, double eps, double T, const ResidentPolicy& resident,
                            const GridSpec& grid, const MutantDpOptions& opt) {
    if (grid.nx < 16 || grid.nt < 16) throw ShapeMismatch("grid too coarse (min 16)");
    MutantTable tab;
    tab.grid = grid;
    tab.c = c;
    tab.eps = eps;
    tab.T = T;
    const int nx = grid.nx, nt = grid.nt;
    const double dt = T / nt;

    if (opt.mimic) {
        // u_m = u_r makes the depletion rate c[(1-eps)u + eps u] = c u for any
        // eps, so the problem collapses onto the diagonal and is exactly the
        // resident iteration
        ResidentTable rt = dp_resident_value(c, T, grid, opt.parallel);
        tab.mimic_diagonal.assign(rt.value.end() - nx, rt.value.end());
        tab.clamp_hits = rt.clamp_hits;
        return tab;
    }

    MutantKernel K;
    K.nx = nx;
    K.dx = grid.x_max / (nx - 1);
    K.dx_inv = 1.0 / K.dx;
    K.x_max = grid.x_max;
    K.c = c;
    K.eps = eps;
    K.dt = dt;
    K.levels = control_levels(grid.control_levels);
    for (double um : K.levels) {
        K.consts0.push_back(make_consts(um, c * eps * um, dt));
        K.consts1.push_back(make_consts(um, c * ((1.0 - eps) + eps * um), dt));
    }

    std::vector<double> prev(static_cast<size_t>(nx) * nx, 0.0);
    std::vector<double> next(static_cast<size_t>(nx) * nx, 0.0);
    if (opt.keep_argmax) {
        tab.argmax.assign(static_cast<size_t>(nt + 1) * nx * nx, 0);
        tab.has_argmax = true;
    }

    std::vector<double> u_r_row(nx);
    for (int k = 0; k < nt; ++k) {
        const double tau_next = (k + 1) * dt;
        for (int ir = 0; ir < nx; ++ir)
            u_r_row[ir] = resident.control(ir * K.dx, tau_next);
        uint8_t* arg = opt.keep_argmax
                           ? tab.argmax.data() + (static_cast<size_t>(k) + 1) * nx * nx
                           : nullptr;
        if (opt.parallel)
            mutant_slice_parallel(K, u_r_row, prev.data(), next.data(), arg, tab.clamp_hits);
        else
            mutant_slice_serial(K, u_r_row, prev.data(), next.data(), arg, tab.clamp_hits);
        std::swap(prev, next);
    }
    tab.value_prefinal = std::move(next);  // slice at tau = T - dt after the swap
    tab.value_final = std::move(prev);
    return tab;
}

double MutantTable::switch_indicator(double x_r, double x_m,
                                     const ResidentPolicy& resident) const {
    if (value_prefinal.empty()) throw ShapeMismatch("pre-final slice not available");
    const double step = dt();
    const double u_r = resident.control(x_r, T);
    double q[2];
    for (int j = 0; j < 2; ++j) {
        const double um = static_cast<double>(j);
        const StepConsts k = make_consts(um, c * ((1.0 - eps) * u_r + eps * um), step);
        const double xrn = x_r * k.sfac + u_r * k.pull;
        const double xmn = x_m * k.sfac + um * k.pull;
        q[j] = k.rx * x_m + k.rc +
               k.dfac * lin2(value_prefinal.data(), grid.nx, xrn / dx(), xmn / dx());
    }
    return q[1] - q[0];
}

CompareReport compare(std::span<const double> analytic,
                      const std::vector<std::vector<double>>& dp_refinements,
                      double tolerance) {
    if (dp_refinements.empty()) throw ShapeMismatch("no dp refinements supplied");
    for (const auto& run : dp_refinements)
        if (run.size() != analytic.size())
            throw ShapeMismatch("dp refinement length does not match analytic curve");

    CompareReport rep;
    rep.tolerance = tolerance;
    for (size_t i = 0; i < analytic.size(); ++i) {
        ComparePoint p;
        p.analytic = analytic[i];
        for (const auto& run : dp_refinements) p.dp.push_back(run[i]);
        const size_t m = p.dp.size();
        p.extrapolated = m >= 2 ? 2.0 * p.dp[m - 1] - p.dp[m - 2] : p.dp.back();
        p.rel_err = std::abs(p.extrapolated - p.analytic) /
                    std::max(std::abs(p.analytic), 1e-300);
        rep.max_rel_err = std::max(rep.max_rel_err, p.rel_err);
        rep.points.push_back(std::move(p));
    }
    rep.pass = rep.max_rel_err <= tolerance;
    return rep;
}

void dump_value_table(const std::string& path, std::span<const int> dims,
                      std::span<const double> data) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    const char magic[4] = {'D', 'P', 'T', '1'};
    std::fwrite(magic, 1, 4, f);
    const uint32_t nd = static_cast<uint32_t>(dims.size());
    std::fwrite(&nd, sizeof nd, 1, f);
    for (int d : dims) {
        const uint32_t v = static_cast<uint32_t>(d);
        std::fwrite(&v, sizeof v, 1, f);
    }
    std::fwrite(data.data(), sizeof(double), data.size(), f);
    std::fclose(f);
}

std::pair<std::vector<int>, std::vector<double>> load_value_table(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    char magic[4];
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "DPT1", 4) != 0) {
        std::fclose(f);
        throw std::runtime_error("bad table magic in " + path);
    }
    uint32_t nd = 0;
    if (std::fread(&nd, sizeof nd, 1, f) != 1) {
        std::fclose(f);
        throw std::runtime_error("truncated table header in " + path);
    }
    std::vector<int> dims(nd);
    size_t total = 1;
    for (auto& d : dims) {
        uint32_t v = 0;
        if (std::fread(&v, sizeof v, 1, f) != 1) {
            std::fclose(f);
            throw std::runtime_error("truncated table dims in " + path);
        }
        d = static_cast<int>(v);
        total *= v;
    }
    std::vector<double> data(total);
    const size_t got = std::fread(data.data(), sizeof(double), total, f);
    std::fclose(f);
    if (got != total) throw std::runtime_error("truncated table data in " + path);
    return {std::move(dims), std::move(data)};
}

}  // namespace seasonal::dp
