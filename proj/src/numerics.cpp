#include "seasonal/numerics.hpp"

#include <cmath>
#include <string>

namespace seasonal {

RootNotBracketed::RootNotBracketed(double lo, double hi, double flo, double fhi)
    : std::runtime_error("root not bracketed on [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]: f = " + std::to_string(flo) +
                         " .. " + std::to_string(fhi)) {}

double expm1_ratio(double a, double s) {
    const double as = a * s;
    if (std::abs(as) < 1e-7) {
        // expm1(as)/a = s (1 + as/2 + (as)^2/6 + ...)
        return s * (1.0 + 0.5 * as + as * as / 6.0);
    }
    return std::expm1(as) / a;
}

double log1p_ratio(double a, double x) {
    const double ax = a * x;
    if (std::abs(ax) < 1e-7) {
        return x * (1.0 - 0.5 * ax + ax * ax / 3.0);
    }
    return std::log1p(ax) / a;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 RootOptions opt) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::signbit(fa) == std::signbit(fb)) throw RootNotBracketed(a, b, fa, fb);

    double x = a, fx = fa;
    for (int it = 0; it < opt.max_iter; ++it) {
        if (b - a <= opt.xtol) break;
        // secant candidate from the bracket ends
        double s = (std::isfinite(fa) && std::isfinite(fb) && fb != fa)
                       ? b - fb * (b - a) / (fb - fa)
                       : 0.5 * (a + b);
        const double mid = 0.5 * (a + b);
        // reject candidates outside or hugging the bracket ends
        const double margin = 0.01 * (b - a);
        if (!(s > a + margin && s < b - margin)) s = mid;
        x = s;
        fx = f(x);
        if (fx == 0.0) return x;
        if (opt.ftol > 0.0 && std::abs(fx) < opt.ftol) return x;
        if (std::signbit(fx) == std::signbit(fa)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

std::optional<std::pair<double, double>> first_sign_change(
    const std::function<double(double)>& f, double lo, double hi, int steps) {
    double prev_x = lo, prev_f = f(lo);
    if (prev_f == 0.0) return std::pair{lo, lo};
    for (int i = 1; i <= steps; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / steps;
        const double fx = f(x);
        if (fx == 0.0 || std::signbit(fx) != std::signbit(prev_f))
            return std::pair{prev_x, x};
        prev_x = x;
        prev_f = fx;
    }
    return std::nullopt;
}

}  // namespace seasonal
