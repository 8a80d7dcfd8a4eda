#pragma once
// Shared numeric helpers: stable exp/log ratios and bracketed root finding.

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

namespace seasonal {

struct RootNotBracketed : std::runtime_error {
    RootNotBracketed(double lo, double hi, double flo, double fhi);
};

// (exp(a*s) - 1) / a, continuous at a = 0 where the limit is s.
double expm1_ratio(double a, double s);

// log(1 + a*x) / a, continuous at a = 0 where the limit is x.
double log1p_ratio(double a, double x);

struct RootOptions {
    double xtol = 1e-14;  // absolute bracket width target
    double ftol = 0.0;    // stop early once |f| falls below this (0 = ignore)
    int max_iter = 300;
};

// Root of a continuous scalar function on a sign-changing bracket.
// Bisection with secant acceleration; always keeps a valid bracket.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 RootOptions opt = {});

// Scans [lo, hi] in `steps` uniform cells and returns the first cell on which
// f changes sign (or hits zero), if any.
std::optional<std::pair<double, double>> first_sign_change(
    const std::function<double(double)>& f, double lo, double hi, int steps);

}  // namespace seasonal
