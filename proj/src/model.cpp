#include "seasonal/model.hpp"

namespace seasonal {

ModelParams validate(ModelParams p) {
    if (!(p.T > 0.0)) throw NonPositive("T");
    if (!(p.c > 0.0)) throw NonPositive("c");
    if (!(p.alpha > 0.0)) throw NonPositive("alpha");
    if (!(p.beta > 0.0)) throw NonPositive("beta");
    if (!(p.eps >= 0.0 && p.eps < 1.0)) throw EpsOutOfRange(p.eps);
    p.hierarchical_admissible = p.eps < 1.0 / p.c;
    return p;
}

ReducedState reduce(const FullState& s, double T) {
    if (!(s.n > kResourceFloor)) throw ZeroResource();
    return {s.p_r / s.n, s.p_m / s.n, T - s.t};
}

}  // namespace seasonal
