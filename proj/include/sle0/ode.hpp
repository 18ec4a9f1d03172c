#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "sle0/errors.hpp"

namespace sle0::ode {

inline double max_abs(const std::complex<double>& v) { return std::abs(v); }
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Classical fourth-order Runge-Kutta step.
template <class State, class Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = f(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct AdaptiveOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 1e-6;
    double min_step = 1e-15;
    long max_steps = 1000000;
};

/// Dormand-Prince 5(4) from t0 to t1 (either direction). `accept(t, y)` sees
/// every accepted state and may throw to abort.
template <class State, class Rhs, class Accept>
State integrate_adaptive(const Rhs& f, double t0, double t1, State y, const AdaptiveOptions& opt, const Accept& accept) {
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    double t = t0;
    double h = std::min(opt.initial_step, std::abs(t1 - t0));
    if (h == 0.0) return y;

    constexpr double a21 = 1.0 / 5, a31 = 3.0 / 40, a32 = 9.0 / 40, a41 = 44.0 / 45, a42 = -56.0 / 15,
                     a43 = 32.0 / 9, a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729, a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656, b1 = 35.0 / 384, b3 = 500.0 / 1113,
                     b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84, e1 = 71.0 / 57600,
                     e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                     e7 = -1.0 / 40;

    State k1 = f(t, y);
    for (long n = 0; n < opt.max_steps; ++n) {
        const double remaining = std::abs(t1 - t);
        if (remaining <= 0.0) return y;
        h = std::min(h, remaining);
        const double s = dir * h;
        const State k2 = f(t + s / 5, State(y + s * (a21 * k1)));
        const State k3 = f(t + 3 * s / 10, State(y + s * (a31 * k1 + a32 * k2)));
        const State k4 = f(t + 4 * s / 5, State(y + s * (a41 * k1 + a42 * k2 + a43 * k3)));
        const State k5 = f(t + 8 * s / 9, State(y + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const State k6 = f(t + s, State(y + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        const State y5 = y + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const State k7 = f(t + s, y5);
        const State err = s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double scale = opt.atol + opt.rtol * std::max(max_abs(y), max_abs(y5));
        const double ratio = max_abs(err) / scale;
        if (!std::isfinite(ratio)) {
            if (h <= opt.min_step) throw Error(ErrorKind::inversion_failure, "non-finite state in adaptive integration");
            h *= 0.25;
            continue;
        }
        if (ratio <= 1.0 || h <= opt.min_step) {
            t = h >= remaining ? t1 : t + s;
            y = y5;
            k1 = k7;
            accept(t, y);
        }
        const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
        h = std::max(h * factor, opt.min_step);
    }
    throw Error(ErrorKind::internal, "adaptive integration exceeded its step budget");
}

template <class State, class Rhs>
State integrate_adaptive(const Rhs& f, double t0, double t1, State y, const AdaptiveOptions& opt = {}) {
    return integrate_adaptive(f, t0, t1, std::move(y), opt, [](double, const State&) {});
}

}  // namespace sle0::ode
