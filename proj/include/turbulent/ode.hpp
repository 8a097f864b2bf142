#pragma once

/// \file ode.hpp
/// Embedded adaptive Runge-Kutta integration for small complex ODE systems,
/// shared by the leaf tracer and Riccati parallel transport. The stepper is
/// the Dormand-Prince 5(4) pair; acceptance is on local error per unit step.
///
/// The right-hand side may read mutable state captured by the caller (the
/// leaf tracer switches charts mid-integration this way), so the first stage
/// is recomputed every step instead of reusing the last stage of the
/// previous one.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "turbulent/common.hpp"

namespace turbulent::detail {

/// Steps below this are treated as integrator failure (step collapse).
inline constexpr double kOdeMinStep = 1e-12;

template <std::size_t N>
using OdeState = std::array<cplx, N>;

enum class ObserverAction { kContinue, kContinueResetStep, kStop };

enum class OdeReason { kReachedEnd, kObserverStop, kStepCollapse };

struct OdeOutcome {
    OdeReason reason;
    double t_end;
    std::size_t accepted_steps;
};

struct OdeControl {
    double step_tol;
    double h_init = 1e-3;
    double h_max = 1.0;
};

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 > t0). After every accepted
/// step the observer is called as observer(t_prev, y_prev, t_new, y_new, h)
/// and may mutate `y` (the live state) through its own capture; its return
/// value controls continuation. `rhs(t, y, dydt)` fills dydt.
template <std::size_t N, class RHS, class Observer>
OdeOutcome integrate_adaptive(RHS&& rhs, OdeState<N>& y, double t0, double t1, const OdeControl& ctl,
                              Observer&& observer) {
    // Dormand-Prince 5(4) tableau.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    double h = std::min(ctl.h_init, std::max(t1 - t0, 0.0));
    std::size_t accepted = 0;
    OdeState<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, errv;

    while (t < t1) {
        h = std::min(h, t1 - t);
        if (h < kOdeMinStep) return {OdeReason::kStepCollapse, t, accepted};

        rhs(t, y, k1);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double est = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < N; ++i) {
            errv[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            est = std::max(est, std::abs(errv[i]));
            scale = std::max({scale, std::abs(y[i]), std::abs(ynew[i])});
        }
        const double tol_h = ctl.step_tol * h * scale;

        if (est <= tol_h) {
            const double t_prev = t;
            const OdeState<N> y_prev = y;
            t += h;
            if (t1 - t < 1e-14 * std::max(1.0, std::abs(t1))) t = t1;  // absorb rounding shortfall
            y = ynew;
            ++accepted;
            const ObserverAction act = observer(t_prev, y_prev, t, y, h);
            if (act == ObserverAction::kStop) return {OdeReason::kObserverStop, t, accepted};
            const double factor =
                (est > 0.0) ? std::clamp(0.9 * std::pow(tol_h / est, 0.2), 0.2, 5.0) : 5.0;
            h = std::min(h * factor, ctl.h_max);
            if (act == ObserverAction::kContinueResetStep) h = std::min(ctl.h_init, ctl.h_max);
        } else {
            h *= std::clamp(0.9 * std::pow(tol_h / est, 0.2), 0.2, 1.0);
        }
    }
    return {OdeReason::kReachedEnd, t, accepted};
}

}  // namespace turbulent::detail
