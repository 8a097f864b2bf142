#include "turbulent/ode.hpp"

#include <cmath>
#include <complex>

#include "doctest.h"
#include "testutil.hpp"
#include "turbulent/common.hpp"

using namespace turbulent;
using detail::integrate_adaptive;
using detail::ObserverAction;
using detail::OdeControl;
using detail::OdeReason;
using detail::OdeState;

namespace {
const auto keep_going = [](double, const auto&, double, const auto&, double) {
    return ObserverAction::kContinue;
};
}

TEST_CASE("integrator: rotation closes to machine-level accuracy") {
    OdeState<1> y{cplx(1.0, 0.0)};
    auto rhs = [](double, const OdeState<1>& s, OdeState<1>& d) { d[0] = cplx(0.0, 1.0) * s[0]; };
    const auto out = integrate_adaptive<1>(rhs, y, 0.0, 2.0 * kPi, {1e-10, 1e-3, 1.0}, keep_going);
    CHECK(out.reason == OdeReason::kReachedEnd);
    CHECK(out.t_end == 2.0 * kPi);
    CHECK(std::abs(y[0] - cplx(1.0, 0.0)) < 1e-8);
    CHECK(out.accepted_steps > 10);

    // Tightening the tolerance tightens the result.
    OdeState<1> y2{cplx(1.0, 0.0)};
    integrate_adaptive<1>(rhs, y2, 0.0, 2.0 * kPi, {1e-13, 1e-3, 1.0}, keep_going);
    CHECK(std::abs(y2[0] - cplx(1.0, 0.0)) < 1e-10);
}

TEST_CASE("integrator: coupled system matches the closed-form exponential") {
    // y1' = y2, y2' = -y1 with y(0) = (1, i): y1(t) = cos t + i sin t = e^{it}.
    OdeState<2> y{cplx(1.0, 0.0), cplx(0.0, 1.0)};
    auto rhs = [](double, const OdeState<2>& s, OdeState<2>& d) {
        d[0] = s[1];
        d[1] = -s[0];
    };
    const double T = 3.7;
    const auto out = integrate_adaptive<2>(rhs, y, 0.0, T, {1e-11, 1e-3, 0.5}, keep_going);
    CHECK(out.reason == OdeReason::kReachedEnd);
    CHECK(testutil::rel_err(y[0], std::exp(cplx(0.0, T))) < 1e-9);
    CHECK(testutil::rel_err(y[1], cplx(0.0, 1.0) * std::exp(cplx(0.0, T))) < 1e-9);
}

TEST_CASE("integrator: finite-time blowup reports step collapse with last good state") {
    // y' = y^2 from y(0) = 1 blows up at t = 1.
    OdeState<1> y{cplx(1.0, 0.0)};
    auto rhs = [](double, const OdeState<1>& s, OdeState<1>& d) { d[0] = s[0] * s[0]; };
    const auto out = integrate_adaptive<1>(rhs, y, 0.0, 2.0, {1e-10, 1e-3, 1.0}, keep_going);
    CHECK(out.reason == OdeReason::kStepCollapse);
    CHECK(out.t_end < 1.0);
    CHECK(out.t_end > 0.99);
    CHECK(std::isfinite(y[0].real()));
    CHECK(std::abs(y[0]) > 100.0);
}

TEST_CASE("integrator: observer can stop and can mutate the live state") {
    OdeState<1> y{cplx(0.0, 0.0)};
    auto rhs = [](double, const OdeState<1>&, OdeState<1>& d) { d[0] = cplx(1.0, 0.0); };
    int calls = 0;
    auto obs = [&](double, const OdeState<1>&, double t, const OdeState<1>&, double) {
        ++calls;
        return (t >= 0.5) ? ObserverAction::kStop : ObserverAction::kContinue;
    };
    const auto out = integrate_adaptive<1>(rhs, y, 0.0, 10.0, {1e-10, 1e-2, 0.25}, obs);
    CHECK(out.reason == OdeReason::kObserverStop);
    CHECK(out.t_end < 10.0);
    CHECK(out.t_end >= 0.5);
    CHECK(calls == static_cast<int>(out.accepted_steps));

    // Mutating the state through the observer re-bases the trajectory: the
    // tracer's fundamental-domain reduction relies on this.
    OdeState<1> z{cplx(0.0, 0.0)};
    auto wrap = [&](double, const OdeState<1>&, double, const OdeState<1>&, double) {
        if (z[0].real() > 1.0) z[0] -= 1.0;
        return ObserverAction::kContinue;
    };
    integrate_adaptive<1>(rhs, z, 0.0, 5.25, {1e-10, 1e-2, 0.25}, wrap);
    CHECK(z[0].real() < 1.0 + 1e-9);
    CHECK(z[0].real() > -1e-9);
}
