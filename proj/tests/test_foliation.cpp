#include "turbulent/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "testutil.hpp"

using namespace turbulent;
using testutil::rel_err;

namespace {

/// d = 2 reference foliation on the square torus; the pole separation vector
/// (0.5, 0.4) has rational slope, so chart-A lines parallel to it close up.
struct Fixture {
    Lattice L{cplx(0.0, 1.0)};
    DivisorPair pair = make_divisor_pair({{0.2, 0.2}, {0.7, 0.6}}, {{0.45, 0.35}, {0.45, 0.45}}, L);
};

TurbulentFoliation aimed_foliation(const Fixture& fx, double scale = 0.05, cplx beta_scale = 1.0) {
    const cplx delta = lift(fx.pair.x[1], fx.L) - lift(fx.pair.x[0], fx.L);
    const cplx beta = beta_scale * delta / std::abs(delta);
    return build_turbulent(build_one_form(fx.pair, cplx(scale, 0.0)), beta, fx.L);
}

TorusPoint aimed_start(const Fixture& fx) {
    const cplx delta = lift(fx.pair.x[1], fx.L) - lift(fx.pair.x[0], fx.L);
    const cplx c0 = lift(fx.pair.x[0], fx.L) + 0.03 * cplx(0.0, 1.0) * delta / std::abs(delta);
    return reduce_point(c0, fx.L);
}

}  // namespace

TEST_CASE("foliation construction: nonsingular field, degenerate beta rejected") {
    Fixture fx;
    const auto w = build_one_form(fx.pair, cplx(1.0, 0.0));
    CHECK_THROWS_AS(build_turbulent(w, cplx(0.0, 0.0), fx.L), std::invalid_argument);

    const auto F = build_turbulent(w, cplx(1.0, 0.0), fx.L);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const auto dir = line_field(F, {i / 20.0, j / 20.0}, {0.3, 0.4});
            const double n = std::sqrt(std::norm(dir.v_c) + std::norm(dir.v_x));
            CHECK(std::isfinite(n));
            CHECK(std::abs(n - 1.0) < 1e-12);
        }
}

TEST_CASE("foliation gauge invariance: scaling both coefficients keeps the field") {
    Fixture fx;
    const cplx g(0.31, -2.2);  // |g*omega| crosses 1 at different places than |omega|
    const auto F1 = build_turbulent(build_one_form(fx.pair, cplx(0.8, 0.3)), cplx(1.0, 0.4), fx.L);
    const auto F2 =
        build_turbulent(build_one_form(fx.pair, g * cplx(0.8, 0.3)), g * cplx(1.0, 0.4), fx.L);
    std::mt19937_64 rng(17);
    int chart_disagreements = 0;
    for (int k = 0; k < 100; ++k) {
        const TorusPoint c{detail::uniform01(rng), detail::uniform01(rng)};
        const TorusPoint x{detail::uniform01(rng), detail::uniform01(rng)};
        const auto d1 = line_field(F1, c, x);
        const auto d2 = line_field(F2, c, x);
        CHECK(projective_distance(d1, d2) < 1e-10);
        if (d1.chart != d2.chart) ++chart_disagreements;
    }
    CHECK(chart_disagreements > 0);  // the test is vacuous if the charts agree everywhere
}

TEST_CASE("tangency dichotomy: horizontal at zeros, vertical at poles, kernel elsewhere") {
    Fixture fx;
    const auto F = build_turbulent(build_one_form(fx.pair, cplx(0.9, -0.2)), cplx(0.7, 0.1), fx.L);

    for (const auto& y : fx.pair.y) {
        const auto dir = line_field(F, y, {0.1, 0.9});
        CHECK(std::abs(dir.v_x) == 0.0);
        CHECK(std::abs(std::abs(dir.v_c) - 1.0) < 1e-15);
        CHECK(dir.chart == 'A');
    }
    for (const auto& x : fx.pair.x) {
        const auto dir = line_field(F, x, {0.1, 0.9});
        CHECK(std::abs(dir.v_c) == 0.0);
        CHECK(std::abs(std::abs(dir.v_x) - 1.0) < 1e-15);
        CHECK(dir.chart == 'B');
    }

    std::mt19937_64 rng(99);
    for (int k = 0; k < 200; ++k) {
        const TorusPoint c{detail::uniform01(rng), detail::uniform01(rng)};
        bool clear = true;
        for (const auto& q : fx.pair.x)
            if (torus_distance(c, q, fx.L) < 1e-3) clear = false;
        if (!clear) continue;
        const auto dir = line_field(F, c, {0.0, 0.0});
        const cplx om = F.omega.eval(lift(c, fx.L));
        CHECK(std::abs(om * dir.v_c + F.beta * dir.v_x) < 1e-12);
    }
}

TEST_CASE("compact leaves are the pole fibers, independent of beta") {
    Fixture fx;
    const auto w = build_one_form(fx.pair, cplx(1.0, 0.0));
    const auto F1 = build_turbulent(w, cplx(1.0, 0.0), fx.L);
    const auto F2 = build_turbulent(w, cplx(-3.0, 2.0), fx.L);
    const auto l1 = compact_leaves(F1);
    const auto l2 = compact_leaves(F2);
    REQUIRE(l1.size() == 2);
    REQUIRE(l2.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(l1[i].a == fx.pair.x[i].a);
        CHECK(l1[i].b == fx.pair.x[i].b);
        CHECK(l2[i].a == l1[i].a);
        const auto dir = line_field(F1, l1[i], {0.5, 0.5});
        CHECK(std::abs(dir.v_c) == 0.0);
    }
}

TEST_CASE("partial-fraction decomposition reproduces the form pointwise") {
    for (const cplx tau : {cplx(0.0, 1.0), cplx(0.3, 1.1)}) {
        const Lattice L(tau);
        for (const int d : {2, 3}) {
            const auto pair = sample_divisor_pair(d, L, 31 + d);
            const auto w = build_one_form(pair, cplx(0.6, 1.1));
            const auto dec = primitive_decomposition(w);
            REQUIRE(static_cast<int>(dec.residues.size()) == d);

            std::mt19937_64 rng(5);
            for (int k = 0; k < 30; ++k) {
                TorusPoint p{detail::uniform01(rng), detail::uniform01(rng)};
                bool clear = true;
                for (const auto& q : pair.x)
                    if (torus_distance(p, q, L) < 5e-2) clear = false;
                if (!clear) continue;
                const cplx z = lift(p, L);
                cplx sum = dec.constant;
                for (int i = 0; i < d; ++i) sum += dec.residues[i] * zeta_w(z - w.pole_lifts()[i], L);
                CHECK(rel_err(sum, w.eval(z)) < 1e-10);
            }
        }
    }
}

TEST_CASE("pole-fiber trace: base coordinate frozen exactly, zero drift") {
    Fixture fx;
    const auto F = aimed_foliation(fx, 0.5);
    const auto trace = trace_leaf(F, fx.pair.x[0], {0.25, 0.3}, 50.0, 1e-10);
    REQUIRE(trace.completed);
    CHECK(trace.t_reached == 50.0);
    CHECK(trace.chart_switches == 0);
    CHECK(trace.drift == 0.0);
    REQUIRE(trace.samples.size() > 10);
    for (const auto& s : trace.samples) {
        CHECK(torus_distance(s.c, fx.pair.x[0], fx.L) < 1e-12);
        CHECK(s.chart == 'B');
    }
    // The fiber coordinate genuinely moves.
    const auto& first = trace.samples.front();
    const auto& last = trace.samples.back();
    CHECK(torus_distance(first.x, last.x, F.lattice_x) +
              std::abs(std::round(torus_distance(first.x, last.x, F.lattice_x))) >=
          0.0);
    bool moved = false;
    for (const auto& s : trace.samples)
        if (torus_distance(s.x, first.x, F.lattice_x) > 1e-3) moved = true;
    CHECK(moved);
}

TEST_CASE("generic aimed trace: stays in chart A, conserves the primitive, visits both poles") {
    Fixture fx;
    const auto F = aimed_foliation(fx);
    const auto trace = trace_leaf(F, aimed_start(fx), {0.1, 0.2}, 20.0, 1e-10);
    REQUIRE(trace.completed);
    CHECK(trace.chart_switches == 0);
    CHECK(trace.drift < 1e-8);
    CHECK(trace.samples.size() > 50);

    double min0 = 1e300, min1 = 1e300;
    for (const auto& s : trace.samples) {
        CHECK(s.chart == 'A');
        min0 = std::min(min0, torus_distance(s.c, fx.pair.x[0], fx.L));
        min1 = std::min(min1, torus_distance(s.c, fx.pair.x[1], fx.L));
    }
    CHECK(min0 < 0.05);
    CHECK(min1 < 0.05);

    // Sample coordinates are reduced to fundamental domains.
    for (const auto& s : trace.samples) {
        CHECK(s.c.a >= 0.0);
        CHECK(s.c.a < 1.0);
        CHECK(s.x.b >= 0.0);
        CHECK(s.x.b < 1.0);
    }
}

TEST_CASE("mixed-chart trace: neutral pole rotation, conserves the primitive across switches") {
    // With a real scale one pole repels and the other attracts in the fiber
    // chart, so long traces merge with the attracting fiber and the invariant
    // stops resolving individual leaves.  Choosing the scale phase so that
    // beta^2 / residue is purely imaginary makes both poles neutral centers:
    // chart-B passes circle a fiber and exit, and the drift bound is honest.
    Fixture fx;
    const cplx delta = lift(fx.pair.x[1], fx.L) - lift(fx.pair.x[0], fx.L);
    const cplx beta = delta / std::abs(delta);
    const cplx rho = build_one_form(fx.pair, cplx(1.0, 0.0)).pole_residue(0);
    const cplx scale = std::polar(1.4, std::arg(beta * beta) - std::arg(rho) - kPi / 2.0);
    const auto F = build_turbulent(build_one_form(fx.pair, scale), beta, fx.L);

    const cplx c0 = lift(fx.pair.x[0], fx.L) + 0.03 * cplx(0.0, 1.0) * beta - 0.4 * beta;
    const auto trace = trace_leaf(F, reduce_point(c0, fx.L), {0.6, 0.1}, 15.0, 1e-10);
    REQUIRE(trace.completed);
    CHECK(trace.chart_switches >= 2);
    CHECK(trace.drift < 1e-10);

    int in_a = 0, in_b = 0;
    double min0 = 1e300, min1 = 1e300;
    for (const auto& s : trace.samples) {
        (s.chart == 'A' ? in_a : in_b)++;
        min0 = std::min(min0, torus_distance(s.c, fx.pair.x[0], fx.L));
        min1 = std::min(min1, torus_distance(s.c, fx.pair.x[1], fx.L));
    }
    CHECK(in_a > 0);
    CHECK(in_b > 0);
    CHECK(min0 < 0.2);  // swings through both pole neighborhoods ...
    CHECK(min1 < 0.2);
    CHECK(min0 > 1e-3);  // ... without merging into either fiber
    CHECK(min1 > 1e-3);
    for (std::size_t i = 1; i < trace.samples.size(); ++i)
        CHECK(trace.samples[i].t > trace.samples[i - 1].t);
}

TEST_CASE("trace input validation") {
    Fixture fx;
    const auto F = aimed_foliation(fx);
    CHECK_THROWS_AS(trace_leaf(F, {0.1, 0.1}, {0.2, 0.2}, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(trace_leaf(F, {0.1, 0.1}, {0.2, 0.2}, -1.0, 1e-10), std::invalid_argument);
}

TEST_CASE("normal bundle degree: d zeros over any slice, stable in the grid") {
    Fixture fx;
    const auto F = aimed_foliation(fx, 1.0);
    CHECK(normal_bundle_degree(F, {0.1, 0.1}, 8) == 2);
    CHECK(normal_bundle_degree(F, {0.8, 0.35}, 12) == 2);

    const Lattice Lm(cplx(0.3, 1.1));
    const auto pair5 = sample_divisor_pair(5, Lm, 3);
    const auto F5 = build_turbulent(build_one_form(pair5, cplx(0.9, 0.1)), cplx(1.0, 0.0), Lm);
    CHECK(normal_bundle_degree(F5, {0.2, 0.6}, 12) == 5);
    CHECK(normal_bundle_degree(F5, {0.9, 0.9}, 24) == 5);
}
