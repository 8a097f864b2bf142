#pragma once

/// \file foliation.hpp
/// The kernel foliation of theta = omega + beta*dx on the product of two
/// complex tori: the base curve carries a meromorphic one-form omega with
/// simple zero/pole divisors, the fiber curve carries the constant form
/// beta*dx. Compact leaves are the fibers over omega's poles; every other
/// leaf is transcendental and accumulates on them. Provides line-field
/// evaluation, leaf tracing with first-integral control, and the
/// normal-bundle degree count.

#include <vector>

#include "turbulent/divisor_forms.hpp"

namespace turbulent {

/// Product foliation data: immutable after construction.
struct TurbulentFoliation {
    MeromorphicOneForm omega;  ///< coefficient of dc on the base curve
    cplx beta;                 ///< coefficient of dx on the fiber curve, nonzero
    Lattice lattice_x;         ///< fiber-curve lattice

    [[nodiscard]] const Lattice& lattice_c() const { return omega.pair().lattice; }
};

/// Validates beta != 0 (beta = 0 degenerates the foliation to the fibration
/// and is rejected) and wraps the parts. Throws std::invalid_argument.
TurbulentFoliation build_turbulent(MeromorphicOneForm omega, cplx beta, const Lattice& lattice_x);

/// Unit direction [v_c : v_x] spanning the leaf tangent at a point.
/// Chart 'A' (|omega| <= 1) normalizes (1, -omega/beta); chart 'B' normalizes
/// (-beta/omega, 1). At zeros of omega the direction is exactly [1 : 0]
/// (horizontal), at poles exactly [0 : 1] (tangent to the compact fiber).
struct LineDirection {
    cplx v_c, v_x;  ///< |v_c|^2 + |v_x|^2 = 1
    char chart;     ///< 'A' or 'B'
};

/// Leaf direction at (c, x). Defined everywhere; x does not enter (the form
/// coefficients depend on the base coordinate only) but is part of the
/// product-geometry signature.
LineDirection line_field(const TurbulentFoliation& F, const TorusPoint& c, const TorusPoint& x);

/// Chordal distance |u_c*v_x - u_x*v_c| between unit directions; vanishes
/// exactly when they agree projectively.
double projective_distance(const LineDirection& u, const LineDirection& v);

/// The compact leaves are the fibers over omega's poles; returns the pole
/// support. Independent of beta.
std::vector<TorusPoint> compact_leaves(const TurbulentFoliation& F);

/// One accepted integration step of a leaf trace. `drift` is the magnitude
/// of the locally accumulated primitive increment at this sample.
struct LeafSample {
    double t;
    TorusPoint c, x;
    char chart;
    double drift;
};

struct LeafTrace {
    std::vector<LeafSample> samples;
    double drift;        ///< max over the trace of the local primitive deviation
    int chart_switches;  ///< diagnostic count
    bool completed;      ///< false when the step collapsed before the horizon
    double t_reached;
};

/// Traces the leaf through (c0, x0) for the given parameter horizon with an
/// embedded adaptive Runge-Kutta pair (local error per unit step <=
/// step_tol). Integration runs in chart A ((dc,dx) = (beta, -omega(c))) while
/// |omega| <= 1 and in chart B ((-beta^2/omega, beta)) otherwise, with an
/// orientation sign keeping the velocity direction continuous across
/// switches; coordinates are reduced to fundamental domains each step. The
/// drift accumulates closed-form increments of the local primitive
/// W + beta*x per step, with the branch (and the running sum) reset at chart
/// switches. Throws std::invalid_argument for step_tol <= 0 or horizon < 0.
LeafTrace trace_leaf(const TurbulentFoliation& F, const TorusPoint& c0, const TorusPoint& x0,
                     double horizon, double step_tol);

/// Degree of the normal bundle restricted over the slice through z: the
/// tangency divisor with the horizontal direction equals Div(omega), so this
/// counts omega's zeros by the argument principle. The result is d for every
/// z; z is accepted to match the geometric statement.
int normal_bundle_degree(const TurbulentFoliation& F, const TorusPoint& z, int grid);

/// Partial-fraction data of the base form: omega(z) = constant +
/// sum_i residues[i] * zeta(z - x_i), residues aligned with
/// omega.pole_lifts(). Used for closed-form primitive increments; exposed so
/// tests can verify the decomposition against direct evaluation.
struct PrimitiveDecomposition {
    cplx constant;
    std::vector<cplx> residues;
};

PrimitiveDecomposition primitive_decomposition(const MeromorphicOneForm& omega);

}  // namespace turbulent
