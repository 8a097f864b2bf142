#pragma once

/// \file argument_principle.hpp
/// Winding-number machinery shared by divisor counting and the second
/// fundamental form zero count: adaptive phase tracking along segments,
/// windings around parallelogram cells of a translated fundamental-domain
/// grid. Phase steps are kept below pi/2 by bisection; failure to resolve a
/// step (a zero or pole sitting on the contour) raises ContourFailure so the
/// caller can retry with a shifted boundary.
///
/// Bisection alone cannot detect a full 2*pi phase swing between two samples:
/// it wraps to zero and is accepted, which is exactly what a close zero-pole
/// dipole near an edge produces. Callers that know where the zeros and poles
/// are therefore pass them as "features"; edge sweeps then bound the sample
/// spacing by the distance to the nearest feature translate, which provably
/// keeps the per-segment phase change below one radian.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "turbulent/elliptic.hpp"

namespace turbulent::detail {

struct ContourFailure : std::runtime_error {
    explicit ContourFailure(const char* msg) : std::runtime_error(msg) {}
};

inline constexpr int kPhaseDepth = 42;

/// Continuous phase increment of F from z0 to z1, given the endpoint values.
/// Bisects until each substep turns by less than pi/2.
template <class Func>
double phase_step(Func& F, cplx z0, cplx z1, cplx f0, cplx f1, int depth = kPhaseDepth) {
    if (!(std::abs(f0) > 0.0) || !(std::abs(f1) > 0.0))
        throw ContourFailure("phase tracking hit a zero or undefined value on the contour");
    const double d = std::remainder(std::arg(f1) - std::arg(f0), 2.0 * kPi);
    if (std::abs(d) <= 0.5 * kPi) return d;
    if (depth <= 0) throw ContourFailure("phase tracking did not converge (singularity on the contour)");
    const cplx zm = 0.5 * (z0 + z1);
    const cplx fm = F(zm);
    return phase_step(F, z0, zm, f0, fm, depth - 1) + phase_step(F, zm, z1, fm, f1, depth - 1);
}

/// Phase increment of F from z0 to z1 when the zero/pole locations of F are
/// known (up to lattice translation). Sample spacing never exceeds half the
/// distance to the nearest feature divided by the feature count, so a simple
/// divisor can change the phase by at most ~1 radian per sample: aliasing a
/// whole turn between samples is impossible. Without features this falls back
/// to plain endpoint bisection.
template <class Func>
double tracked_phase_change(Func& F, const Lattice& L, cplx z0, cplx z1, cplx f0, cplx f1,
                            const std::vector<cplx>& features) {
    if (features.empty()) return phase_step(F, z0, z1, f0, f1);
    const double len = std::abs(z1 - z0);
    if (!(len > 0.0)) return 0.0;
    const double nf = static_cast<double>(features.size());
    double total = 0.0;
    double t = 0.0;
    cplx z = z0, f = f0;
    for (int iter = 0; iter < 200000; ++iter) {
        double r = 1e300;
        for (const cplx& s : features) r = std::min(r, lattice_distance(z - s, L));
        const double h = std::max(len * 0x1.0p-24, 0.5 * r / nf);
        const double tn = std::min(1.0, t + h / len);
        const cplx zn = (tn >= 1.0) ? z1 : z0 + tn * (z1 - z0);
        const cplx fn = (tn >= 1.0) ? f1 : F(zn);
        total += phase_step(F, z, zn, f, fn);
        if (tn >= 1.0) return total;
        t = tn;
        z = zn;
        f = fn;
    }
    throw ContourFailure("phase tracking exceeded the step budget (feature on the contour)");
}

inline int round_winding(double total) {
    const double t = total / (2.0 * kPi);
    const double r = std::floor(t + 0.5);
    if (std::abs(t - r) > 0.25) throw ContourFailure("winding number failed to settle on an integer");
    return static_cast<int>(r);
}

/// Winding of F around the counterclockwise quadrilateral c0 c1 c2 c3.
template <class Func>
int loop_winding(Func& F, const Lattice& L, const std::array<cplx, 4>& c,
                 const std::vector<cplx>& features = {}) {
    const std::array<cplx, 4> fv{F(c[0]), F(c[1]), F(c[2]), F(c[3])};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        const int k1 = (k + 1) % 4;
        total += tracked_phase_change(F, L, c[k], c[k1], fv[k], fv[k1], features);
    }
    return round_winding(total);
}

/// Axis-aligned rectangle in lattice coordinates (a + b*tau basis).
struct CoordRect {
    double alo, ahi, blo, bhi;
};

template <class Func>
int rect_winding(Func& F, const Lattice& L, const CoordRect& r, const std::vector<cplx>& features = {}) {
    const cplx tau = L.tau();
    const std::array<cplx, 4> c{
        cplx(r.alo, 0.0) + r.blo * tau,
        cplx(r.ahi, 0.0) + r.blo * tau,
        cplx(r.ahi, 0.0) + r.bhi * tau,
        cplx(r.alo, 0.0) + r.bhi * tau,
    };
    return loop_winding(F, L, c, features);
}

/// Winding numbers of F over every cell of a G x G subdivision of the unit
/// cell translated to (a0, b0), in row-major order (index i + j*G). Shared
/// edges are swept once; node values are computed once.
template <class Func>
std::vector<int> grid_windings(Func&& F, const Lattice& L, double a0, double b0, int G,
                               const std::vector<cplx>& features = {}) {
    const cplx tau = L.tau();
    const int n1 = G + 1;
    auto node = [&](int i, int j) {
        return cplx(a0 + static_cast<double>(i) / G, 0.0) + (b0 + static_cast<double>(j) / G) * tau;
    };
    std::vector<cplx> fv(static_cast<std::size_t>(n1) * n1);
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n1; ++i) fv[static_cast<std::size_t>(j) * n1 + i] = F(node(i, j));
    auto val = [&](int i, int j) -> cplx { return fv[static_cast<std::size_t>(j) * n1 + i]; };

    // H(i,j): node(i,j) -> node(i+1,j); V(i,j): node(i,j) -> node(i,j+1).
    std::vector<double> H(static_cast<std::size_t>(G) * n1), V(static_cast<std::size_t>(n1) * G);
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < G; ++i)
            H[static_cast<std::size_t>(j) * G + i] =
                tracked_phase_change(F, L, node(i, j), node(i + 1, j), val(i, j), val(i + 1, j), features);
    for (int j = 0; j < G; ++j)
        for (int i = 0; i < n1; ++i)
            V[static_cast<std::size_t>(j) * n1 + i] =
                tracked_phase_change(F, L, node(i, j), node(i, j + 1), val(i, j), val(i, j + 1), features);

    std::vector<int> w(static_cast<std::size_t>(G) * G);
    for (int j = 0; j < G; ++j)
        for (int i = 0; i < G; ++i) {
            const double total = H[static_cast<std::size_t>(j) * G + i] +
                                 V[static_cast<std::size_t>(j) * n1 + i + 1] -
                                 H[static_cast<std::size_t>(j + 1) * G + i] -
                                 V[static_cast<std::size_t>(j) * n1 + i];
            w[static_cast<std::size_t>(j) * G + i] = round_winding(total);
        }
    return w;
}

}  // namespace turbulent::detail
