#include "turbulent/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "turbulent/ode.hpp"

namespace turbulent {

namespace {

/// log(sigma(zb)/sigma(za)) with the branch tracked continuously along the
/// straight segment, subdividing while a single hop exceeds 0.8 in modulus.
/// The threshold must exceed log 2 = 0.693: when one endpoint sits far closer
/// to a zero of sigma than the other, dyadic midpoints of the chord approach a
/// fixed magnitude ratio of 2 per level, so a 0.5 threshold would recurse
/// forever.  It must also stay well below pi, the hop size at which the
/// principal branch becomes ambiguous.
cplx continuous_log_ratio(const Lattice& L, cplx za, cplx zb, cplx sa, cplx sb, int depth) {
    const cplx l = std::log(sb / sa);
    if (std::abs(l) <= 0.8) return l;
    if (depth <= 0) throw std::runtime_error("primitive branch tracking failed to converge");
    const cplx zm = 0.5 * (za + zb);
    const cplx sm = sigma_w(zm, L);
    return continuous_log_ratio(L, za, zm, sa, sm, depth - 1) +
           continuous_log_ratio(L, zm, zb, sm, sb, depth - 1);
}

/// Keeps a lift within the box of fundamental-domain coordinates [-1, 2)
/// without touching it otherwise, so coordinates frozen by the dynamics stay
/// bit-exact.
cplx lazy_reduce(cplx z, const Lattice& L) {
    const TorusPoint p = reduce_point(z, L);
    const cplx delta = z - lift(p, L);
    // delta is the lattice vector separating the lift from its reduction.
    if (std::abs(delta) < 1.5 * (1.0 + std::abs(L.tau()))) return z;
    return lift(p, L);
}

}  // namespace

TurbulentFoliation build_turbulent(MeromorphicOneForm omega, cplx beta, const Lattice& lattice_x) {
    if (beta == cplx(0.0, 0.0))
        throw std::invalid_argument("beta_coeff must be nonzero: beta = 0 degenerates to the fibration");
    return TurbulentFoliation{std::move(omega), beta, lattice_x};
}

LineDirection line_field(const TurbulentFoliation& F, const TorusPoint& c, const TorusPoint& x) {
    (void)x;  // the form coefficients depend only on the base coordinate
    const cplx cl = lift(c, F.lattice_c());
    const cplx num = F.omega.entire_numerator(cl);
    const cplx den = F.omega.entire_denominator(cl);
    cplx vc, vx;
    char chart;
    if (std::abs(num) <= std::abs(den)) {
        chart = 'A';
        vc = cplx(1.0, 0.0);
        vx = -(num / den) / F.beta;
    } else {
        chart = 'B';
        vc = -F.beta * (den / num);
        vx = cplx(1.0, 0.0);
    }
    const double n = std::sqrt(std::norm(vc) + std::norm(vx));
    return {vc / n, vx / n, chart};
}

double projective_distance(const LineDirection& u, const LineDirection& v) {
    return std::abs(u.v_c * v.v_x - u.v_x * v.v_c);
}

std::vector<TorusPoint> compact_leaves(const TurbulentFoliation& F) { return F.omega.pair().x; }

PrimitiveDecomposition primitive_decomposition(const MeromorphicOneForm& omega) {
    const Lattice& L = omega.pair().lattice;
    PrimitiveDecomposition out;
    out.residues.reserve(omega.pole_lifts().size());
    for (std::size_t i = 0; i < omega.pole_lifts().size(); ++i) out.residues.push_back(omega.pole_residue(i));

    // Probe point: the node of a coarse grid farthest from every support.
    TorusPoint best{0.5, 0.5};
    double best_dist = -1.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const TorusPoint p{0.1 + 0.2 * i, 0.1 + 0.2 * j};
            double dist = 1e300;
            for (const auto& q : omega.pair().x) dist = std::min(dist, torus_distance(p, q, L));
            for (const auto& q : omega.pair().y) dist = std::min(dist, torus_distance(p, q, L));
            if (dist > best_dist) {
                best_dist = dist;
                best = p;
            }
        }
    const cplx zp = lift(best, L);
    cplx acc = omega.eval(zp);
    for (std::size_t i = 0; i < out.residues.size(); ++i)
        acc -= out.residues[i] * zeta_w(zp - omega.pole_lifts()[i], L);
    out.constant = acc;
    return out;
}

LeafTrace trace_leaf(const TurbulentFoliation& F, const TorusPoint& c0, const TorusPoint& x0,
                     double horizon, double step_tol) {
    if (!(step_tol > 0.0)) throw std::invalid_argument("step_tol must be positive");
    if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
    const Lattice& Lc = F.lattice_c();
    const Lattice& Lx = F.lattice_x;
    const auto decomp = primitive_decomposition(F.omega);
    const auto& poles = F.omega.pole_lifts();

    detail::OdeState<2> y{lift(c0, Lc), lift(x0, Lx)};
    char chart = (std::abs(F.omega.entire_numerator(y[0])) <= std::abs(F.omega.entire_denominator(y[0])))
                     ? 'A'
                     : 'B';
    double sign = 1.0;

    auto velocity = [&F](char ch, double s, cplx c) -> detail::OdeState<2> {
        const cplx num = F.omega.entire_numerator(c);
        const cplx den = F.omega.entire_denominator(c);
        if (ch == 'A') return {s * F.beta, -s * (num / den)};
        return {-s * F.beta * F.beta * (den / num), s * F.beta};
    };

    auto rhs = [&](double, const detail::OdeState<2>& s, detail::OdeState<2>& d) {
        d = velocity(chart, sign, s[0]);
    };

    LeafTrace trace;
    trace.chart_switches = 0;
    trace.drift = 0.0;
    cplx running = 0.0;
    trace.samples.push_back({0.0, reduce_point(y[0], Lc), reduce_point(y[1], Lx), chart, 0.0});

    auto observer = [&](double, const detail::OdeState<2>& y_prev, double t_new, detail::OdeState<2>& y_live,
                        double) {
        const cplx dc = y_live[0] - y_prev[0];
        const cplx dx = y_live[1] - y_prev[1];
        // Primitive increment of W + beta*x. A step with dc == 0 lies on a
        // pole fiber (or does not move); the leaf-limit increment there is 0.
        // A step whose endpoint sigma underflows to 0 has merged with a pole
        // fiber beyond double resolution; the merged trajectory is that
        // compact fiber, so the increment is likewise skipped.
        if (dc != cplx(0.0, 0.0)) {
            cplx inc = decomp.constant * dc + F.beta * dx;
            bool merged = false;
            for (std::size_t i = 0; i < poles.size() && !merged; ++i) {
                const cplx sa = sigma_w(y_prev[0] - poles[i], Lc);
                const cplx sb = sigma_w(y_live[0] - poles[i], Lc);
                if (sa == cplx(0.0, 0.0) || sb == cplx(0.0, 0.0)) {
                    merged = true;
                    break;
                }
                inc += decomp.residues[i] *
                       continuous_log_ratio(Lc, y_prev[0] - poles[i], y_live[0] - poles[i], sa, sb, 48);
            }
            if (!merged) {
                running += inc;
                trace.drift = std::max(trace.drift, std::abs(running));
            }
        }

        auto act = detail::ObserverAction::kContinue;
        const bool want_b =
            std::abs(F.omega.entire_numerator(y_live[0])) > std::abs(F.omega.entire_denominator(y_live[0]));
        if (want_b != (chart == 'B')) {
            const auto v_old = velocity(chart, sign, y_live[0]);
            chart = want_b ? 'B' : 'A';
            const auto v_new = velocity(chart, 1.0, y_live[0]);
            const double align = (v_new[0] * std::conj(v_old[0]) + v_new[1] * std::conj(v_old[1])).real();
            sign = (align >= 0.0) ? 1.0 : -1.0;
            ++trace.chart_switches;
            running = 0.0;  // primitive branch rebased at the switch
            act = detail::ObserverAction::kContinueResetStep;
        }

        y_live[0] = lazy_reduce(y_live[0], Lc);
        y_live[1] = lazy_reduce(y_live[1], Lx);
        trace.samples.push_back({t_new, reduce_point(y_live[0], Lc), reduce_point(y_live[1], Lx), chart,
                                 std::abs(running)});
        return act;
    };

    const detail::OdeControl ctl{step_tol, 1e-2, 0.5};
    const auto out = detail::integrate_adaptive<2>(rhs, y, 0.0, horizon, ctl, observer);
    trace.completed = (out.reason == detail::OdeReason::kReachedEnd);
    trace.t_reached = out.t_end;
    return trace;
}

int normal_bundle_degree(const TurbulentFoliation& F, const TorusPoint& z, int grid) {
    (void)z;  // the tangency divisor equals Div(omega) over every slice
    return count_divisor(F.omega, grid).zeros;
}

}  // namespace turbulent
