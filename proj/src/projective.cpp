#include "turbulent/projective.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "turbulent/argument_principle.hpp"
#include "turbulent/ode.hpp"

namespace turbulent {

namespace {

double entry_scale(const SL2Element& m) {
    return std::max(std::max(std::abs(m.a), std::abs(m.b)), std::max(std::abs(m.c), std::abs(m.d)));
}

void require_nondegenerate(const Mobius& m) {
    const double s = entry_scale(m);
    if (s == 0.0 || std::abs(m.det()) <= 1e-12 * s * s)
        throw std::invalid_argument("degenerate matrix");
}

void require_trace_free(const SL2Element& m) {
    if (std::abs(m.trace()) > 1e-12 * std::max(1.0, entry_scale(m)))
        throw std::invalid_argument("matrix is not trace-free");
}

/// Riccati right-hand side b + 2 a w - c w^2, the vertical vector field of
/// the connection matrix [[a, b], [c, -a]] in the affine chart.
cplx vertical_field(const SL2Element& m, cplx w) { return m.b + 2.0 * m.a * w - m.c * w * w; }

/// The connection matrix rewritten for the chart u = 1/w: conjugation by the
/// chart swap [[0,1],[1,0]] sends [[a,b],[c,-a]] to [[-a,c],[b,a]].
SL2Element flip_chart(const SL2Element& m) { return {-m.a, m.c, m.b, m.a}; }

}  // namespace

double p1_distance(const P1Point& p, const P1Point& q) {
    if (p.infinite && q.infinite) return 0.0;
    const double np = std::sqrt(1.0 + std::norm(p.w));
    const double nq = std::sqrt(1.0 + std::norm(q.w));
    if (p.infinite) return 1.0 / nq;
    if (q.infinite) return 1.0 / np;
    return std::abs(p.w - q.w) / (np * nq);
}

P1Point mobius_apply(const Mobius& m, const P1Point& w) {
    require_nondegenerate(m);
    cplx num, den;
    if (w.infinite) {
        num = m.a;
        den = m.c;
    } else {
        num = m.a * w.w + m.b;
        den = m.c * w.w + m.d;
    }
    if (den == cplx(0.0, 0.0)) return P1Point::infinity();
    return P1Point::finite(num / den);
}

Mobius mobius_compose(const Mobius& first, const Mobius& second) {
    const Mobius& p = second;
    const Mobius& q = first;
    return {p.a * q.a + p.b * q.c, p.a * q.b + p.b * q.d, p.c * q.a + p.d * q.c,
            p.c * q.b + p.d * q.d};
}

Mobius mobius_inverse(const Mobius& m) {
    require_nondegenerate(m);
    const cplx det = m.det();
    return {m.d / det, -m.b / det, -m.c / det, m.a / det};
}

Mobius mobius_identity() { return {cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)}; }

cplx killing_form(const SL2Element& u, const SL2Element& v) {
    require_trace_free(u);
    require_trace_free(v);
    // tr(uv) for trace-free u, v.
    const cplx tr = u.a * v.a + u.b * v.c + u.c * v.b + u.d * v.d;
    return 4.0 * tr;
}

bool is_nilpotent(const SL2Element& v) {
    require_trace_free(v);
    const double s = entry_scale(v);
    return std::abs(v.det()) <= 1e-12 * std::max(1.0, s * s);
}

Mobius sl2_exp(const SL2Element& m) {
    require_trace_free(m);
    const cplx mu2 = -m.det();
    const cplx mu = std::sqrt(mu2);
    cplx ch, shm;  // cosh(mu), sinh(mu)/mu
    if (std::abs(mu) < 1e-6) {
        // Series in mu^2 avoids cancellation at the nilpotent limit.
        ch = 1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0;
        shm = 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0;
    } else {
        ch = std::cosh(mu);
        shm = std::sinh(mu) / mu;
    }
    return {ch + shm * m.a, shm * m.b, shm * m.c, ch + shm * m.d};
}

FlatP1Bundle::FlatP1Bundle(const Lattice& lattice, Mobius monodromy_a, Mobius monodromy_b)
    : FlatP1Bundle(lattice, monodromy_a, monodromy_b, ConnectionForm{}) {}

FlatP1Bundle::FlatP1Bundle(const Lattice& lattice, Mobius monodromy_a, Mobius monodromy_b,
                           ConnectionForm form)
    : lattice_(lattice),
      monodromy_a_(monodromy_a),
      monodromy_b_(monodromy_b),
      form_(std::move(form)) {
    require_nondegenerate(monodromy_a_);
    require_nondegenerate(monodromy_b_);
    const Mobius ab = mobius_compose(monodromy_b_, monodromy_a_);
    const Mobius ba = mobius_compose(monodromy_a_, monodromy_b_);
    double minus = 0.0, plus = 0.0;
    for (auto pick : {&SL2Element::a, &SL2Element::b, &SL2Element::c, &SL2Element::d}) {
        minus = std::max(minus, std::abs(ab.*pick - ba.*pick));
        plus = std::max(plus, std::abs(ab.*pick + ba.*pick));
    }
    // Determinant-one representatives of commuting Moebius maps may only
    // commute up to sign.
    const double scale = std::max(1.0, entry_scale(ab));
    if (std::min(minus, plus) > 1e-10 * scale)
        throw std::invalid_argument("monodromies do not commute: the bundle is not flat");
}

SL2Element FlatP1Bundle::connection(cplx z) const {
    if (!form_) return SL2Element{};
    return form_(z);
}

P1Point riccati_transport(const FlatP1Bundle& bundle, const std::vector<cplx>& path,
                          const P1Point& w0, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (path.empty()) throw std::invalid_argument("transport path must contain at least one point");

    bool u_chart = w0.infinite || std::abs(w0.w) > 1.0;
    cplx w = w0.infinite ? cplx(0.0, 0.0) : (u_chart ? 1.0 / w0.w : w0.w);

    for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
        const cplx z0 = path[seg];
        const cplx dz = path[seg + 1] - z0;
        if (dz == cplx(0.0, 0.0)) continue;
        const double len = std::abs(dz);

        auto rhs = [&](double t, const detail::OdeState<1>& y, detail::OdeState<1>& d) {
            SL2Element m = bundle.connection(z0 + t * dz);
            if (u_chart) m = flip_chart(m);
            d[0] = dz * vertical_field(m, y[0]);
        };
        auto observer = [&](double, const detail::OdeState<1>&, double, detail::OdeState<1>& y,
                            double) {
            if (std::abs(y[0]) > 1.0) {
                y[0] = 1.0 / y[0];
                u_chart = !u_chart;
                return detail::ObserverAction::kContinueResetStep;
            }
            return detail::ObserverAction::kContinue;
        };

        detail::OdeState<1> y{w};
        const detail::OdeControl ctl{tol * len, std::min(0.1, 1.0 / std::max(1.0, len)), 1.0};
        const auto out = detail::integrate_adaptive<1>(rhs, y, 0.0, 1.0, ctl, observer);
        if (out.reason != detail::OdeReason::kReachedEnd)
            throw std::runtime_error("transport step collapse: tolerance not attainable");
        w = y[0];
    }

    if (u_chart) {
        if (w == cplx(0.0, 0.0)) return P1Point::infinity();
        return P1Point::finite(1.0 / w);
    }
    return P1Point::finite(w);
}

EquivariantSection::EquivariantSection(const FlatP1Bundle& bundle, SectionMap s,
                                       std::vector<cplx> pole_reps, bool periodic_poles,
                                       std::string name)
    : s_(std::move(s)),
      pole_reps_(std::move(pole_reps)),
      periodic_poles_(periodic_poles),
      name_(std::move(name)) {
    if (!s_) throw std::invalid_argument("section map must be callable");
    const cplx tau = bundle.lattice().tau();
    for (int k = 0; k < 8; ++k) {
        const cplx z = cplx(0.137 + 0.211 * k - std::floor(0.137 + 0.211 * k), 0.0) +
                       (0.093 + 0.171 * k - std::floor(0.093 + 0.171 * k)) * tau;
        const double ra = p1_distance(s_(z + 1.0), mobius_apply(bundle.monodromy_a(), s_(z)));
        const double rb = p1_distance(s_(z + tau), mobius_apply(bundle.monodromy_b(), s_(z)));
        if (ra > 1e-8 || rb > 1e-8)
            throw std::invalid_argument("section equivariance violated at sampled points");
    }
}

EquivariantSection make_builtin_section(const FlatP1Bundle& bundle, const std::string& name,
                                        cplx parameter) {
    if (name == "constant") {
        const P1Point value = P1Point::finite(parameter);
        return EquivariantSection(
            bundle, [value](cplx) { return value; }, {}, false, name);
    }
    if (name == "identity") {
        return EquivariantSection(
            bundle, [](cplx z) { return P1Point::finite(z); }, {}, false, name);
    }
    if (name == "wp") {
        const Lattice L = bundle.lattice();
        auto s = [L](cplx z) {
            if (lattice_distance(z, L) < 10.0 * kPoleProximity) return P1Point::infinity();
            return P1Point::finite(wp(z, L));
        };
        return EquivariantSection(bundle, s, {cplx(0.0, 0.0)}, true, name);
    }
    throw std::invalid_argument("unknown builtin section: " + name);
}

namespace {

/// Section value in a forced chart: the affine coordinate w, or u = 1/w.
/// Throws when the value cannot be represented in that chart.
cplx section_in_chart(const P1Point& p, bool u_chart) {
    if (u_chart) {
        if (p.infinite) return cplx(0.0, 0.0);
        if (p.w == cplx(0.0, 0.0))
            throw std::runtime_error("chart degeneracy: section meets both 0 and infinity");
        return 1.0 / p.w;
    }
    if (p.infinite) throw std::runtime_error("chart degeneracy: section pole in the affine chart");
    return p.w;
}

cplx central_difference(const EquivariantSection& s, cplx z, double h, bool u_chart) {
    const cplx fp = section_in_chart(s(z + h), u_chart);
    const cplx fm = section_in_chart(s(z - h), u_chart);
    return (fp - fm) / (2.0 * h);
}

cplx richardson_derivative(const EquivariantSection& s, cplx z, double h, bool u_chart) {
    const cplx d1 = central_difference(s, z, h, u_chart);
    const cplx d2 = central_difference(s, z, 0.5 * h, u_chart);
    return (4.0 * d2 - d1) / 3.0;
}

/// SFF with an explicit chart choice; used pointwise (chart from the local
/// section size) and by the cell counter (chart fixed per cell).
cplx sff_in_chart(const ProjectiveTriple& t, cplx z, bool u_chart) {
    const cplx r1 = richardson_derivative(t.section, z, 1e-5, u_chart);
    const cplx r2 = richardson_derivative(t.section, z, 1e-6, u_chart);
    if (std::abs(r1 - r2) > 1e-7 * std::max(1.0, std::abs(r2)))
        throw std::runtime_error("finite-difference refinement failed to agree");
    SL2Element m = t.bundle.connection(z);
    if (u_chart) m = flip_chart(m);
    return r2 - vertical_field(m, section_in_chart(t.section(z), u_chart));
}

}  // namespace

cplx second_fundamental_form(const ProjectiveTriple& t, cplx z) {
    const P1Point center = t.section(z);
    bool u_chart = center.infinite || std::abs(center.w) > 1.0;
    return sff_in_chart(t, z, u_chart);
}

int sff_vanishing_count(const ProjectiveTriple& t, int grid) {
    if (grid < 1) throw std::invalid_argument("grid must be at least 1");
    const Lattice& L = t.bundle.lattice();
    const cplx tau = L.tau();

    // Identically-zero detection on a fixed probe grid.
    double max_abs = 0.0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const cplx z = cplx(0.11 + 0.19 * i, 0.0) + (0.07 + 0.18 * j) * tau;
            try {
                max_abs = std::max(max_abs, std::abs(second_fundamental_form(t, z)));
            } catch (const std::runtime_error&) {
                // Probe point too close to a chart seam; it cannot witness
                // an identically-zero form, so skip it.
            }
        }
    if (max_abs < 1e-12)
        throw std::runtime_error("second fundamental form is identically zero at probe resolution");

    // Distances across a- and b-gridlines per unit coordinate, for turning
    // coordinate margins into genuine distances (same convention as the
    // divisor counting contour).
    const double height_b = tau.imag();
    const double height_a = tau.imag() / std::abs(tau);

    std::mt19937_64 rng(0x5FF0ull + static_cast<unsigned>(grid));
    for (int attempt = 0; attempt < 16; ++attempt) {
        const double a0 = detail::uniform01(rng);
        const double b0 = detail::uniform01(rng);

        // Fractional grid coordinates of the section poles relative to the
        // shifted rectangle.  Periodic pole lists wrap modulo the lattice;
        // explicit lists keep only representatives inside the rectangle.
        struct GridPoint {
            double fa, fb;
        };
        std::vector<GridPoint> pole_coords;
        std::vector<cplx> features;
        bool clear = true;
        for (const cplx rep : t.section.pole_reps()) {
            const double rb = rep.imag() / tau.imag();
            const double ra = rep.real() - tau.real() * rb;
            double fa = ra - a0;
            double fb = rb - b0;
            if (t.section.periodic_poles()) {
                fa -= std::floor(fa);
                fb -= std::floor(fb);
            } else if (fa < 0.0 || fa >= 1.0 || fb < 0.0 || fb >= 1.0) {
                continue;
            }
            const double ga = fa * grid - std::floor(fa * grid);
            const double gb = fb * grid - std::floor(fb * grid);
            const double margin = std::min(std::min(ga, 1.0 - ga) / grid * height_a,
                                           std::min(gb, 1.0 - gb) / grid * height_b);
            // The affine-chart finite difference (step 1e-5) loses its
            // Richardson agreement within ~1e-3 of a section pole, so the
            // contour keeps a larger berth than the divisor counter does.
            if (margin <= 2e-3) clear = false;
            pole_coords.push_back({fa, fb});
            features.push_back(cplx(a0 + fa, 0.0) + (b0 + fb) * tau);
        }
        if (!clear) continue;

        try {
            int zeros = 0;
            for (int j = 0; j < grid; ++j)
                for (int i = 0; i < grid; ++i) {
                    const detail::CoordRect cell{a0 + static_cast<double>(i) / grid,
                                         a0 + static_cast<double>(i + 1) / grid,
                                         b0 + static_cast<double>(j) / grid,
                                         b0 + static_cast<double>(j + 1) / grid};
                    // A cell containing a section pole is counted in the
                    // u = 1/w chart, where the pole is a regular point.
                    bool cell_has_pole = false;
                    for (const GridPoint& p : pole_coords)
                        if (p.fa * grid >= i && p.fa * grid < i + 1 && p.fb * grid >= j &&
                            p.fb * grid < j + 1)
                            cell_has_pole = true;
                    auto F = [&](cplx z) { return sff_in_chart(t, z, cell_has_pole); };
                    zeros += detail::rect_winding(F, L, cell, features);
                }
            return zeros;
        } catch (const std::runtime_error&) {
            // Contour through a zero, a chart seam, or a refinement failure:
            // reshuffle the boundary offset and try again.
        }
    }
    throw std::runtime_error("zero counting failed after 16 contour attempts");
}

P1Point develop(const ProjectiveTriple& t, const std::vector<cplx>& path, double tol) {
    if (path.empty()) throw std::invalid_argument("developing path must contain at least one point");
    const P1Point end_value = t.section(path.back());
    std::vector<cplx> reversed(path.rbegin(), path.rend());
    return riccati_transport(t.bundle, reversed, end_value, tol);
}

int flat_quadratic_sections_dim(int deg) { return deg == 0 ? 1 : 0; }

}  // namespace turbulent
