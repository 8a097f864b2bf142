#include "turbulent/divisor_forms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "turbulent/argument_principle.hpp"

namespace turbulent {

namespace {

// Remainder of z modulo the lattice minimizing |remainder| (the coordinate
// rounding of reduce_centered is refined over the 3x3 neighborhood, which is
// exact for normalized moduli).
struct NearestRemainder {
    cplx w;
    long m, n;
};

NearestRemainder nearest_remainder(cplx z, const Lattice& L) {
    const auto red = detail::reduce_centered(z, L);
    NearestRemainder best{red.w, red.m, red.n};
    double bestabs = std::abs(red.w);
    for (int j = -1; j <= 1; ++j)
        for (int k = -1; k <= 1; ++k) {
            const cplx w = red.w - (static_cast<double>(j) + static_cast<double>(k) * L.tau());
            if (std::abs(w) < bestabs) {
                bestabs = std::abs(w);
                best = {w, red.m + j, red.n + k};
            }
        }
    return best;
}

cplx support_sum_difference(const std::vector<TorusPoint>& x, const std::vector<TorusPoint>& y,
                            const Lattice& L) {
    cplx s = 0.0;
    for (const auto& p : x) s += lift(p, L);
    for (const auto& p : y) s -= lift(p, L);
    return s;
}

void check_distinct(const std::vector<TorusPoint>& pts, const Lattice& L, const char* what) {
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (torus_distance(pts[i], pts[j], L) <= kDistinctThreshold)
                throw std::invalid_argument(std::string("divisor support not distinct: ") + what);
}

void check_disjoint(const std::vector<TorusPoint>& x, const std::vector<TorusPoint>& y, const Lattice& L) {
    for (const auto& p : x)
        for (const auto& q : y)
            if (torus_distance(p, q, L) <= kDistinctThreshold)
                throw std::invalid_argument("divisor supports not disjoint");
}

}  // namespace

AbelResult abel_check(const std::vector<TorusPoint>& x, const std::vector<TorusPoint>& y, const Lattice& L,
                      double tol) {
    if (x.size() != y.size()) throw std::invalid_argument("divisor supports differ in length");
    const cplx defect = nearest_remainder(support_sum_difference(x, y, L), L).w;
    return {std::abs(defect) < tol, defect};
}

DivisorPair make_divisor_pair(std::vector<TorusPoint> x, std::vector<TorusPoint> y, const Lattice& L,
                              double tol) {
    if (x.size() != y.size()) throw std::invalid_argument("divisor supports differ in length");
    if (x.size() < 2) throw std::invalid_argument("divisor degree must be at least 2");
    check_distinct(x, L, "poles");
    check_distinct(y, L, "zeros");
    check_disjoint(x, y, L);
    if (!abel_check(x, y, L, tol).verdict) throw std::invalid_argument("abel condition violated");
    return DivisorPair{static_cast<int>(x.size()), std::move(x), std::move(y), L};
}

DivisorPair sample_divisor_pair(int d, const Lattice& L, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("divisor degree must be at least 2");
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<TorusPoint> x, y;
        x.reserve(d);
        y.reserve(d);
        for (int i = 0; i < d; ++i) x.push_back({detail::uniform01(rng), detail::uniform01(rng)});
        for (int i = 0; i + 1 < d; ++i) y.push_back({detail::uniform01(rng), detail::uniform01(rng)});
        y.push_back(reduce_point(support_sum_difference(x, y, L), L));
        try {
            return make_divisor_pair(std::move(x), std::move(y), L, 1e-12);
        } catch (const std::invalid_argument&) {
            continue;  // distinctness failed; redraw
        }
    }
    throw std::runtime_error("divisor sampling failed after 1000 attempts");
}

double min_support_distance(const DivisorPair& pair) {
    std::vector<TorusPoint> all = pair.x;
    all.insert(all.end(), pair.y.begin(), pair.y.end());
    double best = 1e300;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            best = std::min(best, torus_distance(all[i], all[j], pair.lattice));
    return best;
}

MeromorphicOneForm::MeromorphicOneForm(DivisorPair pair, cplx scale, double abel_tol)
    : pair_(std::move(pair)), scale_(scale) {
    if (scale_ == cplx(0.0, 0.0)) throw std::invalid_argument("scale must be nonzero");
    if (pair_.x.size() != pair_.y.size() || pair_.x.size() < 2)
        throw std::invalid_argument("invalid divisor pair");
    const Lattice& L = pair_.lattice;
    check_distinct(pair_.x, L, "poles");
    check_distinct(pair_.y, L, "zeros");
    check_disjoint(pair_.x, pair_.y, L);

    const auto rem = nearest_remainder(support_sum_difference(pair_.x, pair_.y, L), L);
    defect_ = rem.w;
    if (std::abs(defect_) >= abel_tol) throw std::invalid_argument("abel condition violated");

    // kappa chosen from the nearest lattice vector m + n*tau so that both
    // period factors of the sigma-quotient cancel exactly (via Legendre).
    const cplx lattice_vec = static_cast<double>(rem.m) + static_cast<double>(rem.n) * L.tau();
    kappa_ = cplx(0.0, 2.0 * kPi) * static_cast<double>(rem.n) - L.cache().eta1 * lattice_vec;

    xl_.reserve(pair_.x.size());
    yl_.reserve(pair_.y.size());
    for (const auto& p : pair_.x) xl_.push_back(lift(p, L));
    for (const auto& p : pair_.y) yl_.push_back(lift(p, L));
}

cplx MeromorphicOneForm::entire_numerator(cplx z) const {
    const Lattice& L = pair_.lattice;
    cplx prod = scale_ * std::exp(kappa_ * z);
    for (const cplx& y : yl_) prod *= sigma_w(z - y, L);
    return prod;
}

cplx MeromorphicOneForm::entire_denominator(cplx z) const {
    const Lattice& L = pair_.lattice;
    cplx prod = 1.0;
    for (const cplx& x : xl_) prod *= sigma_w(z - x, L);
    return prod;
}

cplx MeromorphicOneForm::eval(cplx z) const {
    const Lattice& L = pair_.lattice;
    for (const cplx& x : xl_)
        if (lattice_distance(z - x, L) < kPoleProximity)
            throw std::domain_error("evaluation within pole-proximity threshold of a pole");
    return entire_numerator(z) / entire_denominator(z);
}

cplx MeromorphicOneForm::pole_residue(std::size_t i) const {
    const Lattice& L = pair_.lattice;
    const cplx xi = xl_.at(i);
    cplx num = scale_ * std::exp(kappa_ * xi);
    for (const cplx& y : yl_) num *= sigma_w(xi - y, L);
    cplx den = 1.0;
    for (std::size_t j = 0; j < xl_.size(); ++j)
        if (j != i) den *= sigma_w(xi - xl_[j], L);
    return num / den;
}

MeromorphicOneForm build_one_form(const DivisorPair& pair, cplx scale, double abel_tol) {
    return MeromorphicOneForm(pair, scale, abel_tol);
}

cplx eval_one_form(const MeromorphicOneForm& w, const TorusPoint& z) {
    return w.eval(lift(z, w.pair().lattice));
}

std::vector<std::pair<TorusPoint, cplx>> residues(const MeromorphicOneForm& w, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    if (radius >= 0.5 * min_support_distance(w.pair()))
        throw std::invalid_argument("radius too large: contour would enclose another divisor point");
    std::vector<std::pair<TorusPoint, cplx>> out;
    out.reserve(w.pole_lifts().size());
    for (std::size_t i = 0; i < w.pole_lifts().size(); ++i) {
        const cplx c = w.pole_lifts()[i];
        cplx prev = 0.0;
        bool converged = false;
        for (int N = 16; N <= 8192; N *= 2) {
            cplx acc = 0.0;
            for (int k = 0; k < N; ++k) {
                const double th = 2.0 * kPi * k / N;
                const cplx e = std::polar(1.0, th);
                acc += w.eval(c + radius * e) * e;
            }
            acc *= radius / static_cast<double>(N);
            if (N > 16 && std::abs(acc - prev) < 1e-10) {
                out.emplace_back(w.pair().x[i], acc);
                converged = true;
                break;
            }
            prev = acc;
        }
        if (!converged) throw std::runtime_error("residue quadrature did not converge");
    }
    return out;
}

namespace {

struct SupportPoint {
    double a, b;  // lattice coordinates relative to the shifted grid origin
    bool is_pole;
};

// Counts windings over a rectangle whose known supports mix both types by
// splitting between the closest opposite-type pair until every piece is
// pure. The counts still come from measured windings of f; the supports only
// steer the refinement.
template <class Func>
void refined_cell_counts(Func& F, const Lattice& L, const detail::CoordRect& rect,
                         std::vector<SupportPoint> pts, const std::vector<cplx>& features, int& zeros,
                         int& poles, int depth) {
    bool has_pole = false, has_zero = false;
    for (const auto& p : pts) (p.is_pole ? has_pole : has_zero) = true;
    if (!has_pole || !has_zero) {
        const int w = detail::rect_winding(F, L, rect, features);
        if (w > 0)
            zeros += w;
        else
            poles -= w;
        return;
    }
    if (depth <= 0) throw detail::ContourFailure("cell refinement depth exhausted");

    // Closest opposite-type pair decides the split axis and position.
    std::size_t bi = 0, bj = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (pts[i].is_pole == pts[j].is_pole) continue;
            const double d2 = std::hypot(pts[i].a - pts[j].a, pts[i].b - pts[j].b);
            if (d2 < best) {
                best = d2;
                bi = i;
                bj = j;
            }
        }
    const bool split_a = std::abs(pts[bi].a - pts[bj].a) >= std::abs(pts[bi].b - pts[bj].b);
    const double lo = split_a ? std::min(pts[bi].a, pts[bj].a) : std::min(pts[bi].b, pts[bj].b);
    const double hi = split_a ? std::max(pts[bi].a, pts[bj].a) : std::max(pts[bi].b, pts[bj].b);
    double split = 0.5 * (lo + hi);
    // Nudge the split line off any support coordinate.
    for (const double t : {0.5, 0.43, 0.57, 0.34, 0.66, 0.21, 0.79}) {
        split = lo + t * (hi - lo);
        bool clear = true;
        for (const auto& p : pts)
            if (std::abs((split_a ? p.a : p.b) - split) < 1e-7) clear = false;
        if (clear) break;
    }

    detail::CoordRect r1 = rect, r2 = rect;
    if (split_a) {
        r1.ahi = split;
        r2.alo = split;
    } else {
        r1.bhi = split;
        r2.blo = split;
    }
    std::vector<SupportPoint> p1, p2;
    for (const auto& p : pts) ((split_a ? p.a : p.b) < split ? p1 : p2).push_back(p);
    refined_cell_counts(F, L, r1, std::move(p1), features, zeros, poles, depth - 1);
    refined_cell_counts(F, L, r2, std::move(p2), features, zeros, poles, depth - 1);
}

}  // namespace

DivisorCount count_divisor(const MeromorphicOneForm& w, int grid) {
    if (grid < 2) throw std::invalid_argument("grid must be at least 2");
    const Lattice& L = w.pair().lattice;
    const cplx tau = L.tau();
    auto F = [&w](cplx z) { return w.entire_numerator(z) / w.entire_denominator(z); };

    // Height of the fundamental cell in each coordinate direction, for
    // converting coordinate margins into genuine distances.
    const double height_b = tau.imag();
    const double height_a = tau.imag() / std::abs(tau);

    std::mt19937_64 rng(0x1234u + static_cast<std::uint64_t>(grid));
    for (int attempt = 0; attempt < 16; ++attempt) {
        const double a0 = detail::uniform01(rng);
        const double b0 = detail::uniform01(rng);

        // Fractional positions of every support point inside the shifted cell.
        std::vector<SupportPoint> pts;
        bool clear = true;
        auto add = [&](const TorusPoint& p, bool is_pole) {
            const double fa = p.a - a0 - std::floor(p.a - a0);
            const double fb = p.b - b0 - std::floor(p.b - b0);
            // Distance from every gridline, not just the cell boundary: each
            // interior edge is a phase-tracking path and needs clearance too.
            const double ga = fa * grid - std::floor(fa * grid);
            const double gb = fb * grid - std::floor(fb * grid);
            const double margin = std::min(std::min(ga, 1.0 - ga) / grid * height_a,
                                           std::min(gb, 1.0 - gb) / grid * height_b);
            if (margin <= kContourClearance) clear = false;
            pts.push_back({fa, fb, is_pole});
        };
        for (const auto& p : w.pair().x) add(p, true);
        for (const auto& p : w.pair().y) add(p, false);
        if (!clear) continue;

        try {
            auto shifted = [&](cplx z) { return F(z + cplx(a0, 0.0) + b0 * tau); };
            std::vector<cplx> features;
            features.reserve(pts.size());
            for (const auto& p : pts) features.push_back(cplx(p.a, 0.0) + p.b * tau);
            const auto windings = detail::grid_windings(shifted, L, 0.0, 0.0, grid, features);

            // Cells holding both a pole and a zero are refined locally.
            std::vector<int> cell_mask(static_cast<std::size_t>(grid) * grid, 0);  // 1 pole, 2 zero, 3 both
            for (const auto& p : pts) {
                const int i = std::min(grid - 1, static_cast<int>(p.a * grid));
                const int j = std::min(grid - 1, static_cast<int>(p.b * grid));
                cell_mask[static_cast<std::size_t>(j) * grid + i] |= p.is_pole ? 1 : 2;
            }

            int zeros = 0, poles = 0;
            for (int j = 0; j < grid; ++j)
                for (int i = 0; i < grid; ++i) {
                    const std::size_t idx = static_cast<std::size_t>(j) * grid + i;
                    if (cell_mask[idx] == 3) {
                        detail::CoordRect rect{static_cast<double>(i) / grid, (i + 1.0) / grid,
                                               static_cast<double>(j) / grid, (j + 1.0) / grid};
                        std::vector<SupportPoint> inside;
                        for (const auto& p : pts)
                            if (p.a >= rect.alo && p.a < rect.ahi && p.b >= rect.blo && p.b < rect.bhi)
                                inside.push_back(p);
                        refined_cell_counts(shifted, L, rect, std::move(inside), features, zeros, poles, 64);
                    } else if (windings[idx] > 0) {
                        zeros += windings[idx];
                    } else {
                        poles -= windings[idx];
                    }
                }
            if (zeros != poles)
                throw detail::ContourFailure("zero and pole counts disagree (charge must cancel on a torus)");
            return {zeros, poles};
        } catch (const detail::ContourFailure&) {
            continue;
        }
    }
    throw std::runtime_error("divisor counting failed after 16 contour attempts");
}

}  // namespace turbulent
