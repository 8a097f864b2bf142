#include "turbulent/batch.hpp"

#include <cmath>
#include <cstddef>
#include <exception>
#include <stdexcept>

#include "turbulent/moduli.hpp"

namespace turbulent::batch {
namespace {

/// Runs body(i) for i in [0, n), parallel over items, capturing the first
/// work-item exception and rethrowing it after the join (an exception
/// escaping an OpenMP region would terminate).
template <typename Body>
void parallel_items(std::int64_t n, const Body& body) {
    std::exception_ptr eptr = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical
            if (!eptr) eptr = std::current_exception();
        }
    }
    if (eptr) std::rethrow_exception(eptr);
}

template <typename Body>
void serial_items(std::int64_t n, const Body& body) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

double periodicity_item(int d, const Lattice& L, std::uint64_t seed, int probes,
                        double y_perturbation) {
    DivisorPair pair = sample_divisor_pair(d, L, seed);
    double abel_tol = default_tol();
    if (y_perturbation != 0.0) {
        pair.y.back().a += y_perturbation;
        abel_tol = 1.0;
    }
    const MeromorphicOneForm form = build_one_form(pair, cplx(1.0, 0.0), abel_tol);
    return periodicity_residual(form, probes);
}

double kernel_item(const TurbulentFoliation& F, const TorusPoint& c) {
    const LineDirection dir = line_field(F, c, TorusPoint{0.0, 0.0});
    const cplx z = lift(c, F.lattice_c());
    const cplx num = F.omega.entire_numerator(z);
    const cplx den = F.omega.entire_denominator(z);
    const double scale = std::max(std::abs(num), std::abs(den));
    return std::abs(num * dir.v_c + F.beta * den * dir.v_x) / scale;
}

int rank_item(int d, const Lattice& L, std::uint64_t seed, double h) {
    return abel_constraint_rank(sample_divisor_pair(d, L, seed), h);
}

}  // namespace

double periodicity_residual(const MeromorphicOneForm& form, int probes) {
    if (probes < 1) throw std::invalid_argument("periodicity residual requires probes >= 1");
    const DivisorPair& pair = form.pair();
    const Lattice& L = pair.lattice;
    const cplx tau = L.tau();
    double residual = 0.0;
    int used = 0;
    for (int k = 0; used < probes && k < 4 * probes + 24; ++k) {
        const TorusPoint p{std::fmod(0.17 + 0.37 * k, 1.0), std::fmod(0.29 + 0.31 * k, 1.0)};
        bool clear = true;
        for (const TorusPoint& s : pair.x)
            if (torus_distance(p, s, L) < 1e-3) clear = false;
        for (const TorusPoint& s : pair.y)
            if (torus_distance(p, s, L) < 1e-3) clear = false;
        if (!clear) continue;
        ++used;
        const cplx z = lift(p, L);
        const cplx f0 = form.eval(z);
        const double scale = std::max(1.0, std::abs(f0));
        residual = std::max(residual, std::abs(form.eval(z + 1.0) - f0) / scale);
        residual = std::max(residual, std::abs(form.eval(z + tau) - f0) / scale);
    }
    if (used == 0) throw std::runtime_error("no probe point cleared the divisor support");
    return residual;
}

std::vector<double> periodicity_residuals(int d, const Lattice& L,
                                          const std::vector<std::uint64_t>& seeds, int probes,
                                          double y_perturbation) {
    std::vector<double> out(seeds.size());
    parallel_items(static_cast<std::int64_t>(seeds.size()), [&](std::int64_t i) {
        out[i] = periodicity_item(d, L, seeds[i], probes, y_perturbation);
    });
    return out;
}

std::vector<double> periodicity_residuals_serial(int d, const Lattice& L,
                                                 const std::vector<std::uint64_t>& seeds,
                                                 int probes, double y_perturbation) {
    std::vector<double> out(seeds.size());
    serial_items(static_cast<std::int64_t>(seeds.size()), [&](std::int64_t i) {
        out[i] = periodicity_item(d, L, seeds[i], probes, y_perturbation);
    });
    return out;
}

std::vector<double> kernel_residuals(const TurbulentFoliation& F,
                                     const std::vector<TorusPoint>& points) {
    std::vector<double> out(points.size());
    parallel_items(static_cast<std::int64_t>(points.size()),
                   [&](std::int64_t i) { out[i] = kernel_item(F, points[i]); });
    return out;
}

std::vector<double> kernel_residuals_serial(const TurbulentFoliation& F,
                                            const std::vector<TorusPoint>& points) {
    std::vector<double> out(points.size());
    serial_items(static_cast<std::int64_t>(points.size()),
                 [&](std::int64_t i) { out[i] = kernel_item(F, points[i]); });
    return out;
}

std::vector<LeafTrace> trace_many(const TurbulentFoliation& F,
                                  const std::vector<std::pair<TorusPoint, TorusPoint>>& starts,
                                  double horizon, double step_tol) {
    if (step_tol <= 0.0) throw std::invalid_argument("step tolerance must be positive");
    if (horizon < 0.0) throw std::invalid_argument("horizon must be nonnegative");
    std::vector<LeafTrace> out(starts.size());
    parallel_items(static_cast<std::int64_t>(starts.size()), [&](std::int64_t i) {
        out[i] = trace_leaf(F, starts[i].first, starts[i].second, horizon, step_tol);
    });
    return out;
}

std::vector<LeafTrace> trace_many_serial(
    const TurbulentFoliation& F, const std::vector<std::pair<TorusPoint, TorusPoint>>& starts,
    double horizon, double step_tol) {
    if (step_tol <= 0.0) throw std::invalid_argument("step tolerance must be positive");
    if (horizon < 0.0) throw std::invalid_argument("horizon must be nonnegative");
    std::vector<LeafTrace> out(starts.size());
    serial_items(static_cast<std::int64_t>(starts.size()), [&](std::int64_t i) {
        out[i] = trace_leaf(F, starts[i].first, starts[i].second, horizon, step_tol);
    });
    return out;
}

std::vector<int> rank_sweep(int d, const Lattice& L, const std::vector<std::uint64_t>& seeds,
                            double h) {
    std::vector<int> out(seeds.size());
    parallel_items(static_cast<std::int64_t>(seeds.size()),
                   [&](std::int64_t i) { out[i] = rank_item(d, L, seeds[i], h); });
    return out;
}

std::vector<int> rank_sweep_serial(int d, const Lattice& L, const std::vector<std::uint64_t>& seeds,
                                   double h) {
    std::vector<int> out(seeds.size());
    serial_items(static_cast<std::int64_t>(seeds.size()),
                 [&](std::int64_t i) { out[i] = rank_item(d, L, seeds[i], h); });
    return out;
}

}  // namespace turbulent::batch
