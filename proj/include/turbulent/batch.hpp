#pragma once

/// \file batch.hpp
/// OpenMP-parallel batch kernels with serial reference implementations.
/// Every work item is independent and deterministic and each output slot is
/// written exactly once, so the parallel and serial routes compute
/// bit-identical results; the *_serial twins exist so tests can assert that
/// equality and the benchmark can compare wall time.
///
/// Kernels validate their shared arguments before entering the parallel
/// region; an exception thrown by a work item is captured and rethrown
/// after the loop joins.

#include <cstdint>
#include <utility>
#include <vector>

#include "turbulent/divisor_forms.hpp"
#include "turbulent/foliation.hpp"

namespace turbulent::batch {

/// Maximum semi-relative double-periodicity residual of the form over a
/// deterministic probe set clear of the divisor support (residuals are
/// scaled by max(1, |f|)). Throws std::invalid_argument for probes < 1 and
/// std::runtime_error when no probe clears the support.
double periodicity_residual(const MeromorphicOneForm& form, int probes);

/// For each seed: sample a degree-d pair on L, shift the Abel-solved zero
/// y_d by `y_perturbation` in its first coordinate (0 keeps the pair on the
/// Abel locus), build the sigma-quotient form, and measure
/// periodicity_residual over `probes` points. Perturbed pairs are admitted
/// with a unit Abel tolerance so the off-locus defect is measured rather
/// than rejected.
std::vector<double> periodicity_residuals(int d, const Lattice& L,
                                          const std::vector<std::uint64_t>& seeds, int probes,
                                          double y_perturbation = 0.0);
std::vector<double> periodicity_residuals_serial(int d, const Lattice& L,
                                                 const std::vector<std::uint64_t>& seeds,
                                                 int probes, double y_perturbation = 0.0);

/// Homogeneous kernel residual of the leaf direction at each point:
/// |N(c) v_c + beta D(c) v_x| / max(|N(c)|, |D(c)|) where omega = N/D is
/// the entire numerator/denominator split. Pole-safe: at poles the
/// direction is exactly vertical and the residual is exactly zero.
std::vector<double> kernel_residuals(const TurbulentFoliation& F,
                                     const std::vector<TorusPoint>& points);
std::vector<double> kernel_residuals_serial(const TurbulentFoliation& F,
                                            const std::vector<TorusPoint>& points);

/// Traces one leaf per start (c0, x0), all with the same horizon and step
/// tolerance.
std::vector<LeafTrace> trace_many(const TurbulentFoliation& F,
                                  const std::vector<std::pair<TorusPoint, TorusPoint>>& starts,
                                  double horizon, double step_tol);
std::vector<LeafTrace> trace_many_serial(const TurbulentFoliation& F,
                                         const std::vector<std::pair<TorusPoint, TorusPoint>>& starts,
                                         double horizon, double step_tol);

/// Abel-constraint rank of a freshly sampled degree-d pair for each seed.
std::vector<int> rank_sweep(int d, const Lattice& L, const std::vector<std::uint64_t>& seeds,
                            double h);
std::vector<int> rank_sweep_serial(int d, const Lattice& L,
                                   const std::vector<std::uint64_t>& seeds, double h);

}  // namespace turbulent::batch
