#pragma once

/// \file elliptic.hpp
/// Complex lattices and Weierstrass functions.
///
/// A lattice is Z + Z*tau with Im(tau) > 0. Construction normalizes the
/// modulus into the classical fundamental domain (|Re tau| <= 1/2,
/// |tau| >= 1) and records the SL(2,Z) transformation used; all torus
/// coordinates are interpreted in the normalized basis.
///
/// Evaluation of sigma, zeta, wp and wp' goes through the theta-1 series in
/// the nome q = exp(i*pi*tau). After normalization |q| <= exp(-pi*sqrt(3)/2),
/// so a handful of terms reach full double accuracy. Arguments are first
/// reduced to the centered fundamental cell and the value is extended by the
/// exact quasi-periodicity laws, which keeps the series argument small for
/// every input, not only near the origin.
///
/// Quasi-period convention: eta1 = 2*zeta(1/2), eta2 = 2*zeta(tau/2), with
/// the Legendre relation fixed as eta1*tau - eta2 = 2*pi*i for Im(tau) > 0.

#include <stdexcept>

#include "turbulent/common.hpp"

namespace turbulent {

/// Distance below which wp/wp'/zeta refuse to evaluate (simple/triple poles
/// on the lattice); callers must reroute instead of absorbing huge values.
inline constexpr double kPoleProximity = 1e-8;

/// Basis change recorded by lattice normalization:
/// tau_normalized = (a*tau_input + b) / (c*tau_input + d), a*d - b*c = 1.
struct ModularRecord {
    long a = 1, b = 0, c = 0, d = 1;
    [[nodiscard]] bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
};

/// Lattice invariants and quasi-periods for periods (1, tau).
struct WeierstrassCache {
    cplx g2;               ///< Eisenstein invariant g2.
    cplx g3;               ///< Eisenstein invariant g3.
    cplx eta1;             ///< Quasi-period of zeta over period 1.
    cplx eta2;             ///< Quasi-period of zeta over period tau.
    int truncation_order;  ///< Largest series order used while filling the cache.
};

/// Point of the torus C/(Z + Z*tau), stored as coordinates (a, b) in [0,1)
/// with lift a + b*tau.
struct TorusPoint {
    double a = 0.0;
    double b = 0.0;
};

/// The lattice Z + Z*tau, normalized at construction.
class Lattice {
public:
    /// Normalizes the modulus and precomputes invariants and theta
    /// coefficients. Throws std::invalid_argument if Im(tau) <= 0.
    explicit Lattice(cplx tau);

    /// Normalized modulus (satisfies |Re| <= 1/2, |tau| >= 1).
    [[nodiscard]] cplx tau() const { return tau_; }
    /// Modulus as given to the constructor.
    [[nodiscard]] cplx tau_input() const { return tau_input_; }
    /// Transformation with tau() = (a*tau_input + b)/(c*tau_input + d).
    [[nodiscard]] const ModularRecord& transform() const { return transform_; }
    /// Invariants computed at construction (machine-accuracy truncation).
    [[nodiscard]] const WeierstrassCache& cache() const { return cache_; }

    /// Nome q = exp(i*pi*tau) of the normalized modulus.
    [[nodiscard]] cplx nome() const { return nome_; }

    /// theta_1'(0), cached for the sigma normalization.
    [[nodiscard]] cplx theta1_prime0() const { return theta0_d1_; }

private:
    cplx tau_;
    cplx tau_input_;
    ModularRecord transform_;
    cplx nome_;
    cplx theta0_d1_;
    WeierstrassCache cache_;
};

/// Reduces z modulo the lattice to coordinates in [0,1)^2.
TorusPoint reduce_point(cplx z, const Lattice& L);

/// Lift a + b*tau of a torus point.
cplx lift(const TorusPoint& p, const Lattice& L);

/// Distance from z to the nearest lattice point of L.
double lattice_distance(cplx z, const Lattice& L);

/// Geodesic (flat metric) distance between two torus points.
double torus_distance(const TorusPoint& p, const TorusPoint& q, const Lattice& L);

/// Recomputes the invariant cache and verifies its invariants (Legendre
/// relation residual, nonzero discriminant) to the given tolerance.
/// Throws std::runtime_error if the series or the checks fail at tol.
WeierstrassCache lattice_invariants(const Lattice& L, double tol);

/// Weierstrass wp. Throws std::domain_error within kPoleProximity of the
/// lattice. Accurate to 1e-10 relative within two fundamental domains
/// (and beyond, by exact quasi-periodic reduction).
cplx wp(cplx z, const Lattice& L);

/// Derivative wp'. Same domain contract as wp.
cplx wp_prime(cplx z, const Lattice& L);

/// Weierstrass zeta. Same domain contract as wp.
cplx zeta_w(cplx z, const Lattice& L);

/// Weierstrass sigma. Entire; defined for every z.
cplx sigma_w(cplx z, const Lattice& L);

namespace detail {

/// theta_1 and its first three derivatives at v (internal evaluation kernel;
/// exposed for the test suite).
struct Theta1Values {
    cplx t1, d1, d2, d3;
    int order;  ///< Index of the last series term added.
};

Theta1Values theta1_all(cplx v, const Lattice& L);

/// Centered remainder: z = w + m + n*tau with coordinates of w in [-1/2,1/2).
struct CenteredReduction {
    cplx w;
    long m, n;
};

CenteredReduction reduce_centered(cplx z, const Lattice& L);

}  // namespace detail

}  // namespace turbulent
