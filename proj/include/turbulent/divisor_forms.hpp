#pragma once

/// \file divisor_forms.hpp
/// Divisor pairs on an elliptic curve, the Abel condition, and meromorphic
/// one-forms with prescribed zero and pole divisors.
///
/// A degree-d pair prescribes pole support x and zero support y (d points
/// each, all simple). The Abel condition (sum x_i - sum y_i in the lattice)
/// holds exactly when a meromorphic function with that divisor exists; the
/// form is represented as a sigma-quotient with an explicit exponential
/// correction exp(kappa*z), kappa computed from the quasi-periods and the
/// nearest lattice vector so the quotient is exactly doubly periodic on the
/// Abel locus. Off the locus the representation still evaluates, and its
/// periodicity defect grows linearly with the Abel defect.

#include <cstdint>
#include <utility>
#include <vector>

#include "turbulent/elliptic.hpp"

namespace turbulent {

/// Minimum torus distance between distinct support points.
inline constexpr double kDistinctThreshold = 1e-6;

/// Required clearance between divisor points and a counting contour.
inline constexpr double kContourClearance = 1e-4;

/// Pole support x, zero support y (d points each) on a common lattice.
/// Construct through make_divisor_pair or sample_divisor_pair so the
/// distinctness and Abel invariants are enforced.
struct DivisorPair {
    int d;
    std::vector<TorusPoint> x;
    std::vector<TorusPoint> y;
    Lattice lattice;
};

struct AbelResult {
    bool verdict;  ///< |defect| < tol
    cplx defect;   ///< sum x_i - sum y_i minus the nearest lattice vector
};

/// Abel condition check. Throws std::invalid_argument on length mismatch.
AbelResult abel_check(const std::vector<TorusPoint>& x, const std::vector<TorusPoint>& y,
                      const Lattice& L, double tol = default_tol());

/// Validating constructor for DivisorPair (distinctness, disjointness, Abel
/// within tol). Throws std::invalid_argument on violation.
DivisorPair make_divisor_pair(std::vector<TorusPoint> x, std::vector<TorusPoint> y, const Lattice& L,
                              double tol = default_tol());

/// Deterministic seeded sampler: x_1..x_d and y_1..y_{d-1} uniform in the
/// fundamental domain, y_d solved from the Abel constraint; resampled until
/// the distinctness invariants hold (at most 1000 attempts).
DivisorPair sample_divisor_pair(int d, const Lattice& L, std::uint64_t seed);

/// Minimum pairwise torus distance over the combined support x and y.
double min_support_distance(const DivisorPair& pair);

/// The sigma-quotient f(z) = scale * prod sigma(z-y_i) / prod sigma(z-x_i)
/// * exp(kappa*z). Zero divisor y, pole divisor x, all simple.
class MeromorphicOneForm {
public:
    MeromorphicOneForm(DivisorPair pair, cplx scale, double abel_tol);

    [[nodiscard]] const DivisorPair& pair() const { return pair_; }
    [[nodiscard]] cplx scale() const { return scale_; }
    /// Period-correction exponent kappa.
    [[nodiscard]] cplx correction() const { return kappa_; }
    /// Abel defect of the pair recorded at construction.
    [[nodiscard]] cplx abel_defect() const { return defect_; }

    /// Coefficient value at a lifted coordinate. Throws std::domain_error
    /// within kPoleProximity (torus distance) of a pole.
    [[nodiscard]] cplx eval(cplx z_lift) const;

    /// Entire numerator scale * prod sigma(z-y_i) * exp(kappa*z); vanishes
    /// exactly on the zero support.
    [[nodiscard]] cplx entire_numerator(cplx z_lift) const;
    /// Entire denominator prod sigma(z-x_i); vanishes exactly on the pole
    /// support. Never zero simultaneously with the numerator.
    [[nodiscard]] cplx entire_denominator(cplx z_lift) const;

    /// Residue at pole x_i by the exact sigma-product formula (sigma'(0)=1).
    /// The public residues() operation is the independent contour route.
    [[nodiscard]] cplx pole_residue(std::size_t i) const;

    /// Lifted supports (fundamental-domain representatives).
    [[nodiscard]] const std::vector<cplx>& pole_lifts() const { return xl_; }
    [[nodiscard]] const std::vector<cplx>& zero_lifts() const { return yl_; }

private:
    DivisorPair pair_;
    cplx scale_;
    cplx kappa_;
    cplx defect_;
    std::vector<cplx> xl_, yl_;
};

/// Builds the sigma-quotient form for the pair. Throws std::invalid_argument if the
/// Abel condition fails at abel_tol, the supports are not disjoint, or
/// scale = 0. A loose abel_tol deliberately admits off-locus pairs so the
/// periodicity-defect growth can be measured.
MeromorphicOneForm build_one_form(const DivisorPair& pair, cplx scale, double abel_tol = default_tol());

/// Coefficient value at a torus point (the form is value * dz in the flat
/// coordinate). Throws std::domain_error near poles.
cplx eval_one_form(const MeromorphicOneForm& w, const TorusPoint& z);

/// Residues at every pole by trapezoidal contour quadrature on circles of
/// the given radius; the quadrature order is doubled until two successive
/// orders differ by less than 1e-10. Throws std::invalid_argument if the
/// radius reaches half the minimum support separation.
std::vector<std::pair<TorusPoint, cplx>> residues(const MeromorphicOneForm& w, double radius);

struct DivisorCount {
    int zeros;
    int poles;
};

/// Argument-principle divisor count over one fundamental cell: per-cell
/// winding numbers on a translated grid x grid subdivision, positive
/// windings counted as zeros and negative as poles. The boundary is
/// re-translated (up to 16 attempts) until every divisor point clears it by
/// kContourClearance; cells whose known supports mix zeros and poles are
/// subdivided locally so opposite charges cannot cancel unseen.
DivisorCount count_divisor(const MeromorphicOneForm& w, int grid);

}  // namespace turbulent
