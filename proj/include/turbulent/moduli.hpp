#pragma once

#include <vector>

#include "turbulent/common.hpp"
#include "turbulent/divisor_forms.hpp"

namespace turbulent {

/// Dimension of the moduli space of turbulent data for divisor degree d.
/// Throws std::invalid_argument for d < 2.
int moduli_dimension(int d);

/// Upper bound d + 7 for the dimension of the space of projective quadruples,
/// assembled from its four summands: 1 bundle class, at most 3 connections,
/// at most 3 deformation parameters, and d section parameters.
int quadruple_bound(int d);

struct DimensionReport {
    int d;
    int dim_moduli;            // 2d
    int dim_quadruples_bound;  // d + 7
    bool obstructed;           // d + 7 < 2d
    int margin;                // 2d - (d + 7)
};

/// Compares the moduli dimension against the quadruple bound; obstruction
/// (margin > 0) first occurs at d = 8.  Throws for d < 2 via
/// moduli_dimension.
DimensionReport obstruction_report(int d);

/// Numerical complex rank of a rows x cols matrix given in row-major order:
/// singular values below 1e-6 times the largest count as zero.  Throws
/// std::runtime_error when the spectrum is ill-conditioned for thresholding
/// (the gap across the rank boundary is narrower than a factor of 10).
int numerical_rank(const std::vector<cplx>& row_major, int rows, int cols);

/// Rank of the finite-difference Jacobian of the constraint map
/// (x, y) -> sum x_i - sum y_i at the pair, with central differences of
/// step h on lifted support coordinates.  Returns 1 for every valid pair:
/// the constraint cuts exactly one complex dimension.  h must lie in
/// [1e-7, 1e-3].
int abel_constraint_rank(const DivisorPair& pair, double h);

/// A point of the moduli space: the divisor pair with the two complex
/// coefficients, and a flag recording gauge normalization.
struct ModuliPoint {
    DivisorPair pair;
    cplx scale;
    cplx beta_coeff;
    bool gauge_fixed;
};

/// Validates nonzero coefficients.
ModuliPoint make_moduli_point(DivisorPair pair, cplx scale, cplx beta_coeff);

/// Representative with beta_coeff = 1: the diagonal scaling freedom moves
/// entirely into the form scale.
ModuliPoint gauge_fix(const ModuliPoint& p);

}  // namespace turbulent
