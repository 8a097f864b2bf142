#pragma once

#include <functional>
#include <string>
#include <vector>

#include "turbulent/common.hpp"
#include "turbulent/elliptic.hpp"

namespace turbulent {

/// 2x2 complex matrix serving both as a Moebius transformation (projective
/// action, determinant nonzero) and as an sl2 Lie-algebra element (trace-free).
struct SL2Element {
    cplx a{0.0}, b{0.0}, c{0.0}, d{0.0};

    cplx trace() const { return a + d; }
    cplx det() const { return a * d - b * c; }
};

using Mobius = SL2Element;

/// A point of the complex projective line.  Finite points carry their affine
/// value; the point at infinity is the homogeneous class [1:0].
struct P1Point {
    cplx w{0.0};
    bool infinite = false;

    static P1Point finite(cplx value) { return {value, false}; }
    static P1Point infinity() { return {cplx(0.0, 0.0), true}; }
};

/// Chordal (Fubini-Study) distance on the projective line; bounded by 1 and
/// finite for every pair including the point at infinity.
double p1_distance(const P1Point& p, const P1Point& q);

/// Fractional-linear action of m on a projective point.  Throws
/// std::invalid_argument when m is degenerate (determinant negligible against
/// the squared entry scale).
P1Point mobius_apply(const Mobius& m, const P1Point& w);

/// Composition in application order: the returned map sends w to
/// second(first(w)).
Mobius mobius_compose(const Mobius& first, const Mobius& second);

Mobius mobius_inverse(const Mobius& m);

Mobius mobius_identity();

/// Killing form K(u, v) = 4 tr(uv) on trace-free matrices.  Throws
/// std::invalid_argument when either argument has a trace exceeding
/// 1e-12 times its entry scale.
cplx killing_form(const SL2Element& u, const SL2Element& v);

/// A trace-free v is nilpotent exactly when K(v, v) = 0, equivalently
/// det(v) = 0; the predicate tests |det| against 1e-12 times the squared
/// entry scale.
bool is_nilpotent(const SL2Element& v);

/// Matrix exponential of a trace-free 2x2 matrix, by the closed form
/// exp(M) = cosh(mu) I + (sinh(mu)/mu) M with mu^2 = -det(M).
Mobius sl2_exp(const SL2Element& m);

/// Flat P1-bundle over the elliptic curve C = C/(Z + tau Z), presented in a
/// trivialization of the pullback to the universal cover: a pair of Moebius
/// monodromies for the periods 1 and tau, plus an sl2-valued connection
/// coefficient on the cover (identically zero by default, in which case
/// parallel transport along cover paths is the identity and all holonomy
/// sits in the monodromies).
class FlatP1Bundle {
  public:
    using ConnectionForm = std::function<SL2Element(cplx)>;

    /// Validates that the monodromies are nondegenerate and commute as
    /// Moebius maps: the matrices must commute up to an overall sign, since
    /// determinant-one representatives of commuting projective maps may
    /// anti-commute.  Residual tolerance 1e-10 against the entry scale.
    FlatP1Bundle(const Lattice& lattice, Mobius monodromy_a, Mobius monodromy_b);
    FlatP1Bundle(const Lattice& lattice, Mobius monodromy_a, Mobius monodromy_b,
                 ConnectionForm form);

    const Lattice& lattice() const { return lattice_; }
    const Mobius& monodromy_a() const { return monodromy_a_; }
    const Mobius& monodromy_b() const { return monodromy_b_; }
    /// Connection coefficient at a point of the universal cover.
    SL2Element connection(cplx z) const;
    bool has_connection_form() const { return static_cast<bool>(form_); }

  private:
    Lattice lattice_;
    Mobius monodromy_a_;
    Mobius monodromy_b_;
    ConnectionForm form_;  // empty means identically zero
};

/// Parallel transport of w0 along a polyline in the universal cover, by
/// integrating the Riccati equation dw/dz = b + 2 a w - c w^2 for connection
/// matrix [[a, b], [c, -a]] (the projectivization of dv/dz = M v).  The
/// integrator flips to the chart u = 1/w whenever |w| exceeds 1, so paths
/// through the point at infinity are regular.  Local error is held below
/// tol per unit path length; unattainable tolerances surface as
/// std::runtime_error on step collapse.
P1Point riccati_transport(const FlatP1Bundle& bundle, const std::vector<cplx>& path,
                          const P1Point& w0, double tol);

/// Section of a flat P1-bundle presented as an equivariant map from the
/// universal cover: s(z + 1) = monodromy_a s(z) and s(z + tau) =
/// monodromy_b s(z).  Construction samples the equivariance residual and
/// rejects mismatched data above 1e-8 chordal distance.
class EquivariantSection {
  public:
    using SectionMap = std::function<P1Point(cplx)>;

    /// pole_reps lists the cover points (one representative each) where the
    /// section passes through infinity; when periodic_poles is set the list
    /// is understood modulo the full period lattice.
    EquivariantSection(const FlatP1Bundle& bundle, SectionMap s, std::vector<cplx> pole_reps,
                       bool periodic_poles, std::string name);

    P1Point operator()(cplx z) const { return s_(z); }
    const std::vector<cplx>& pole_reps() const { return pole_reps_; }
    bool periodic_poles() const { return periodic_poles_; }
    const std::string& name() const { return name_; }

  private:
    SectionMap s_;
    std::vector<cplx> pole_reps_;
    bool periodic_poles_;
    std::string name_;
};

/// Builtin sections: "constant" (parameter: the constant affine value, with
/// monodromies fixing it), "identity" (s(z) = z, translation monodromies),
/// "wp" (the Weierstrass function of the bundle lattice, trivial
/// monodromies).
EquivariantSection make_builtin_section(const FlatP1Bundle& bundle, const std::string& name,
                                        cplx parameter = cplx(0.0, 0.0));

/// Bundle together with a section and the constant deformation datum theta.
/// theta is carried as data (it contributes to dimension counting, not to
/// transport over the curve).
struct ProjectiveTriple {
    FlatP1Bundle bundle;
    EquivariantSection section;
    SL2Element theta;
};

/// Second fundamental form of the section at a cover point z: the derivative
/// of the section minus the vertical vector field of the connection at the
/// section value, computed by Richardson-refined central differences (steps
/// 1e-5 and 1e-6, agreement 1e-7).  The value is taken in the affine chart w
/// when the local section values stay in |w| <= 1 and in the chart u = 1/w
/// otherwise; zeros are chart-independent.  Throws std::runtime_error when
/// the two refinement levels disagree (chart degeneracy at the step scale).
cplx second_fundamental_form(const ProjectiveTriple& t, cplx z);

/// Number of zeros of the second fundamental form in one fundamental domain,
/// counted by the argument principle on a shifted period rectangle with
/// per-cell chart selection (cells containing section poles are counted in
/// the u = 1/w chart).  Throws std::runtime_error when the form is
/// identically zero at probe resolution (max |SFF| < 1e-12) or when no
/// admissible contour is found.
int sff_vanishing_count(const ProjectiveTriple& t, int grid);

/// Developing map: the value of the section at the end of the path,
/// parallel-transported back to the basepoint fiber along the reversed path.
/// With the default zero connection form this is the section value itself.
P1Point develop(const ProjectiveTriple& t, const std::vector<cplx>& path, double tol = 1e-10);

/// Dimension of the space of flat sections of a line bundle of the given
/// degree on the elliptic curve: 1 for degree 0 (constants of the trivial
/// bundle), 0 otherwise (negative degree has no nonzero holomorphic
/// sections; positive degree carries no flat structure).
int flat_quadratic_sections_dim(int deg);

}  // namespace turbulent
