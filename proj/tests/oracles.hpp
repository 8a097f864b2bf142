#pragma once

// Independent verification oracles for the test suite. Everything here is
// deliberately decoupled from the production evaluation path: the Weierstrass
// functions are computed as classical Eisenstein lattice sums organized by
// rows (inner sums over the real direction in exact closed trigonometric
// form, outer truncation over |n| <= N rows with exponentially small tail),
// never through the theta series the library uses.

#include <complex>

#include "turbulent/common.hpp"

namespace oracles {

using turbulent::cplx;
using turbulent::kPi;

inline cplx csc2(cplx w) {
    const cplx s = std::sin(w);
    return 1.0 / (s * s);
}

/// wp(z) for the lattice Z + Z*tau by row-summed Eisenstein series.
inline cplx wp_row(cplx z, cplx tau, int N = 80) {
    const double pi2 = kPi * kPi;
    cplx s = pi2 * csc2(kPi * z) - pi2 / 3.0;
    for (int n = 1; n <= N; ++n) {
        const cplx nt = static_cast<double>(n) * tau;
        s += pi2 * (csc2(kPi * (z - nt)) + csc2(kPi * (z + nt)) - 2.0 * csc2(kPi * nt));
    }
    return s;
}

/// zeta(z), same organization. The cot terms of the +-n rows cancel, leaving
/// the paired closed form below.
inline cplx zeta_row(cplx z, cplx tau, int N = 80) {
    const double pi2 = kPi * kPi;
    const auto cot = [](cplx w) { return std::cos(w) / std::sin(w); };
    cplx s = kPi * cot(kPi * z) + z * pi2 / 3.0;
    for (int n = 1; n <= N; ++n) {
        const cplx nt = static_cast<double>(n) * tau;
        s += kPi * (cot(kPi * (z - nt)) + cot(kPi * (z + nt))) + 2.0 * z * pi2 * csc2(kPi * nt);
    }
    return s;
}

/// sigma(z) as the row-grouped Weierstrass canonical product. The two sine
/// factors are divided through separately; their individual magnitudes grow
/// like exp(pi*n*Im tau) and would overflow as a product.
inline cplx sigma_row(cplx z, cplx tau, int N = 80) {
    const double pi2 = kPi * kPi;
    cplx s = std::sin(kPi * z) / kPi * std::exp(z * z * pi2 / 6.0);
    for (int n = 1; n <= N; ++n) {
        const cplx nt = static_cast<double>(n) * tau;
        const cplx sn = std::sin(kPi * nt);
        s *= (std::sin(kPi * (nt - z)) / sn) * (std::sin(kPi * (nt + z)) / sn) *
             std::exp(z * z * pi2 * csc2(kPi * nt));
    }
    return s;
}

// Reference values frozen from the row-sum oracles evaluated in extended
// precision (inputs are the exact double representations of the literals).
namespace frozen {

inline constexpr cplx z0{0.3, 0.2};  // probe point used with tau = i
inline constexpr cplx wp_z0_i{3.3721036737358194741, -5.9914186004556427622};
inline constexpr cplx wpp_z0_i{12.822790453615712878, 45.83888817832227032};
inline constexpr cplx zeta_z0_i{2.3378955219576280531, -1.6806382500007899313};
inline constexpr cplx sigma_z0_i{0.3046906853087617881, 0.19905799361147396353};

inline constexpr cplx eta1_2i{3.2895927812999898261, 0.0};
inline constexpr cplx eta2_2i{0.0, 0.29600025542039317528};

inline constexpr cplx g2_i{189.07272012923385229, 0.0};
// tau = 0.3 + 1.1i (double literals)
inline constexpr cplx g2_mix{120.05792111801983441, 29.370207407343571561};
inline constexpr cplx g3_mix{332.83105092489658591, -133.24570489453830351};
// tau = exp(i*pi/3): g2 vanishes by hexagonal symmetry, g3 is real
inline constexpr cplx g3_hex{820.82443707955622372, 0.0};

inline constexpr cplx z1{-0.217, 0.83};
inline constexpr cplx wp_z1_2i{-3.3367981070609681312, 0.18605753493145858214};
inline constexpr cplx zeta_z1_2i{-0.75127526898070377651, -0.41726154420926500868};
inline constexpr cplx sigma_z1_mix{-0.11479581414408814965, 0.860327298526828246};

}  // namespace frozen

}  // namespace oracles
