#pragma once

#include <complex>
#include <cstdint>
#include <cstdlib>

namespace turbulent {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Module-wide default tolerance (1e-9), overridable through the
/// TURBULENT_DEFAULT_TOL environment variable. Read once per process.
inline double default_tol() {
    static const double tol = [] {
        if (const char* s = std::getenv("TURBULENT_DEFAULT_TOL")) {
            char* end = nullptr;
            const double v = std::strtod(s, &end);
            if (end != s && v > 0.0) return v;
        }
        return 1e-9;
    }();
    return tol;
}

namespace detail {

/// Uniform double in [0,1) from a 64-bit generator draw. Uses the top 53
/// bits so the stream is identical across standard library implementations
/// (std::uniform_real_distribution makes no such guarantee).
template <class Rng>
double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

}  // namespace turbulent
