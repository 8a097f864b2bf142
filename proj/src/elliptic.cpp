#include "turbulent/elliptic.hpp"

#include <algorithm>
#include <cmath>

namespace turbulent {

namespace {

constexpr int kMaxThetaOrder = 64;
constexpr double kSeriesRelStop = 1e-16;

// Modular reduction of the modulus into |Re| <= 1/2, |tau| >= 1, recording
// the accumulated SL(2,Z) map tau_out = (a*tau_in + b)/(c*tau_in + d).
std::pair<cplx, ModularRecord> normalize_modulus(cplx tau) {
    ModularRecord M;
    for (int iter = 0; iter < 64; ++iter) {
        const long k = static_cast<long>(std::floor(tau.real() + 0.5));
        if (k != 0) {
            tau -= static_cast<double>(k);
            M.a -= k * M.c;
            M.b -= k * M.d;
        }
        if (std::abs(tau) < 1.0 - 1e-15) {
            tau = -1.0 / tau;
            M = ModularRecord{-M.c, -M.d, M.a, M.b};
            continue;
        }
        return {tau, M};
    }
    throw std::runtime_error("modular normalization did not terminate");
}

// Eisenstein series E4, E6 by Lambert sums in qt = q^2; |qt| <= exp(-pi*sqrt(3))
// after normalization, so convergence is geometric and fast.
struct EisensteinPair {
    cplx e4, e6;
    int order;
};

EisensteinPair eisenstein(cplx qt) {
    cplx A = 0.0, B = 0.0;
    cplx qk = 1.0;
    int k = 1;
    for (; k <= 200; ++k) {
        qk *= qt;
        const double k3 = static_cast<double>(k) * k * k;
        A += k3 * qk / (1.0 - qk);
        B += k3 * k * k * qk / (1.0 - qk);
        if (k3 * k * k * std::abs(qk) < kSeriesRelStop * (1.0 + std::abs(B))) break;
    }
    if (k > 200) throw std::runtime_error("eisenstein series did not converge");
    return {1.0 + 240.0 * A, 1.0 - 504.0 * B, k};
}

cplx discriminant_product(cplx qt) {
    // (2*pi)^12 * qt * prod (1-qt^n)^24: cancellation-free form of g2^3-27*g3^2.
    cplx prod = 1.0, qn = 1.0;
    for (int n = 1; n <= 200; ++n) {
        qn *= qt;
        const cplx f = 1.0 - qn;
        const cplx f3 = f * f * f;
        const cplx f6 = f3 * f3;
        const cplx f12 = f6 * f6;
        prod *= f12 * f12;
        if (std::abs(qn) < 1e-18) break;
    }
    const double tp = 2.0 * kPi;
    double tp12 = tp * tp * tp;  // (2pi)^3
    tp12 = tp12 * tp12;          // ^6
    tp12 = tp12 * tp12;          // ^12
    return tp12 * qt * prod;
}

}  // namespace

namespace detail {

CenteredReduction reduce_centered(cplx z, const Lattice& L) {
    const cplx tau = L.tau();
    const double beta = z.imag() / tau.imag();
    const double alpha = z.real() - beta * tau.real();
    const long n = static_cast<long>(std::floor(beta + 0.5));
    const long m = static_cast<long>(std::floor(alpha + 0.5));
    const cplx w = (alpha - static_cast<double>(m)) + (beta - static_cast<double>(n)) * tau;
    return {w, m, n};
}

Theta1Values theta1_all(cplx v, const Lattice& L) {
    const cplx q = L.nome();
    const cplx q2 = q * q;
    const cplx E = std::exp(cplx(0.0, 1.0) * v);
    const cplx E2 = E * E;

    cplx t1 = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
    cplx P = E;            // E^(2n+1)
    cplx qp = std::pow(q, 0.25);  // q^((n+1/2)^2)
    cplx qstep = q2;       // q^(2n+2): qp_{n+1} = qp_n * qstep_n
    double sign = 1.0;
    int small_in_a_row = 0;
    int n = 0;
    for (; n < kMaxThetaOrder; ++n) {
        const cplx Pinv = 1.0 / P;
        const cplx sv = (P - Pinv) * cplx(0.0, -0.5);  // sin((2n+1)v)
        const cplx cv = (P + Pinv) * 0.5;              // cos((2n+1)v)
        const double k = 2.0 * n + 1.0;
        const cplx base = sign * qp;
        const cplx ts = base * sv;
        const cplx tc = base * cv;
        t1 += ts;
        d1 += k * tc;
        d2 -= k * k * ts;
        d3 -= k * k * k * tc;

        const double scale = std::abs(t1) + std::abs(d1) + std::abs(d2) + std::abs(d3);
        const double tmax = std::max(std::abs(ts), std::abs(tc)) * (1.0 + k * k * k);
        if (tmax < kSeriesRelStop * scale) {
            if (++small_in_a_row >= 2) break;
        } else {
            small_in_a_row = 0;
        }

        P *= E2;
        qp *= qstep;
        qstep *= q2;
        sign = -sign;
    }
    if (n >= kMaxThetaOrder) throw std::runtime_error("theta series did not converge within order 64");
    return {2.0 * t1, 2.0 * d1, 2.0 * d2, 2.0 * d3, n};
}

}  // namespace detail

Lattice::Lattice(cplx tau) : tau_input_(tau) {
    if (!(tau.imag() > 0.0)) throw std::invalid_argument("lattice modulus must have positive imaginary part");
    auto [t, M] = normalize_modulus(tau);
    tau_ = t;
    transform_ = M;
    nome_ = std::exp(cplx(0.0, kPi) * tau_);

    // Invariants at construction: eta1 from the theta expansion at 0, eta2
    // computed independently at tau/2 so the Legendre relation stays a check.
    const auto th0 = detail::theta1_all(0.0, *this);
    theta0_d1_ = th0.d1;
    cache_.eta1 = -kPi * kPi * th0.d3 / (3.0 * th0.d1);
    const cplx vh = kPi * tau_ * 0.5;
    const auto thh = detail::theta1_all(vh, *this);
    cache_.eta2 = cache_.eta1 * tau_ + 2.0 * kPi * thh.d1 / thh.t1;

    const auto eis = eisenstein(nome_ * nome_);
    const double pi2 = kPi * kPi;
    const double pi4 = pi2 * pi2;
    cache_.g2 = (4.0 * pi4 / 3.0) * eis.e4;
    cache_.g3 = (8.0 * pi4 * pi2 / 27.0) * eis.e6;
    cache_.truncation_order = std::max({th0.order, thh.order, eis.order});
}

TorusPoint reduce_point(cplx z, const Lattice& L) {
    const cplx tau = L.tau();
    const double b0 = z.imag() / tau.imag();
    const double a0 = z.real() - b0 * tau.real();
    double a = a0 - std::floor(a0);
    double b = b0 - std::floor(b0);
    if (a >= 1.0) a = 0.0;
    if (b >= 1.0) b = 0.0;
    return {a, b};
}

cplx lift(const TorusPoint& p, const Lattice& L) { return cplx(p.a, 0.0) + p.b * L.tau(); }

double lattice_distance(cplx z, const Lattice& L) {
    const auto red = detail::reduce_centered(z, L);
    double best = std::abs(red.w);
    for (int j = -1; j <= 1; ++j)
        for (int k = -1; k <= 1; ++k)
            best = std::min(best, std::abs(red.w - (static_cast<double>(j) + static_cast<double>(k) * L.tau())));
    return best;
}

double torus_distance(const TorusPoint& p, const TorusPoint& q, const Lattice& L) {
    return lattice_distance(lift(p, L) - lift(q, L), L);
}

WeierstrassCache lattice_invariants(const Lattice& L, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const WeierstrassCache& c = L.cache();
    const cplx legendre = c.eta1 * L.tau() - c.eta2 - cplx(0.0, 2.0 * kPi);
    if (std::abs(legendre) > tol) throw std::runtime_error("legendre relation residual exceeds tolerance");
    cplx disc = c.g2 * c.g2 * c.g2 - 27.0 * c.g3 * c.g3;
    if (std::abs(disc) <= 1e-12 * std::max(1.0, std::abs(c.g2 * c.g2 * c.g2))) {
        // The polynomial form cancels catastrophically for very elongated
        // lattices; the eta-product form of the discriminant never does.
        disc = discriminant_product(L.nome() * L.nome());
    }
    if (!(std::abs(disc) > 0.0)) throw std::runtime_error("degenerate lattice: vanishing discriminant");
    return c;
}

namespace {

void require_off_lattice(cplx z, const Lattice& L) {
    if (lattice_distance(z, L) < kPoleProximity)
        throw std::domain_error("argument within pole-proximity threshold of a lattice point");
}

}  // namespace

cplx wp(cplx z, const Lattice& L) {
    require_off_lattice(z, L);
    const auto red = detail::reduce_centered(z, L);
    const auto th = detail::theta1_all(kPi * red.w, L);
    const cplx r = th.d1 / th.t1;
    const cplx Lp = th.d2 / th.t1 - r * r;  // (log theta1)''
    return -L.cache().eta1 - kPi * kPi * Lp;
}

cplx wp_prime(cplx z, const Lattice& L) {
    require_off_lattice(z, L);
    const auto red = detail::reduce_centered(z, L);
    const auto th = detail::theta1_all(kPi * red.w, L);
    const cplx r = th.d1 / th.t1;
    const cplx Lpp = th.d3 / th.t1 - 3.0 * th.d2 * r / th.t1 + 2.0 * r * r * r;  // (log theta1)'''
    return -kPi * kPi * kPi * Lpp;
}

cplx zeta_w(cplx z, const Lattice& L) {
    require_off_lattice(z, L);
    const auto red = detail::reduce_centered(z, L);
    const auto th = detail::theta1_all(kPi * red.w, L);
    const WeierstrassCache& c = L.cache();
    return c.eta1 * red.w + kPi * th.d1 / th.t1 + static_cast<double>(red.m) * c.eta1 +
           static_cast<double>(red.n) * c.eta2;
}

cplx sigma_w(cplx z, const Lattice& L) {
    const auto red = detail::reduce_centered(z, L);
    const auto th = detail::theta1_all(kPi * red.w, L);
    const WeierstrassCache& c = L.cache();
    const cplx sigma0 = std::exp(0.5 * c.eta1 * red.w * red.w) * th.t1 / (kPi * L.theta1_prime0());
    if (red.m == 0 && red.n == 0) return sigma0;
    const cplx omega = static_cast<double>(red.m) + static_cast<double>(red.n) * L.tau();
    const cplx eta = static_cast<double>(red.m) * c.eta1 + static_cast<double>(red.n) * c.eta2;
    const long par = ((red.m + red.n + red.m * red.n) % 2 + 2) % 2;
    const double sign = par == 0 ? 1.0 : -1.0;
    return sign * std::exp(eta * (red.w + 0.5 * omega)) * sigma0;
}

}  // namespace turbulent
