#include "turbulent/moduli.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>
#include <utility>

#include "turbulent/elliptic.hpp"

namespace turbulent {

int moduli_dimension(int d) {
    if (d < 2) throw std::invalid_argument("moduli dimension requires divisor degree at least 2");
    return 2 * d;
}

int quadruple_bound(int d) {
    constexpr int kBundleClasses = 1;
    constexpr int kConnectionBound = 3;
    constexpr int kDeformationBound = 3;
    return kBundleClasses + kConnectionBound + kDeformationBound + d;
}

DimensionReport obstruction_report(int d) {
    DimensionReport r;
    r.d = d;
    r.dim_moduli = moduli_dimension(d);
    r.dim_quadruples_bound = quadruple_bound(d);
    r.obstructed = r.dim_quadruples_bound < r.dim_moduli;
    r.margin = r.dim_moduli - r.dim_quadruples_bound;
    return r;
}

int numerical_rank(const std::vector<cplx>& row_major, int rows, int cols) {
    if (rows < 1 || cols < 1 || row_major.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("matrix dimensions do not match the value count");
    Eigen::MatrixXcd A(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) A(i, j) = row_major[static_cast<std::size_t>(i) * cols + j];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto& sv = svd.singularValues();
    const double largest = sv(0);
    if (largest == 0.0) return 0;
    const double threshold = 1e-6 * largest;
    int rank = 0;
    while (rank < sv.size() && sv(rank) > threshold) ++rank;
    if (rank < sv.size() && sv(rank) > 0.0) {
        const double kept = rank > 0 ? sv(rank - 1) : largest;
        if (kept / sv(rank) < 10.0)
            throw std::runtime_error(
                "rank ill-conditioned: singular values within 10x across the rank gap");
    }
    return rank;
}

int abel_constraint_rank(const DivisorPair& pair, double h) {
    if (!(h >= 1e-7 && h <= 1e-3))
        throw std::invalid_argument("finite-difference step must lie in [1e-7, 1e-3]");
    const Lattice& L = pair.lattice;
    const int d = static_cast<int>(pair.x.size());

    // Lifted support coordinates; the constraint map is sum(x) - sum(y).
    std::vector<cplx> lifts;
    lifts.reserve(2 * static_cast<std::size_t>(d));
    for (const auto& p : pair.x) lifts.push_back(lift(p, L));
    for (const auto& p : pair.y) lifts.push_back(lift(p, L));

    auto constraint = [&](const std::vector<cplx>& z) {
        cplx sum = 0.0;
        for (int i = 0; i < d; ++i) sum += z[static_cast<std::size_t>(i)];
        for (int i = 0; i < d; ++i) sum -= z[static_cast<std::size_t>(d + i)];
        return sum;
    };

    std::vector<cplx> jacobian(2 * static_cast<std::size_t>(d));
    std::vector<cplx> probe = lifts;
    for (int k = 0; k < 2 * d; ++k) {
        probe[static_cast<std::size_t>(k)] = lifts[static_cast<std::size_t>(k)] + h;
        const cplx fp = constraint(probe);
        probe[static_cast<std::size_t>(k)] = lifts[static_cast<std::size_t>(k)] - h;
        const cplx fm = constraint(probe);
        probe[static_cast<std::size_t>(k)] = lifts[static_cast<std::size_t>(k)];
        jacobian[static_cast<std::size_t>(k)] = (fp - fm) / (2.0 * h);
    }
    return numerical_rank(jacobian, 1, 2 * d);
}

ModuliPoint make_moduli_point(DivisorPair pair, cplx scale, cplx beta_coeff) {
    if (scale == cplx(0.0, 0.0)) throw std::invalid_argument("scale must be nonzero");
    if (beta_coeff == cplx(0.0, 0.0)) throw std::invalid_argument("beta_coeff must be nonzero");
    return ModuliPoint{std::move(pair), scale, beta_coeff, beta_coeff == cplx(1.0, 0.0)};
}

ModuliPoint gauge_fix(const ModuliPoint& p) {
    if (p.gauge_fixed && p.beta_coeff == cplx(1.0, 0.0)) return p;
    return ModuliPoint{p.pair, p.scale / p.beta_coeff, cplx(1.0, 0.0), true};
}

}  // namespace turbulent
