// Benchmark comparing the OpenMP batch kernels against their serial
// reference implementations. Results must be bit-identical; the interesting
// number is the wall-time ratio at the active thread count.

#include <omp.h>

#include <cstdint>
#include <cstdio>
#include <random>
#include <utility>
#include <vector>

#include "turbulent/batch.hpp"

using namespace turbulent;

namespace {

template <typename F>
double timed(const F& f) {
    const double t0 = omp_get_wtime();
    f();
    return omp_get_wtime() - t0;
}

void report(const char* name, std::size_t items, double serial, double parallel, bool equal) {
    std::printf("%-22s items=%-6zu serial=%8.3fs parallel=%8.3fs speedup=%5.2fx equal=%s\n", name,
                items, serial, parallel, parallel > 0.0 ? serial / parallel : 0.0,
                equal ? "yes" : "NO");
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    const Lattice L(cplx(0.0, 1.0));

    {
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t s = 1; s <= 64; ++s) seeds.push_back(s);
        std::vector<double> a, b;
        const double ts = timed([&] { a = batch::periodicity_residuals_serial(5, L, seeds, 16); });
        const double tp = timed([&] { b = batch::periodicity_residuals(5, L, seeds, 16); });
        report("periodicity_residuals", seeds.size(), ts, tp, a == b);
    }

    {
        const TurbulentFoliation F = build_turbulent(
            build_one_form(sample_divisor_pair(3, L, 7), cplx(1.0, 0.0)), cplx(1.0, 0.0), L);
        std::mt19937_64 rng(5);
        std::vector<TorusPoint> pts;
        for (int i = 0; i < 200000; ++i)
            pts.push_back({detail::uniform01(rng), detail::uniform01(rng)});
        std::vector<double> a, b;
        const double ts = timed([&] { a = batch::kernel_residuals_serial(F, pts); });
        const double tp = timed([&] { b = batch::kernel_residuals(F, pts); });
        report("kernel_residuals", pts.size(), ts, tp, a == b);
    }

    {
        const TurbulentFoliation F = build_turbulent(
            build_one_form(sample_divisor_pair(2, L, 1), cplx(1.0, 0.0)), cplx(1.0, 0.0), L);
        std::vector<std::pair<TorusPoint, TorusPoint>> starts;
        std::mt19937_64 rng(17);
        for (int i = 0; i < 16; ++i)
            starts.emplace_back(TorusPoint{detail::uniform01(rng), detail::uniform01(rng)},
                                TorusPoint{detail::uniform01(rng), detail::uniform01(rng)});
        std::vector<LeafTrace> a, b;
        const double ts = timed([&] { a = batch::trace_many_serial(F, starts, 10.0, 1e-9); });
        const double tp = timed([&] { b = batch::trace_many(F, starts, 10.0, 1e-9); });
        bool equal = a.size() == b.size();
        for (std::size_t i = 0; equal && i < a.size(); ++i)
            equal = a[i].drift == b[i].drift && a[i].t_reached == b[i].t_reached &&
                    a[i].samples.size() == b[i].samples.size();
        report("trace_many", starts.size(), ts, tp, equal);
    }

    {
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t s = 1; s <= 32; ++s) seeds.push_back(s);
        std::vector<int> a, b;
        const double ts = timed([&] { a = batch::rank_sweep_serial(6, L, seeds, 1e-5); });
        const double tp = timed([&] { b = batch::rank_sweep(6, L, seeds, 1e-5); });
        report("rank_sweep", seeds.size(), ts, tp, a == b);
    }

    return 0;
}
