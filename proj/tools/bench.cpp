// Benchmark of the OpenMP kernels against their serial reference
// implementations: indicator sweep, batch eigenfunction evaluation,
// dichotomy trajectory batch, and the periodic-orbit multistart search.
#include <chrono>
#include <cstdio>
#include <functional>

#include "isolab/billiards.hpp"
#include "isolab/geometry.hpp"
#include "isolab/parallel.hpp"
#include "isolab/perturbation.hpp"
#include "isolab/spectral.hpp"

using namespace isolab;

namespace {

double time_ms(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main() {
    apply_thread_cap();
    std::printf("workers: %d\n", worker_count());

    EllipseSpec ell = build_ellipse(2.0, 1.0);
    MushroomPair pair = make_mushroom_pair(ell, {-1.85, 0.06, 0.05}, {1.80, 0.05, 0.07},
                                           {-0.8, 0.3, 0.25});
    auto shape = std::make_shared<MushroomShape>(pair.omega1);

    {
        MfsOptions opt;
        opt.n_src = 120;
        std::vector<double> ks;
        for (int i = 0; i < 24; ++i) ks.push_back(1.5 + 0.1 * i);
        std::vector<double> a, b;
        double ts = time_ms([&] { a = indicator_sweep(*shape, ks, opt, true); });
        double tp = time_ms([&] { b = indicator_sweep(*shape, ks, opt, false); });
        report("indicator_sweep", ts, tp);
    }
    {
        GroundStateOptions opt;
        opt.mfs.n_src = 120;
        opt.n_scan = 24;
        EigenPair gs = ground_state(shape, opt);
        std::vector<Vec2> pts;
        for (int i = 0; i < 200000; ++i)
            pts.push_back({-1.9 + 3.8 * (i % 499) / 499.0, 0.05 + 0.9 * (i % 997) / 997.0});
        std::vector<double> a, b;
        double ts = time_ms([&] { eval_eigenfunction_batch(gs, pts, a, true); });
        double tp = time_ms([&] { eval_eigenfunction_batch(gs, pts, b, false); });
        report("eval_eigenfunction_batch", ts, tp);
    }
    {
        double ts = time_ms([&] {
            dichotomy_check_domain(pair.omega1.boundary(), ell, 200, 200, 7, true);
        });
        double tp = time_ms([&] {
            dichotomy_check_domain(pair.omega1.boundary(), ell, 200, 200, 7, false);
        });
        report("dichotomy_check_domain", ts, tp);
    }
    {
        double ts = time_ms(
            [&] { find_orbits(pair.omega1.boundary(), ell, 3, 12.0, 100, 11, true); });
        double tp = time_ms(
            [&] { find_orbits(pair.omega1.boundary(), ell, 3, 12.0, 100, 11, false); });
        report("find_orbits", ts, tp);
    }
    return 0;
}
