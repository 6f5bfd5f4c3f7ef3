// Compares the serial reference path against the OpenMP path on the
// batch-style kernels (parameter-grid spectra, interaction scans,
// multi-start projections) and prints the speedups.

#include "hslab/bubble.hpp"
#include "hslab/experiments.hpp"
#include "hslab/interaction.hpp"
#include "hslab/manifold.hpp"
#include "hslab/parallel.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace hslab;

namespace {

double time_once(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run_case(const std::string& name, const std::function<void()>& fn) {
    parallel::default_policy() = parallel::Policy::serial;
    const double ts = time_once(fn);
    parallel::default_policy() = parallel::Policy::openmp;
    const double tp = time_once(fn);
    std::printf("%-28s serial %8.3f s   openmp %8.3f s   speedup %5.2fx\n", name.c_str(), ts,
                tp, ts / tp);
}

} // namespace

int main() {
    std::printf("threads available: %d\n", parallel::max_threads());

    std::vector<ProblemParams> grid;
    for (int N : {3, 4, 5, 6})
        for (double f : {0.15, 0.3, 0.45, 0.6, 0.75, 0.9})
            for (double s : {0.5, 1.0, 1.5})
                grid.push_back(ProblemParams{N, f * 0.25 * (N - 2.0) * (N - 2.0), s});

    run_case("alpha_table (72 points)", [&] { alpha_table(grid); });

    const ProblemParams p{3, 0.1, 0.5};
    const DerivedConstants d = derive(p);
    run_case("interaction scan (48 pts)",
             [&] { scan_and_fit(p, d.two_star_s - 1.0, 1.0, 1e-5, 1e-1, 48); });

    RadialFunction U = bubble_profile(Bubble{p, 0.37, 1.0, Normalization::unit_gamma_norm});
    run_case("projection multi-start", [&] {
        for (int i = 0; i < 4; ++i) project(U, p);
    });

    run_case("cfm scan (4 members)", [&] { cfm_scan(p, 4, {0.02, 0.01}); });

    return 0;
}
