// Times the parallel grid runner against its serial reference on a
// monodromy sweep and checks that the two produce identical results.
// Usage: bench_sweep [n_levels]   (default 8 -> 32 jobs)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <utility>
#include <vector>

#include "syl/linear.hpp"
#include "syl/orbit.hpp"
#include "syl/params.hpp"
#include "syl/sweep.hpp"

using namespace syl;

int main(int argc, char** argv) {
    const int nh = argc > 1 ? std::atoi(argv[1]) : 8;
    const Params p = Params::make(5, 2);
    const double hs = hstar(p);

    struct Task {
        double h, lambda;
    };
    std::vector<Task> tasks;
    for (int i = 1; i <= nh; ++i)
        for (double lam : {0.0, 4.0, 10.0, 15.0})
            tasks.push_back({hs * i / (nh + 1.0), lam});

    auto job = [&](std::size_t i) {
        const Orbit o = build_orbit(p, tasks[i].h, 0.0, 40.0);
        return monodromy(o, ModeSpec::make(p, tasks[i].lambda)).rho;
    };

    auto timed = [&](auto&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = fn();
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::pair{std::move(r), s};
    };

    const auto [serial, t_serial] =
        timed([&] { return run_grid_serial(tasks.size(), job); });
    const auto [parallel, t_par] = timed([&] { return run_grid(tasks.size(), job); });

    int mismatches = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (!serial[i].ok || !parallel[i].ok || serial[i].value != parallel[i].value)
            ++mismatches;

    std::printf("monodromy sweep: %zu jobs, %d thread(s)\n", tasks.size(), grid_threads());
    std::printf("serial   %.3f s\n", t_serial);
    std::printf("parallel %.3f s  (speedup %.2fx)\n", t_par,
                t_par > 0.0 ? t_serial / t_par : 0.0);
    std::printf("mismatches: %d\n", mismatches);
    return mismatches == 0 ? 0 : 1;
}
