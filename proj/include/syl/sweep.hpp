#pragma once

// Data-parallel evaluation over parameter grids. Every job must be a pure
// function of its index; under that contract the parallel runner is
// observationally identical to the serial one (each result slot is written
// exactly once, exceptions are captured per slot, output order is input
// order). The serial runner is the reference the parallel one is tested
// against.

#include <cstddef>
#include <exception>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace syl {

template <typename Out>
struct GridItem {
    Out value{};
    bool ok = false;
    std::string error; // exception text when !ok
};

template <typename Fn>
using grid_result_t = std::remove_cvref_t<std::invoke_result_t<Fn&, std::size_t>>;

template <typename Fn>
std::vector<GridItem<grid_result_t<Fn>>> run_grid_serial(std::size_t count, Fn&& fn) {
    std::vector<GridItem<grid_result_t<Fn>>> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        try {
            out[i].value = fn(i);
            out[i].ok = true;
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    }
    return out;
}

template <typename Fn>
std::vector<GridItem<grid_result_t<Fn>>> run_grid(std::size_t count, Fn&& fn) {
#if defined(_OPENMP)
    std::vector<GridItem<grid_result_t<Fn>>> out(count);
    const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        const std::size_t j = static_cast<std::size_t>(i);
        try {
            out[j].value = fn(j);
            out[j].ok = true;
        } catch (const std::exception& e) {
            out[j].error = e.what();
        }
    }
    return out;
#else
    return run_grid_serial(count, std::forward<Fn>(fn));
#endif
}

inline int grid_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace syl
