#include "n2alg/parallel.hpp"

#include <omp.h>

namespace n2alg {

void for_each_index(std::size_t n, ExecMode mode, const std::function<void(std::size_t)>& fn) {
    if (mode == ExecMode::serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < (long long)n; ++i) fn((std::size_t)i);
}

int max_threads() { return omp_get_max_threads(); }

} // namespace n2alg
