#pragma once

#include <cstddef>
#include <functional>

namespace n2alg {

/// Execution mode for verification sweeps.  Serial is the reference
/// implementation; parallel runs the same loop body under OpenMP.  Results
/// must be bit-identical, which the test suite checks.
enum class ExecMode { serial, parallel };

/// Run fn(i) for i in [0, n).  Loop bodies must be independent and write
/// only to their own slot of any output array.
void for_each_index(std::size_t n, ExecMode mode, const std::function<void(std::size_t)>& fn);

int max_threads();

} // namespace n2alg
