#pragma once

namespace capkit {

/// Serial is the default everywhere and is bit-reproducible. Parallel runs the
/// same per-node arithmetic on OpenMP threads; results agree with Serial within
/// 1e-12 relative tolerance (in the current kernels they agree bitwise, since
/// no summation order changes — the tolerance is the documented contract).
enum class Exec { Serial, Parallel };

int exec_threads(Exec ex);

}  // namespace capkit
