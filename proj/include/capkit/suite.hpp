#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "capkit/exec.hpp"
#include "capkit/report.hpp"

namespace capkit {

struct SuiteOptions {
    std::uint64_t seed = 7;
    Exec ex = Exec::Serial;
    bool fast = false;     // reduced sample counts and sizes for smoke runs
    std::string out_dir;   // when nonempty, the suite report is persisted there
    int only = 0;          // run a single numbered check (0 = all)
};

/// Measured quasi-additivity constant of the Choquet integral over packing
/// families for one configuration. The battery takes the max ratio over
/// covering selections of random families, selections of stopping-time
/// families of the standard corpus, and the direct stopping-time family
/// ratios, with matching integrands. Always >= 1.
double measure_packing_constant(int d, double beta, int n, std::uint64_t seed, Exec ex);

/// Runs the full verification battery, printing one [PASS]/[FAIL] line per
/// check to `log`. Returns the individual results.
std::vector<CheckResult> run_acceptance(const SuiteOptions& opt, std::ostream& log);

}  // namespace capkit
