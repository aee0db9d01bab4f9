#include "capkit/ladder.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace capkit {

int exec_threads(Exec ex) {
#ifdef _OPENMP
    return ex == Exec::Parallel ? omp_get_max_threads() : 1;
#else
    (void)ex;
    return 1;
#endif
}

Ladder top_ladder(std::span<const double> g, int d, int k, double top_side, double beta,
                  LadderWorkspace& ws, Exec ex) {
    Ladder out;
    ladder_sweep(g, d, k, top_side, beta, ws, ex, [&](int j, std::size_t, const LadderView& L) {
        if (j != 0) return;
        out.values.assign(L.v, L.v + L.len);
        out.contents.assign(L.c, L.c + L.len);
    });
    return out;
}

double box_choquet(std::span<const double> g, int d, int k, double top_side, double beta,
                   LadderWorkspace& ws, Exec ex) {
    double result = 0.0;
    ladder_sweep(g, d, k, top_side, beta, ws, ex, [&](int j, std::size_t, const LadderView& L) {
        if (j == 0) result = ladder_integral(L);
    });
    return result;
}

}  // namespace capkit
