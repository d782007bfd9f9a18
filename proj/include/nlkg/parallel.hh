// Deterministic row-parallel loop. Threads write disjoint index ranges and any
// reductions are performed in fixed index order afterwards, so results do not
// depend on the thread count.

#ifndef NLKG_PARALLEL_HH
#define NLKG_PARALLEL_HH

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace nlkg {

int num_threads();
void set_num_threads(int n);

template <class Fn>
void parallel_rows(int n_rows, Fn&& body) {
    int nt = std::min(num_threads(), n_rows);
    if (nt <= 1) {
        for (int r = 0; r < n_rows; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    int chunk = (n_rows + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        int lo = t * chunk, hi = std::min(n_rows, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int r = lo; r < hi; ++r) body(r);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace nlkg

#endif
