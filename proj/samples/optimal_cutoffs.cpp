// Prints the optimal common cutoff, its value, and the sequential benchmark
// for a handful of project counts.

#include <cmath>
#include <cstdio>

#include "projsel/projsel.hpp"

int main() {
  std::printf("%6s %10s %10s %10s %12s\n", "N", "cutoff", "static", "dynamic", "sqrtN*gap");
  for (std::size_t n : {2, 3, 5, 10, 50, 100, 1000, 10000}) {
    const auto r = projsel::optimal_single_cutoff(n);
    std::printf("%6zu %10.6f %10.6f %10.6f %12.8f\n", n, r.cutoff, r.expected_utility,
                projsel::dynamic_profit(n),
                std::sqrt(static_cast<double>(n)) * (1 - r.cutoff));
  }
}
