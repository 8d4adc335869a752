// Wall-clock comparison of the serial reference runner against the OpenMP
// runner on the same plan. Also confirms both produce identical records.
//
//   bench_plan [runs] [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cro/experiment.hpp"

int main(int argc, char **argv) {
  using clock = std::chrono::steady_clock;
  cro::ExperimentPlan plan;
  plan.functions = {cro::fid(1), cro::fid(9), cro::fid(10), cro::fid(16), cro::fid(21)};
  plan.runs = argc > 1 ? std::atoi(argv[1]) : 4;
  plan.record_timing = false;
#ifdef _OPENMP
  plan.parallelism = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();
#else
  plan.parallelism = argc > 2 ? std::atoi(argv[2]) : 1;
#endif

  auto t0 = clock::now();
  const auto serial = cro::run_plan_serial(plan);
  auto t1 = clock::now();
  const auto parallel = cro::run_plan(plan);
  auto t2 = clock::now();

  const double serial_s = std::chrono::duration<double>(t1 - t0).count();
  const double parallel_s = std::chrono::duration<double>(t2 - t1).count();
  const bool same = parallel.records == serial;
  std::printf("cells      %zu\n", serial.size());
  std::printf("serial     %.3f s\n", serial_s);
  std::printf("openmp x%d %.3f s\n", plan.parallelism, parallel_s);
  std::printf("speedup    %.2f\n", serial_s / parallel_s);
  std::printf("identical  %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
